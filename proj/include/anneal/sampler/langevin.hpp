#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "anneal/core/target.hpp"
#include "anneal/paths/path_score.hpp"
#include "anneal/paths/schedule.hpp"

namespace anneal {

/// How the base step h is turned into the step actually taken.
///   fixed:             h
///   time_adaptive:     h / mean over the cloud of |score|^2
///   position_adaptive: h / max(c, |score|), so the drift h_eff*|score| never exceeds h*max(1, |score|/c)
struct StepPolicy {
  enum class Kind { fixed, time_adaptive, position_adaptive };

  Kind kind = Kind::position_adaptive;
  double step = 1e-3;
  double bound = 1.0;

  static StepPolicy fixed(double h) { return {Kind::fixed, h, 1.0}; }
  static StepPolicy time_adaptive(double h) { return {Kind::time_adaptive, h, 1.0}; }
  static StepPolicy position_adaptive(double h, double c = 1.0) {
    return {Kind::position_adaptive, h, c};
  }
};

const char* to_string(StepPolicy::Kind k);
void validate(const StepPolicy& policy);

double effective_step(const StepPolicy& policy, double score_norm, double cloud_mean_sq_norm = 0.0);

/// One unadjusted Langevin update x + h score + sqrt(2h) noise.
/// Throws NumericalError (carrying `particle`) when the result is not finite.
Vector ula_step(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& score, double h,
                const Eigen::Ref<const Vector>& noise, std::size_t particle = 0);

struct Initialization {
  enum class Kind { dirac_at_origin, gaussian, uniform };

  Kind kind = Kind::dirac_at_origin;
  std::optional<Gaussian> gaussian;
  Vector low, high;

  static Initialization dirac() { return {}; }
  static Initialization from_gaussian(Gaussian g) { return {Kind::gaussian, std::move(g), {}, {}}; }
  static Initialization from_uniform(Vector lo, Vector hi) {
    return {Kind::uniform, std::nullopt, std::move(lo), std::move(hi)};
  }
};

const char* to_string(Initialization::Kind k);

/// Which path the annealed sampler follows. The proposal is required for
/// geometric and convolutional_exact; the MC path uses N(0, I) and takes its
/// horizon from an exponential schedule.
struct PathSpec {
  PathKind kind = PathKind::dilation;
  std::optional<Gaussian> proposal;
  McEstimatorConfig<double> mc{};
};

struct RunConfig {
  std::size_t particles = 1000;
  std::size_t iterations = 10000;
  StepPolicy step = StepPolicy::position_adaptive(1e-3);
  Schedule schedule = Schedule::linear();
  PathSpec path{};
  Initialization init{};
  std::size_t checkpoint_stride = 1000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void validate(const RunConfig& config, Eigen::Index dim);

PathScore<double> make_path(const PathSpec& spec, std::shared_ptr<const Target> target,
                            const Schedule& schedule);

/// Live sampler state: positions (one particle per row), iteration count,
/// schedule time t = k*h and one random stream per particle.
struct ParticleCloud {
  Points positions;
  std::size_t iteration = 0;
  double time = 0.0;
  std::vector<RandomStream> streams;
};

ParticleCloud initialize_cloud(const RunConfig& config, Eigen::Index dim);

struct Checkpoint {
  std::size_t iteration = 0;
  double time = 0.0;
  double lambda = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t score_queries = 0;
  Points positions;
};

using Trajectory = std::vector<Checkpoint>;
using CheckpointSink = std::function<void(const Checkpoint&)>;

/// Annealed ULA over the configured path. Checkpoints are emitted at k = 0,
/// every `checkpoint_stride` iterations and at k = K. Results depend only on
/// the config and seed, not on `jobs`.
Trajectory run_annealed(const RunConfig& config, std::shared_ptr<const Target> target,
                        const CheckpointSink& sink = {});

/// Plain ULA on the target (lambda fixed to 1).
Trajectory run_plain(const RunConfig& config, std::shared_ptr<const Target> target,
                     const CheckpointSink& sink = {});

}  // namespace anneal
