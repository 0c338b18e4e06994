#include "anneal/sampler/langevin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace anneal {

const char* to_string(StepPolicy::Kind k) {
  switch (k) {
    case StepPolicy::Kind::fixed: return "fixed";
    case StepPolicy::Kind::time_adaptive: return "time_adaptive";
    case StepPolicy::Kind::position_adaptive: return "position_adaptive";
  }
  return "?";
}

const char* to_string(Initialization::Kind k) {
  switch (k) {
    case Initialization::Kind::dirac_at_origin: return "dirac";
    case Initialization::Kind::gaussian: return "gaussian";
    case Initialization::Kind::uniform: return "uniform";
  }
  return "?";
}

void validate(const StepPolicy& policy) {
  if (!(policy.step > 0.0) || !std::isfinite(policy.step)) {
    throw InputError("step size h must be positive and finite");
  }
  if (!(policy.bound > 0.0) || !std::isfinite(policy.bound)) {
    throw InputError("position-adaptive bound c must be positive and finite");
  }
}

double effective_step(const StepPolicy& policy, double score_norm, double cloud_mean_sq_norm) {
  switch (policy.kind) {
    case StepPolicy::Kind::fixed:
      return policy.step;
    case StepPolicy::Kind::time_adaptive:
      return cloud_mean_sq_norm > 0.0 ? policy.step / cloud_mean_sq_norm : policy.step;
    case StepPolicy::Kind::position_adaptive:
      return policy.step / std::max(policy.bound, score_norm);
  }
  return policy.step;
}

Vector ula_step(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& score, double h,
                const Eigen::Ref<const Vector>& noise, std::size_t particle) {
  if (!(h > 0.0)) throw InputError("ula_step: step must be positive");
  if (x.size() != score.size() || x.size() != noise.size()) {
    throw InputError("ula_step: dimension mismatch");
  }
  Vector out = x + h * score + std::sqrt(2.0 * h) * noise;
  if (!out.allFinite()) {
    throw NumericalError("non-finite particle " + std::to_string(particle), 0, particle);
  }
  return out;
}

void validate(const RunConfig& config, Eigen::Index dim) {
  if (config.particles < 1) throw InputError("run needs at least one particle");
  if (config.checkpoint_stride < 1) throw InputError("checkpoint stride must be at least 1");
  if (config.jobs < 1) throw InputError("jobs must be at least 1");
  validate(config.step);
  if (config.schedule.kind == Schedule::Kind::exponential && !(config.schedule.horizon > 0.0)) {
    throw InputError("exponential schedule needs a positive horizon");
  }
  const auto& init = config.init;
  switch (init.kind) {
    case Initialization::Kind::dirac_at_origin:
      break;
    case Initialization::Kind::gaussian:
      if (!init.gaussian || init.gaussian->dim() != dim) {
        throw InputError("gaussian initialization must match the target dimension");
      }
      break;
    case Initialization::Kind::uniform:
      if (init.low.size() != dim || init.high.size() != dim) {
        throw InputError("uniform initialization bounds must match the target dimension");
      }
      if ((init.high.array() <= init.low.array()).any()) {
        throw InputError("uniform initialization needs low < high in every coordinate");
      }
      break;
  }
  const auto kind = config.path.kind;
  if (kind == PathKind::dilation && init.kind != Initialization::Kind::dirac_at_origin) {
    throw InputError("dilation path requires dirac initialization at the origin");
  }
  if ((kind == PathKind::geometric || kind == PathKind::convolutional_exact) &&
      (!config.path.proposal || config.path.proposal->dim() != dim)) {
    throw InputError(std::string(to_string(kind)) + " path needs a proposal of the target dimension");
  }
  if (kind == PathKind::convolutional_mc) {
    if (config.schedule.kind != Schedule::Kind::exponential) {
      throw InputError("convolutional_mc path needs an exponential schedule");
    }
    validate(config.path.mc);
  }
}

PathScore<double> make_path(const PathSpec& spec, std::shared_ptr<const Target> target,
                            const Schedule& schedule) {
  switch (spec.kind) {
    case PathKind::none:
      return PathScore<double>::none(std::move(target));
    case PathKind::dilation:
      return PathScore<double>::dilation(std::move(target));
    case PathKind::geometric:
      if (!spec.proposal) throw InputError("geometric path needs a proposal");
      return PathScore<double>::geometric(std::move(target), *spec.proposal);
    case PathKind::convolutional_exact:
      if (!spec.proposal) throw InputError("convolutional_exact path needs a proposal");
      return PathScore<double>::convolutional_exact(std::move(target), *spec.proposal);
    case PathKind::convolutional_mc:
      if (schedule.kind != Schedule::Kind::exponential) {
        throw InputError("convolutional_mc path needs an exponential schedule");
      }
      return PathScore<double>::convolutional_mc(std::move(target), schedule.horizon, spec.mc);
  }
  throw InputError("unknown path kind");
}

ParticleCloud initialize_cloud(const RunConfig& config, Eigen::Index dim) {
  ParticleCloud cloud;
  const auto n = static_cast<Eigen::Index>(config.particles);
  cloud.positions = Points::Zero(n, dim);
  cloud.streams.reserve(config.particles);
  for (std::size_t i = 0; i < config.particles; ++i) cloud.streams.emplace_back(config.seed, i);

  const auto& init = config.init;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& rng = cloud.streams[static_cast<std::size_t>(i)];
    switch (init.kind) {
      case Initialization::Kind::dirac_at_origin:
        break;
      case Initialization::Kind::gaussian:
        cloud.positions.row(i) = gaussian_draw(*init.gaussian, rng).transpose();
        break;
      case Initialization::Kind::uniform:
        for (Eigen::Index j = 0; j < dim; ++j) {
          cloud.positions(i, j) = init.low[j] + (init.high[j] - init.low[j]) * rng.uniform();
        }
        break;
    }
  }
  return cloud;
}

namespace {

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

Trajectory run_annealed(const RunConfig& config, std::shared_ptr<const Target> target,
                        const CheckpointSink& sink) {
  if (!target) throw InputError("run needs a target");
  const Eigen::Index d = target->dim();
  validate(config, d);
  const PathScore<double> path = make_path(config.path, target, config.schedule);

  ParticleCloud cloud = initialize_cloud(config, d);
  const auto n = static_cast<Eigen::Index>(config.particles);
  const double h = config.step.step;
  const int jobs = config.jobs;
  const bool plain = config.path.kind == PathKind::none;

  Points scores(n, d);
  Vector norms(n);
  std::vector<std::uint64_t> queries(config.particles, 0);
  std::vector<unsigned char> bad(config.particles, 0);
  Trajectory trajectory;
  Stopwatch clock;

  auto emit = [&](double lambda) {
    Checkpoint cp;
    cp.iteration = cloud.iteration;
    cp.time = cloud.time;
    cp.lambda = lambda;
    cp.wall_time_ms = clock.elapsed_ms();
    for (auto q : queries) cp.score_queries += q;
    cp.positions = cloud.positions;
    if (sink) sink(cp);
    trajectory.push_back(std::move(cp));
  };

  emit(plain ? 1.0 : schedule_eval(config.schedule, 0.0));

  for (std::size_t k = 1; k <= config.iterations; ++k) {
    const double t = static_cast<double>(k) * h;
    const double lambda = plain ? 1.0 : schedule_eval(config.schedule, t);
    const auto level = path.at(lambda, t);

#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto p = static_cast<std::size_t>(i);
      queries[p] += level.score_into(cloud.positions.row(i).transpose(), scores.row(i).transpose(),
                                     cloud.streams[p]);
      norms[i] = scores.row(i).norm();
    }

    double mean_sq = 0.0;
    if (config.step.kind == StepPolicy::Kind::time_adaptive) {
      for (Eigen::Index i = 0; i < n; ++i) mean_sq += norms[i] * norms[i];
      mean_sq /= static_cast<double>(n);
    }

#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto p = static_cast<std::size_t>(i);
      const double step = effective_step(config.step, norms[i], mean_sq);
      const double noise = std::sqrt(2.0 * step);
      auto& rng = cloud.streams[p];
      bool finite = std::isfinite(norms[i]);
      for (Eigen::Index j = 0; j < d; ++j) {
        double& x = cloud.positions(i, j);
        x += step * scores(i, j) + noise * rng.normal();
        finite = finite && std::isfinite(x);
      }
      bad[p] = finite ? 0 : 1;
    }

    const auto first_bad = std::find(bad.begin(), bad.end(), 1);
    if (first_bad != bad.end()) {
      const auto particle = static_cast<std::size_t>(first_bad - bad.begin());
      throw NumericalError("non-finite particle " + std::to_string(particle) + " at iteration " +
                               std::to_string(k) + " (lambda = " + std::to_string(lambda) + ")",
                           k, particle);
    }

    cloud.iteration = k;
    cloud.time = t;
    if (k % config.checkpoint_stride == 0 || k == config.iterations) emit(lambda);
  }
  return trajectory;
}

Trajectory run_plain(const RunConfig& config, std::shared_ptr<const Target> target,
                     const CheckpointSink& sink) {
  RunConfig plain = config;
  plain.path = PathSpec{PathKind::none, std::nullopt, {}};
  return run_annealed(plain, std::move(target), sink);
}

}  // namespace anneal
