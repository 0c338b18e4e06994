#include <doctest.h>

#include <cmath>

#include "anneal/metrics/metrics.hpp"
#include "anneal/sampler/langevin.hpp"
#include "oracles.hpp"

using namespace anneal;

namespace {

std::shared_ptr<const Target> standard_target(Eigen::Index d) {
  return make_mixture_target(Mixture({1.0}, {Gaussian::standard(d)}));
}

std::shared_ptr<const Target> two_modes() {
  std::vector<Gaussian> comps{Gaussian(Vector::Constant(2, -0.01), Matrix::Identity(2, 2) * 1e-5),
                              Gaussian(Vector::Constant(2, 0.01), Matrix::Identity(2, 2) * 1e-5)};
  return make_mixture_target(Mixture({0.5, 0.5}, comps));
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("ula step examples") {
  const Vector x = Vector::Constant(2, 0.3);
  CHECK(ula_step(x, Vector::Zero(2), 0.1, Vector::Zero(2)) == x);
  Vector score(2);
  score << 1.0, 0.0;
  const Vector moved = ula_step(Vector::Zero(2), score, 0.01, Vector::Zero(2));
  CHECK(moved[0] == doctest::Approx(0.01));
  CHECK(moved[1] == 0.0);
  CHECK_THROWS_AS(ula_step(x, score, 0.0, Vector::Zero(2)), InputError);
  Vector inf_score = score;
  inf_score[0] = INFINITY;
  CHECK_THROWS_AS(ula_step(x, inf_score, 0.1, Vector::Zero(2), 7), NumericalError);
  try {
    ula_step(x, inf_score, 0.1, Vector::Zero(2), 7);
  } catch (const NumericalError& e) {
    CHECK(e.particle() == 7);
  }
}

TEST_CASE("ula on N(0,1) reaches the discretized stationary variance") {
  // x' = (1 - h) x + sqrt(2h) xi has stationary variance 2h / (1 - (1-h)^2) = 1 / (1 - h/2).
  const double h = 0.1;
  RunConfig cfg;
  cfg.particles = 100000;
  cfg.iterations = 1000;
  cfg.step = StepPolicy::fixed(h);
  cfg.init = Initialization::from_gaussian(Gaussian::standard(1));
  cfg.checkpoint_stride = 1000;
  const auto traj = run_plain(cfg, standard_target(1));
  const Points& x = traj.back().positions;
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / static_cast<double>(x.rows() - 1);
  const double want = 1.0 / (1.0 - h / 2.0);
  CHECK(std::abs(var - want) / want < 0.05);
  CHECK(std::abs(var - want) / want < 0.01);
}

TEST_CASE("effective step examples") {
  CHECK(effective_step(StepPolicy::position_adaptive(0.001, 1.0), 1000.0) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(effective_step(StepPolicy::position_adaptive(0.001, 2.0), 0.0) == doctest::Approx(0.0005));
  CHECK(effective_step(StepPolicy::fixed(0.001), 1e9) == 0.001);
  CHECK(effective_step(StepPolicy::time_adaptive(0.01), 3.0, 4.0) == doctest::Approx(0.0025));
  CHECK_THROWS_AS(validate(StepPolicy::fixed(0.0)), InputError);
  CHECK_THROWS_AS(validate(StepPolicy::position_adaptive(0.1, 0.0)), InputError);
}

TEST_CASE("position-adaptive drift never exceeds h for c = 1") {
  const auto policy = StepPolicy::position_adaptive(0.001, 1.0);
  for (double norm : {0.0, 1e-6, 0.3, 1.0, 2.0, 1e3, 1e12}) {
    CHECK(effective_step(policy, norm) * norm <= policy.step * (1.0 + 1e-15));
  }
}

TEST_CASE("run with K = 0 returns only the initial checkpoint") {
  RunConfig cfg;
  cfg.particles = 10;
  cfg.iterations = 0;
  const auto traj = run_annealed(cfg, standard_target(2));
  REQUIRE(traj.size() == 1);
  CHECK(traj[0].iteration == 0);
  CHECK(traj[0].positions.isZero(0.0));
  CHECK(traj[0].lambda == 0.0);
}

TEST_CASE("checkpoint grid, time accounting and score queries") {
  RunConfig cfg;
  cfg.particles = 20;
  cfg.iterations = 250;
  cfg.checkpoint_stride = 100;
  cfg.step = StepPolicy::position_adaptive(0.002);
  std::vector<std::size_t> seen;
  const auto traj = run_annealed(cfg, standard_target(2), [&](const Checkpoint& c) { seen.push_back(c.iteration); });
  CHECK(seen == std::vector<std::size_t>{0, 100, 200, 250});
  REQUIRE(traj.size() == 4);
  CHECK(traj[1].time == 100 * 0.002);
  CHECK(traj.back().time == 250 * 0.002);
  CHECK(traj.back().lambda == doctest::Approx(0.5));
  CHECK(traj.back().score_queries == 250u * 20u);
}

TEST_CASE("same seed gives identical trajectories for any jobs value") {
  RunConfig cfg;
  cfg.particles = 64;
  cfg.iterations = 300;
  cfg.checkpoint_stride = 100;
  cfg.seed = 9;
  const auto a = run_annealed(cfg, two_modes());
  const auto b = run_annealed(cfg, two_modes());
  cfg.jobs = 4;
  const auto c = run_annealed(cfg, two_modes());
  REQUIRE(a.size() == c.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].positions == b[k].positions);
    CHECK(a[k].positions == c[k].positions);
  }
  cfg.seed = 10;
  CHECK(run_annealed(cfg, two_modes()).back().positions != a.back().positions);
}

TEST_CASE("plain ULA improves KSD from a poor start") {
  RunConfig cfg;
  cfg.particles = 300;
  cfg.iterations = 2000;
  cfg.step = StepPolicy::fixed(0.01);
  cfg.init = Initialization::from_gaussian(Gaussian(Vector::Constant(1, 3.0), Matrix::Identity(1, 1) * 0.1));
  cfg.checkpoint_stride = 2000;
  const auto target = standard_target(1);
  const auto traj = run_plain(cfg, target);
  const double first = ksd(traj.front().positions, *target, MetricConfig{});
  const double last = ksd(traj.back().positions, *target, MetricConfig{});
  CHECK(last < first);
  CHECK(traj.back().lambda == 1.0);
}

TEST_CASE("run configuration is validated") {
  const auto target = standard_target(2);
  RunConfig cfg;
  cfg.step = StepPolicy::fixed(0.0);
  CHECK_THROWS_AS(run_plain(cfg, target), InputError);
  cfg = {};
  cfg.particles = 0;
  CHECK_THROWS_AS(run_annealed(cfg, target), InputError);
  cfg = {};
  cfg.init = Initialization::from_gaussian(Gaussian::standard(2));
  CHECK_THROWS_AS(run_annealed(cfg, target), InputError);  // dilation needs a Dirac start
  cfg = {};
  cfg.path.kind = PathKind::geometric;
  CHECK_THROWS_AS(run_annealed(cfg, target), InputError);  // no proposal
  cfg = {};
  cfg.path.kind = PathKind::convolutional_mc;
  CHECK_THROWS_AS(run_annealed(cfg, target), InputError);  // linear schedule
  cfg = {};
  cfg.init = Initialization::from_uniform(Vector::Ones(2), Vector::Zero(2));
  cfg.path.kind = PathKind::none;
  CHECK_THROWS_AS(run_annealed(cfg, target), InputError);
}

TEST_CASE("initializations") {
  RunConfig cfg;
  cfg.particles = 5000;
  cfg.init = Initialization::from_uniform(Vector::Constant(2, -1.0), Vector::Constant(2, 3.0));
  const ParticleCloud u = initialize_cloud(cfg, 2);
  CHECK((u.positions.array() >= -1.0).all());
  CHECK((u.positions.array() <= 3.0).all());
  CHECK(std::abs(u.positions.mean() - 1.0) < 0.1);
  CHECK(u.streams.size() == 5000);
  cfg.init = Initialization::dirac();
  CHECK(initialize_cloud(cfg, 2).positions.isZero(0.0));
}

TEST_CASE("fixed-step dilation from a Dirac diverges on a sharp target") {
  RunConfig cfg;
  cfg.particles = 50;
  cfg.iterations = 200;
  cfg.step = StepPolicy::fixed(0.001);
  try {
    run_annealed(cfg, two_modes());
    FAIL("expected a numerical abort");
  } catch (const NumericalError& e) {
    CHECK(e.iteration() >= 1);
    CHECK(e.particle().has_value());
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
  cfg.step = StepPolicy::position_adaptive(0.001);
  const auto traj = run_annealed(cfg, two_modes());
  CHECK(traj.back().positions.allFinite());
}

TEST_CASE("geometric, convolutional and MC paths run end to end") {
  std::vector<Gaussian> comps{Gaussian(Vector::Constant(2, -2.0), Matrix::Identity(2, 2)),
                              Gaussian(Vector::Constant(2, 2.0), Matrix::Identity(2, 2))};
  const auto target = make_mixture_target(Mixture({0.5, 0.5}, comps));
  RunConfig cfg;
  cfg.particles = 40;
  cfg.iterations = 100;
  cfg.step = StepPolicy::fixed(0.01);
  cfg.init = Initialization::from_gaussian(Gaussian::standard(2));
  cfg.path.proposal = Gaussian::standard(2);
  for (PathKind kind : {PathKind::geometric, PathKind::convolutional_exact}) {
    cfg.path.kind = kind;
    const auto traj = run_annealed(cfg, target);
    CHECK(traj.back().positions.allFinite());
    CHECK(traj.back().score_queries == 4000u);
  }
  cfg.path.kind = PathKind::convolutional_mc;
  cfg.path.mc.samples = 4;
  cfg.path.mc.iterations = 10;
  cfg.iterations = 20;
  cfg.schedule = Schedule::exponential(0.1);
  const auto traj = run_annealed(cfg, target);
  CHECK(traj.back().positions.allFinite());
  // 10 steps before t reaches T cost 4 * 10 queries each, the remaining 10 cost one.
  CHECK(traj.back().score_queries == 40u * (9u * 40u + 11u));
}

}  // TEST_SUITE
