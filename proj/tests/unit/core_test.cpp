#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anneal/core/mixture_json.hpp"
#include "anneal/core/target.hpp"
#include "oracles.hpp"

using namespace anneal;

namespace {

Gaussian g1(double mean, double var) { return Gaussian(Vector::Constant(1, mean), Matrix::Constant(1, 1, var)); }

Vector v1(double x) { return Vector::Constant(1, x); }

Mixture random_mixture(std::mt19937_64& rng, int d, int m) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& x : w) total += (x = u(rng));
  for (auto& x : w) x /= total;
  std::vector<Gaussian> comps;
  for (int k = 0; k < m; ++k) {
    comps.emplace_back(oracle::random_vector(rng, d, -3.0, 3.0), oracle::random_spd(rng, d, 0.3, 2.0));
  }
  return Mixture(w, comps);
}

oracle::MixtureSpec spec_of(const Mixture& g) {
  oracle::MixtureSpec s;
  s.weights = g.weights();
  for (const auto& c : g.components()) {
    s.means.push_back(c.mean());
    s.covs.push_back(c.covariance());
  }
  return s;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("gaussian construction rejects bad covariances") {
  CHECK_THROWS_AS(Gaussian(Vector::Zero(2), Matrix::Identity(3, 3)), InputError);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(Gaussian(Vector::Zero(2), asym), InputError);
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(Gaussian(Vector::Zero(2), indefinite), InputError);
  CHECK_THROWS_AS(Gaussian(Vector::Zero(0), Matrix(0, 0)), InputError);
  Vector nan_mean = Vector::Zero(1);
  nan_mean[0] = NAN;
  CHECK_THROWS_AS(Gaussian(nan_mean, Matrix::Identity(1, 1)), InputError);
}

TEST_CASE("gaussian log density matches the textbook formula") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    const Gaussian g(oracle::random_vector(rng, d, -2, 2), oracle::random_spd(rng, d, 0.2, 3.0));
    const Vector x = oracle::random_vector(rng, d, -3, 3);
    CHECK(log_density(g, x) == doctest::Approx(std::log(oracle::normal_pdf(x, g.mean(), g.covariance()))).epsilon(1e-12));
  }
}

TEST_CASE("mixture construction validates weights and dimensions") {
  CHECK_THROWS_AS(Mixture({}, {}), InputError);
  CHECK_THROWS_AS(Mixture({0.5, 0.6}, {g1(0, 1), g1(1, 1)}), InputError);
  CHECK_THROWS_AS(Mixture({1.0}, {g1(0, 1), g1(1, 1)}), InputError);
  CHECK_THROWS_AS(Mixture({-0.5, 1.5}, {g1(0, 1), g1(1, 1)}), InputError);
  CHECK_THROWS_AS(Mixture({0.5, 0.5}, {g1(0, 1), Gaussian::standard(2)}), InputError);
  CHECK_NOTHROW(Mixture({1.0, 0.0}, {g1(0, 1), g1(1, 1)}));
}

TEST_CASE("gmm_log_density examples") {
  const Mixture one({1.0}, {g1(0, 1)});
  CHECK(gmm_log_density(one, v1(0.0)) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(gmm_log_density(one, v1(0.0)) == doctest::Approx(-0.91894).epsilon(1e-5));

  const Mixture two({0.5, 0.5}, {g1(-1, 1), g1(1, 1)});
  const double expected = std::log(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi));
  CHECK(gmm_log_density(two, v1(0.0)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(gmm_log_density(two, v1(0.0)) == doctest::Approx(-1.41894).epsilon(1e-5));
}

TEST_CASE("gmm_log_density stays finite where every term underflows") {
  const Mixture g({0.3, 0.7}, {g1(-1, 0.01), g1(1, 0.01)});
  const double far = gmm_log_density(g, v1(200.0));
  CHECK(std::isfinite(far));
  // The nearer component dominates: log(0.7) + log N(200; 1, 0.01).
  const double dominant = std::log(0.7) - 0.5 * std::log(2 * std::numbers::pi * 0.01) - 0.5 * 199.0 * 199.0 / 0.01;
  CHECK(far == doctest::Approx(dominant).epsilon(1e-12));
  CHECK(std::isfinite(gmm_score(g, v1(200.0))[0]));
}

TEST_CASE("gmm_log_density agrees with the direct sum and is permutation invariant") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Mixture g = random_mixture(rng, 2, 4);
    const Vector x = oracle::random_vector(rng, 2, -3, 3);
    CHECK(gmm_log_density(g, x) == doctest::Approx(std::log(oracle::mixture_pdf(spec_of(g), x))).epsilon(1e-11));
    std::vector<double> w(g.weights().rbegin(), g.weights().rend());
    std::vector<Gaussian> c(g.components().rbegin(), g.components().rend());
    CHECK(gmm_log_density(Mixture(w, c), x) == doctest::Approx(gmm_log_density(g, x)).epsilon(1e-14));
  }
}

TEST_CASE("mixture density integrates to one on a grid") {
  std::mt19937_64 rng(3);
  const Mixture g1d = random_mixture(rng, 1, 3);
  const double i1 = oracle::integrate_1d([&](double x) { return std::exp(gmm_log_density(g1d, v1(x))); }, -15, 15, 3000);
  CHECK(i1 == doctest::Approx(1.0).epsilon(1e-3));
  const Mixture g2d = random_mixture(rng, 2, 3);
  Vector x(2);
  const double i2 = oracle::integrate_2d(
      [&](double a, double b) {
        x << a, b;
        return std::exp(gmm_log_density(g2d, x));
      },
      -12, 12, -12, 12, 400);
  CHECK(i2 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("gmm_score examples") {
  const Mixture std2({1.0}, {Gaussian::standard(2)});
  Vector x(2);
  x << 0.3, -1.7;
  CHECK((gmm_score(std2, x) + x).norm() < 1e-14);

  const Mixture sym({0.5, 0.5}, {g1(-2.5, 0.7), g1(2.5, 0.7)});
  CHECK(std::abs(gmm_score(sym, v1(0.0))[0]) < 1e-15);
}

TEST_CASE("gmm_score matches a finite-difference gradient of the log density") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Mixture g = random_mixture(rng, 2, 3);
    const Vector x = oracle::random_vector(rng, 2, -4, 4);
    const Vector fd = oracle::gradient([&](const Vector& y) { return gmm_log_density(g, y); }, x);
    const Vector s = gmm_score(g, x);
    CHECK((s - fd).norm() <= 1e-5 * (1.0 + s.norm()));
  }
}

TEST_CASE("target interface score matches its log density") {
  std::mt19937_64 rng(5);
  const auto target = make_mixture_target(random_mixture(rng, 3, 5));
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = oracle::random_vector(rng, 3, -4, 4);
    const Vector fd = oracle::gradient([&](const Vector& y) { return target->log_density(y); }, x);
    const Vector s = target->score(x);
    CHECK((s - fd).norm() <= 1e-5 * (1.0 + s.norm()));
  }
  CHECK(target->mixture() != nullptr);
}

TEST_CASE("responsibilities are a probability vector") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Mixture g = random_mixture(rng, 2, 5);
    const Vector r = gmm_responsibilities(g, oracle::random_vector(rng, 2, -6, 6));
    CHECK((r.array() >= 0.0).all());
    CHECK(std::abs(r.sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("gmm_sample: standard normal mean obeys the CLT bound") {
  const Mixture g({1.0}, {g1(0, 1)});
  RandomStream rng(7);
  const Points draws = gmm_sample(g, 100000, rng);
  CHECK(std::abs(draws.mean()) < 3.0 * std::pow(10.0, -2.5));
}

TEST_CASE("gmm_sample: degenerate weights draw only from the live component") {
  const Mixture g({1.0, 0.0}, {g1(-50, 1), g1(50, 1)});
  RandomStream rng(8);
  const Points draws = gmm_sample(g, 5000, rng);
  CHECK((draws.array() < 0.0).all());
}

TEST_CASE("gmm_sample: fixed seed reproduces bit for bit") {
  std::mt19937_64 mrng(9);
  const Mixture g = random_mixture(mrng, 2, 4);
  RandomStream a(42), b(42), c(43);
  const Points pa = gmm_sample(g, 1000, a), pb = gmm_sample(g, 1000, b), pc = gmm_sample(g, 1000, c);
  CHECK(pa == pb);
  CHECK(pa != pc);
  CHECK_THROWS_AS(gmm_sample(g, 0, a), InputError);
}

TEST_CASE("gmm_sample moments match the mixture") {
  std::mt19937_64 mrng(10);
  const Mixture g = random_mixture(mrng, 2, 3);
  RandomStream rng(11);
  const Points draws = gmm_sample(g, 200000, rng);
  const Vector mean = draws.colwise().mean().transpose();
  // Independent moments from the spec.
  Vector want_mean = Vector::Zero(2);
  for (std::size_t m = 0; m < g.size(); ++m) want_mean += g.weights()[m] * g.component(m).mean();
  Matrix want_cov = Matrix::Zero(2, 2);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const Vector dm = g.component(m).mean() - want_mean;
    want_cov += g.weights()[m] * (g.component(m).covariance() + dm * dm.transpose());
  }
  const Matrix centered = draws.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(draws.rows() - 1);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(mean[j] - want_mean[j]) < 4.0 * std::sqrt(want_cov(j, j) / 200000.0));
  CHECK((cov - want_cov).norm() < 0.05 * want_cov.norm());
  CHECK((gmm_mean(g) - want_mean).norm() < 1e-12);
  CHECK((gmm_covariance(g) - want_cov).norm() < 1e-12);
}

TEST_CASE("gaussian_product examples against quadrature") {
  const auto p = gaussian_product(g1(0, 1), g1(0, 1));
  CHECK(p.gaussian.mean()[0] == doctest::Approx(0.0));
  CHECK(p.gaussian.covariance()(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.log_normalizer == doctest::Approx(std::log(oracle::normal_pdf_1d(0, 0, 2))).epsilon(1e-14));
  const double z = oracle::integrate_1d([](double x) { return oracle::normal_pdf_1d(x, 0, 1) * oracle::normal_pdf_1d(x, 0, 1); }, -12, 12, 4000);
  CHECK(std::abs(std::exp(p.log_normalizer) - z) < 1e-6);

  const auto same = gaussian_product(g1(1.7, 0.4), g1(1.7, 0.4));
  CHECK(same.gaussian.mean()[0] == doctest::Approx(1.7).epsilon(1e-14));

  // N(0,1) * N(2,3): normalizer, mean and variance of the normalized product by quadrature.
  const auto q = gaussian_product(g1(0, 1), g1(2, 3));
  auto f = [](double x) { return oracle::normal_pdf_1d(x, 0, 1) * oracle::normal_pdf_1d(x, 2, 3); };
  const double zq = oracle::integrate_1d(f, -15, 15, 6000);
  const double mq = oracle::integrate_1d([&](double x) { return x * f(x); }, -15, 15, 6000) / zq;
  const double vq = oracle::integrate_1d([&](double x) { return (x - mq) * (x - mq) * f(x); }, -15, 15, 6000) / zq;
  CHECK(std::abs(std::exp(q.log_normalizer) - zq) < 1e-6);
  CHECK(std::abs(q.gaussian.mean()[0] - mq) < 1e-6);
  CHECK(std::abs(q.gaussian.covariance()(0, 0) - vq) < 1e-6);
  // Precision-weighted mean 0.5 (mu1 s2 + mu2 s1)/(s1+s2); the variance-weighted form would give 1.5.
  CHECK(q.gaussian.mean()[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gaussian_product matches the pointwise product at random points") {
  std::mt19937_64 rng(12);
  const Gaussian a(oracle::random_vector(rng, 2, -1, 1), oracle::random_spd(rng, 2, 0.3, 2));
  const Gaussian b(oracle::random_vector(rng, 2, -1, 1), oracle::random_spd(rng, 2, 0.3, 2));
  const auto p = gaussian_product(a, b);
  for (int i = 0; i < 50; ++i) {
    const Vector x = oracle::random_vector(rng, 2, -3, 3);
    const double lhs = oracle::normal_pdf(x, a.mean(), a.covariance()) * oracle::normal_pdf(x, b.mean(), b.covariance());
    const double rhs = std::exp(p.log_normalizer) * oracle::normal_pdf(x, p.gaussian.mean(), p.gaussian.covariance());
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1e-300, std::abs(lhs)) + 1e-300);
  }
}

TEST_CASE("gaussian_convolve examples") {
  const Gaussian c = gaussian_convolve(g1(0, 1), g1(0, 1));
  CHECK(c.mean()[0] == 0.0);
  CHECK(c.covariance()(0, 0) == 2.0);

  const Gaussian d = gaussian_convolve(g1(1, 2), g1(-1, 3));
  CHECK(d.mean()[0] == doctest::Approx(0.0));
  CHECK(d.covariance()(0, 0) == doctest::Approx(5.0));
  // Monte Carlo oracle: sums of independent draws.
  RandomStream rng(13);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = (1.0 + std::sqrt(2.0) * rng.normal()) + (-1.0 + std::sqrt(3.0) * rng.normal());
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - d.mean()[0]) < 4.0 * std::sqrt(5.0 / n));
  CHECK(std::abs(var - d.covariance()(0, 0)) < 0.05 * 5.0);

  std::mt19937_64 mrng(14);
  const Gaussian base(Vector::Constant(2, 0.7), oracle::random_spd(mrng, 2, 0.5, 2));
  const Gaussian dirac(Vector::Zero(2), Matrix::Identity(2, 2) * 1e-12);
  const Gaussian same = gaussian_convolve(base, dirac);
  CHECK((same.mean() - base.mean()).norm() < 1e-10);
  CHECK((same.covariance() - base.covariance()).norm() < 1e-10);
}

// The Gaussian identities: shift, scaling, gradient, product, convolution,
// each at 50 random parameter draws, tolerance 1e-6.
TEST_CASE("gaussian identities hold at random parameter draws") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  constexpr double tol = 1e-6;
  for (int draw = 0; draw < 50; ++draw) {
    const int d = 1 + draw % 2;
    const Gaussian g(oracle::random_vector(rng, d, -1.5, 1.5), oracle::random_spd(rng, d, 0.4, 2.0));
    const Vector x = oracle::random_vector(rng, d, -2, 2);
    const double px = oracle::normal_pdf(x, g.mean(), g.covariance());

    // Interchangeability of mean and argument.
    CHECK(std::abs(std::exp(log_density(g, x)) - oracle::normal_pdf(g.mean(), x, g.covariance())) <= tol * px);

    // Shift.
    const Vector a = oracle::random_vector(rng, d, -2, 2);
    const Gaussian shifted = gaussian_shift(g, a);
    CHECK(std::abs(oracle::normal_pdf(Vector(x - a), g.mean(), g.covariance()) -
                   std::exp(log_density(shifted, x))) <= tol * std::max(px, 1e-3));

    // Scaling with the |a|^d factor; for d = 1 and a > 0 this is the scalar form a N(x; a mu, a^2 S).
    double factor = 0.3 + 1.7 * std::abs(u(rng));
    if (draw % 4 == 3) factor = -factor;
    const Gaussian scaled = gaussian_scale(g, factor);
    const double lhs = oracle::normal_pdf(Vector(x / factor), g.mean(), g.covariance());
    const double rhs = std::pow(std::abs(factor), d) * std::exp(log_density(scaled, x));
    CHECK(std::abs(lhs - rhs) <= tol * std::max(lhs, 1e-3));
    if (d == 1 && factor > 0) CHECK(std::abs(lhs - factor * std::exp(log_density(scaled, x))) <= tol * std::max(lhs, 1e-3));
    // Scaling is the law of a X: quadrature of its mean and variance in 1D.
    if (d == 1) {
      const double m = g.mean()[0], s = g.covariance()(0, 0);
      const double lo = std::min(factor * m, 0.0) - 12 * std::abs(factor) * std::sqrt(s);
      const double hi = std::max(factor * m, 0.0) + 12 * std::abs(factor) * std::sqrt(s);
      auto law = [&](double y) { return oracle::normal_pdf_1d(y / factor, m, s) / std::abs(factor); };
      const double mass = oracle::integrate_1d(law, lo, hi, 4000);
      const double mean = oracle::integrate_1d([&](double y) { return y * law(y); }, lo, hi, 4000);
      CHECK(std::abs(mass - 1.0) < tol);
      CHECK(std::abs(mean - scaled.mean()[0]) < tol * (1.0 + std::abs(mean)));
    }

    // Gradient of the density against central differences of the oracle density.
    const Vector grad = density_gradient(g, x);
    const Vector fd = oracle::gradient([&](const Vector& y) { return oracle::normal_pdf(y, g.mean(), g.covariance()); }, x, 1e-4);
    CHECK((grad - fd).norm() <= tol * std::max(1.0, grad.norm()));
    CHECK((score(g, x) - g.precision() * (g.mean() - x)).norm() < 1e-12);

    // Product: normalizer and moments by quadrature (1D), pointwise identity (2D).
    const Gaussian h(oracle::random_vector(rng, d, -1.5, 1.5), oracle::random_spd(rng, d, 0.4, 2.0));
    const auto prod = gaussian_product(g, h);
    if (d == 1) {
      auto f = [&](double y) {
        return oracle::normal_pdf_1d(y, g.mean()[0], g.covariance()(0, 0)) * oracle::normal_pdf_1d(y, h.mean()[0], h.covariance()(0, 0));
      };
      const double z = oracle::integrate_1d(f, -15, 15, 6000);
      const double mean = oracle::integrate_1d([&](double y) { return y * f(y); }, -15, 15, 6000) / z;
      const double var = oracle::integrate_1d([&](double y) { return (y - mean) * (y - mean) * f(y); }, -15, 15, 6000) / z;
      CHECK(std::abs(std::exp(prod.log_normalizer) - z) < tol * std::max(z, 1e-3));
      CHECK(std::abs(prod.gaussian.mean()[0] - mean) < tol);
      CHECK(std::abs(prod.gaussian.covariance()(0, 0) - var) < tol);
    } else {
      const double lhs2 = oracle::normal_pdf(x, g.mean(), g.covariance()) * oracle::normal_pdf(x, h.mean(), h.covariance());
      const double rhs2 = std::exp(prod.log_normalizer) * oracle::normal_pdf(x, prod.gaussian.mean(), prod.gaussian.covariance());
      CHECK(std::abs(lhs2 - rhs2) <= tol * std::max(lhs2, 1e-3));
    }

    // Convolution: (p * q)(x) = integral p(y) q(x - y) dy.
    const Gaussian conv = gaussian_convolve(g, h);
    double integral = 0.0;
    if (d == 1) {
      integral = oracle::integrate_1d(
          [&](double y) {
            return oracle::normal_pdf_1d(y, g.mean()[0], g.covariance()(0, 0)) *
                   oracle::normal_pdf_1d(x[0] - y, h.mean()[0], h.covariance()(0, 0));
          },
          -15, 15, 6000);
    } else {
      Vector y(2);
      integral = oracle::integrate_2d(
          [&](double y0, double y1) {
            y << y0, y1;
            return oracle::normal_pdf(y, g.mean(), g.covariance()) * oracle::normal_pdf(Vector(x - y), h.mean(), h.covariance());
          },
          -10, 10, -10, 10, 300);
    }
    CHECK(std::abs(std::exp(log_density(conv, x)) - integral) < tol);
  }
}

TEST_CASE("mixture json round trip and shorthand covariances") {
  const auto j = nlohmann::json::parse(R"({"weights":[0.25,0.75],"means":[[0,1],[2,3]],"covariances":[1.5,[1,2]]})");
  const Mixture g = mixture_from_json(j);
  CHECK(g.component(0).covariance().isApprox(Matrix::Identity(2, 2) * 1.5));
  CHECK(g.component(1).covariance()(1, 1) == 2.0);
  const Mixture back = mixture_from_json(mixture_to_json(g));
  CHECK(back.weights() == g.weights());
  CHECK(back.component(1).mean() == g.component(1).mean());
  CHECK_THROWS_AS(mixture_from_json(nlohmann::json::parse(R"({"weights":[1],"means":[[0]]})")), InputError);
}

TEST_CASE("random streams derive independent, reproducible seeds") {
  RandomStream a(5, 0), b(5, 0), c(5, 1);
  CHECK(a.bits() == b.bits());
  CHECK(a.bits() != c.bits());
  CHECK(derive_seed(0, 1) == derive_seed(0, 1));
  CHECK(derive_seed(0, 1) != derive_seed(0, 2));
}

}  // TEST_SUITE
