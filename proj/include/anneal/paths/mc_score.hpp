#pragma once

#include <type_traits>
#include <cmath>
#include <cstddef>
#include <string>

#include "anneal/core/target.hpp"

namespace anneal {

/// Inner-sampler settings for the Monte Carlo convolutional score. Each of
/// `samples` independent ULA chains runs `iterations` steps; the first half
/// of every chain is discarded as burn-in.
template <typename Scalar>
struct McEstimatorConfig {
  std::size_t samples = 1000;
  std::size_t iterations = 400;
  Scalar step = Scalar(0.01);
};

template <typename Scalar>
void validate(const McEstimatorConfig<Scalar>& c) {
  if (c.samples < 1) throw InputError("MC score estimator: inner sample count must be at least 1");
  if (c.iterations < 1) throw InputError("MC score estimator: inner iterations must be at least 1");
  if (!(c.step > Scalar(0))) throw InputError("MC score estimator: inner step must be positive");
}

struct McDiagnostics {
  std::size_t inner_steps = 0;
  std::size_t score_queries = 0;
  std::size_t kept_samples = 0;
  double mean_gradient_norm = 0.0;
  double max_gradient_norm = 0.0;
};

template <typename Scalar>
struct McScore {
  VectorX<Scalar> score;
  McDiagnostics diagnostics;
};

/// Monte Carlo estimate of the convolutional-path score at x for
/// lambda = exp(-2 (T - t)):
///   (e^{-(T-t)} / (1 - e^{-2(T-t)})) * E_{y ~ m}[y - e^{T-t} x],
///   m(y | x) ∝ pi(y) N(y; e^{T-t} x, (e^{2(T-t)} - 1) I),
/// with m sampled by unadjusted Langevin chains started at e^{T-t} x.
template <typename Scalar>
McScore<Scalar> convolutional_mc_score(const TargetDensity<Scalar>& target,
                                       const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& x, Scalar t,
                                       Scalar horizon, const McEstimatorConfig<Scalar>& config,
                                       RandomStream& rng) {
  validate(config);
  detail::require_dim<Scalar>(target.dim(), x.size(), "convolutional_mc_score");
  if (!(t >= Scalar(0)) || !(t < horizon)) {
    throw InputError("convolutional_mc_score: need 0 <= t < T");
  }
  using std::exp;
  using std::sqrt;
  const Scalar gap = horizon - t;
  const Scalar inflate = exp(gap);
  const Scalar variance = std::expm1(Scalar(2) * gap);
  const Scalar prefactor = exp(-gap) / -std::expm1(Scalar(-2) * gap);
  const Scalar noise = sqrt(Scalar(2) * config.step);
  const std::size_t burn_in = config.iterations / 2;

  const Eigen::Index d = x.size();
  const VectorX<Scalar> center = inflate * x;
  VectorX<Scalar> y(d), grad(d), acc = VectorX<Scalar>::Zero(d);
  McDiagnostics diag;
  double norm_sum = 0.0;

  for (std::size_t chain = 0; chain < config.samples; ++chain) {
    y = center;
    for (std::size_t k = 1; k <= config.iterations; ++k) {
      target.score_into(y, grad);
      grad -= (y - center) / variance;
      const double gnorm = static_cast<double>(grad.norm());
      if (!std::isfinite(gnorm)) {
        throw NumericalError("convolutional_mc_score: non-finite inner-chain score at inner iteration " +
                                 std::to_string(k),
                             k);
      }
      norm_sum += gnorm;
      diag.max_gradient_norm = std::max(diag.max_gradient_norm, gnorm);
      y += config.step * grad;
      for (Eigen::Index j = 0; j < d; ++j) y[j] += noise * Scalar(rng.normal());
      if (k > burn_in) {
        acc += y - center;
        ++diag.kept_samples;
      }
    }
  }
  diag.inner_steps = config.samples * config.iterations;
  diag.score_queries = diag.inner_steps;
  diag.mean_gradient_norm = norm_sum / static_cast<double>(diag.inner_steps);
  return {prefactor * acc / Scalar(diag.kept_samples), diag};
}

}  // namespace anneal
