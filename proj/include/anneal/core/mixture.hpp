#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "anneal/core/gaussian.hpp"

namespace anneal {

/// Weighted sum of Gaussians sharing one dimension. Weights are non-negative
/// and sum to one; zero-weight components are kept but never contribute.
template <typename Scalar>
class GaussianMixture {
 public:
  using Component = GaussianParams<Scalar>;

  GaussianMixture(std::vector<Scalar> weights, std::vector<Component> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) throw InputError("GaussianMixture: needs at least one component");
    if (weights_.size() != components_.size()) {
      throw InputError("GaussianMixture: " + std::to_string(weights_.size()) + " weights for " +
                       std::to_string(components_.size()) + " components");
    }
    const auto d = components_.front().dim();
    Scalar total = 0;
    for (std::size_t m = 0; m < components_.size(); ++m) {
      if (components_[m].dim() != d) throw InputError("GaussianMixture: components differ in dimension");
      if (!(weights_[m] >= Scalar(0)) || !std::isfinite(static_cast<double>(weights_[m]))) {
        throw InputError("GaussianMixture: weights must be finite and non-negative");
      }
      total += weights_[m];
    }
    using std::abs;
    if (abs(total - Scalar(1)) > Scalar(1e-12)) {
      throw InputError("GaussianMixture: weights must sum to 1");
    }
    packed_means_.resize(d, static_cast<Eigen::Index>(components_.size()));
    packed_precisions_.resize(d * d, static_cast<Eigen::Index>(components_.size()));
    for (std::size_t m = 0; m < components_.size(); ++m) {
      const auto col = static_cast<Eigen::Index>(m);
      packed_means_.col(col) = components_[m].mean();
      packed_precisions_.col(col) = components_[m].precision().reshaped();
    }
    log_constants_.resize(components_.size());
    for (std::size_t m = 0; m < components_.size(); ++m) {
      using std::log;
      log_constants_[m] = weights_[m] > Scalar(0)
                              ? log(weights_[m]) + components_[m].log_normalizer()
                              : -std::numeric_limits<Scalar>::infinity();
    }
  }

  Eigen::Index dim() const { return components_.front().dim(); }
  std::size_t size() const { return components_.size(); }
  const std::vector<Scalar>& weights() const { return weights_; }
  const std::vector<Component>& components() const { return components_; }
  const Component& component(std::size_t m) const { return components_[m]; }
  // log w_m + Gaussian normalizing constant of component m.
  Scalar log_constant(std::size_t m) const { return log_constants_[m]; }
  const std::vector<Scalar>& log_constants() const { return log_constants_; }
  // Column m holds mean m / the column-major precision of component m.
  const MatrixX<Scalar>& packed_means() const { return packed_means_; }
  const MatrixX<Scalar>& packed_precisions() const { return packed_precisions_; }

 private:
  MatrixX<Scalar> packed_means_;
  MatrixX<Scalar> packed_precisions_;
  std::vector<Scalar> weights_;
  std::vector<Component> components_;
  std::vector<Scalar> log_constants_;
};

using Mixture = GaussianMixture<double>;

namespace detail {

// Per-thread buffers for the allocation-free mixture kernels.
template <typename Scalar>
struct MixtureScratch {
  VectorX<Scalar> log_terms;
  MatrixX<Scalar> directions;  // column m: precision_m (mu_m - x)
  VectorX<Scalar> diff;
};

template <typename Scalar>
MixtureScratch<Scalar>& mixture_scratch(Eigen::Index d, std::size_t m) {
  thread_local MixtureScratch<Scalar> scratch;
  const auto mm = static_cast<Eigen::Index>(m);
  if (scratch.log_terms.size() != mm) scratch.log_terms.resize(mm);
  if (scratch.directions.rows() != d || scratch.directions.cols() != mm) scratch.directions.resize(d, mm);
  if (scratch.diff.size() != d) scratch.diff.resize(d);
  return scratch;
}

// Fills log(w_m N(x; mu_m, S_m)) and precision_m (mu_m - x) for every m and
// returns the largest log term. This is the innermost kernel of every sampler
// iteration, so small dimensions get compile-time loop bounds.
template <int D, typename Scalar, typename Derived>
Scalar mixture_terms_kernel(const GaussianMixture<Scalar>& gmm, const Eigen::MatrixBase<Derived>& x,
                            MixtureScratch<Scalar>& s) {
  const Eigen::Index d = D > 0 ? D : gmm.dim();
  const auto count = static_cast<Eigen::Index>(gmm.size());
  const Scalar* mu = gmm.packed_means().data();
  const Scalar* prec = gmm.packed_precisions().data();
  const Scalar* logc = gmm.log_constants().data();
  Scalar* dir = s.directions.data();
  Scalar* diff = s.diff.data();
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index m = 0; m < count; ++m, mu += d, prec += d * d, dir += d) {
    for (Eigen::Index j = 0; j < d; ++j) diff[j] = mu[j] - x.coeff(j);
    Scalar quad = 0;
    for (Eigen::Index r = 0; r < d; ++r) {
      Scalar acc = 0;
      for (Eigen::Index k = 0; k < d; ++k) acc += prec[r + k * d] * diff[k];
      dir[r] = acc;
      quad += diff[r] * acc;
    }
    const Scalar term = logc[m] - Scalar(0.5) * quad;
    s.log_terms[m] = term;
    if (term > best) best = term;
  }
  return best;
}

template <typename Scalar, typename Derived>
Scalar mixture_terms(const GaussianMixture<Scalar>& gmm, const Eigen::MatrixBase<Derived>& x,
                     MixtureScratch<Scalar>& s) {
  switch (gmm.dim()) {
    case 1: return mixture_terms_kernel<1>(gmm, x, s);
    case 2: return mixture_terms_kernel<2>(gmm, x, s);
    case 3: return mixture_terms_kernel<3>(gmm, x, s);
    default: return mixture_terms_kernel<0>(gmm, x, s);
  }
}

// exp(term - best), flushing terms far below the maximum to exactly zero.
template <typename Scalar>
Scalar relative_weight(Scalar term, Scalar best) {
  using std::exp;
  const Scalar rel = term - best;
  return rel < Scalar(-745) ? Scalar(0) : exp(rel);
}

}  // namespace detail

/// log sum_m w_m N(x; mu_m, S_m), evaluated with log-sum-exp.
template <typename Scalar, typename Derived>
Scalar gmm_log_density(const GaussianMixture<Scalar>& gmm, const Eigen::MatrixBase<Derived>& x) {
  detail::require_dim<Scalar>(gmm.dim(), x.size(), "gmm_log_density");
  auto& s = detail::mixture_scratch<Scalar>(gmm.dim(), gmm.size());
  const Scalar best = detail::mixture_terms(gmm, x, s);
  using std::exp;
  using std::log;
  Scalar acc = 0;
  for (Eigen::Index m = 0; m < s.log_terms.size(); ++m) acc += detail::relative_weight(s.log_terms[m], best);
  return best + log(acc);
}

/// Posterior component probabilities r_m(x).
template <typename Scalar, typename Derived>
VectorX<Scalar> gmm_responsibilities(const GaussianMixture<Scalar>& gmm,
                                     const Eigen::MatrixBase<Derived>& x) {
  detail::require_dim<Scalar>(gmm.dim(), x.size(), "gmm_responsibilities");
  auto& s = detail::mixture_scratch<Scalar>(gmm.dim(), gmm.size());
  const Scalar best = detail::mixture_terms(gmm, x, s);
  VectorX<Scalar> r = (s.log_terms.array() - best).exp().matrix();
  return r / r.sum();
}

/// Writes sum_m r_m(x) S_m^{-1} (mu_m - x) into `out` without allocating.
template <typename Scalar, typename Derived, typename OutDerived>
void gmm_score_into(const GaussianMixture<Scalar>& gmm, const Eigen::MatrixBase<Derived>& x,
                    const Eigen::MatrixBase<OutDerived>& out_) {
  detail::require_dim<Scalar>(gmm.dim(), x.size(), "gmm_score");
  auto& out = const_cast<Eigen::MatrixBase<OutDerived>&>(out_);
  auto& s = detail::mixture_scratch<Scalar>(gmm.dim(), gmm.size());
  const Scalar best = detail::mixture_terms(gmm, x, s);
  const Eigen::Index d = gmm.dim();
  Scalar total = 0;
  for (Eigen::Index j = 0; j < d; ++j) out.coeffRef(j) = Scalar(0);
  for (Eigen::Index m = 0; m < s.log_terms.size(); ++m) {
    const Scalar r = detail::relative_weight(s.log_terms[m], best);
    if (r == Scalar(0)) continue;
    total += r;
    const Scalar* dir = s.directions.col(m).data();
    for (Eigen::Index j = 0; j < d; ++j) out.coeffRef(j) += r * dir[j];
  }
  for (Eigen::Index j = 0; j < d; ++j) out.coeffRef(j) /= total;
}

template <typename Scalar, typename Derived>
VectorX<Scalar> gmm_score(const GaussianMixture<Scalar>& gmm, const Eigen::MatrixBase<Derived>& x) {
  VectorX<Scalar> out(gmm.dim());
  gmm_score_into(gmm, x, out);
  return out;
}

/// n i.i.d. draws, one per row: categorical component, then mean + L eps.
template <typename Scalar>
PointsX<Scalar> gmm_sample(const GaussianMixture<Scalar>& gmm, std::size_t n, RandomStream& rng) {
  if (n < 1) throw InputError("gmm_sample: n must be at least 1");
  std::vector<double> w(gmm.weights().begin(), gmm.weights().end());
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  PointsX<Scalar> out(static_cast<Eigen::Index>(n), gmm.dim());
  VectorX<Scalar> eps(gmm.dim());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto& c = gmm.component(pick(rng.engine()));
    for (Eigen::Index j = 0; j < eps.size(); ++j) eps[j] = Scalar(rng.normal());
    out.row(i) = (c.mean() + c.cholesky_lower() * eps).transpose();
  }
  return out;
}

template <typename Scalar>
VectorX<Scalar> gmm_mean(const GaussianMixture<Scalar>& gmm) {
  VectorX<Scalar> mean = VectorX<Scalar>::Zero(gmm.dim());
  for (std::size_t m = 0; m < gmm.size(); ++m) mean += gmm.weights()[m] * gmm.component(m).mean();
  return mean;
}

template <typename Scalar>
MatrixX<Scalar> gmm_covariance(const GaussianMixture<Scalar>& gmm) {
  const VectorX<Scalar> mean = gmm_mean(gmm);
  MatrixX<Scalar> cov = MatrixX<Scalar>::Zero(gmm.dim(), gmm.dim());
  for (std::size_t m = 0; m < gmm.size(); ++m) {
    const VectorX<Scalar> dm = gmm.component(m).mean() - mean;
    cov += gmm.weights()[m] * (gmm.component(m).covariance() + dm * dm.transpose());
  }
  return cov;
}

/// Law of factor * X for X ~ gmm.
template <typename Scalar>
GaussianMixture<Scalar> gmm_scale(const GaussianMixture<Scalar>& gmm, Scalar factor) {
  std::vector<GaussianParams<Scalar>> comps;
  comps.reserve(gmm.size());
  for (const auto& c : gmm.components()) comps.push_back(gaussian_scale(c, factor));
  return GaussianMixture<Scalar>(gmm.weights(), std::move(comps));
}

}  // namespace anneal
