#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "anneal/core/errors.hpp"
#include "anneal/core/random.hpp"

namespace anneal {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
// Sample sets are stored one point per row.
template <typename Scalar>
using PointsX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using Points = PointsX<double>;

namespace detail {

template <typename Scalar>
void require_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " +
                     std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace detail

/// Multivariate normal N(mean, covariance). The covariance must be symmetric
/// positive definite; its Cholesky factor, inverse and log-determinant are
/// computed once at construction.
template <typename Scalar>
class GaussianParams {
 public:
  using Vector = VectorX<Scalar>;
  using Matrix = MatrixX<Scalar>;

  GaussianParams(Vector mean, Matrix covariance)
      : mean_(std::move(mean)), covariance_(std::move(covariance)) {
    const auto d = mean_.size();
    if (d < 1) throw InputError("GaussianParams: empty mean");
    if (covariance_.rows() != d || covariance_.cols() != d) {
      throw InputError("GaussianParams: covariance must be " + std::to_string(d) + "x" +
                       std::to_string(d));
    }
    if (!mean_.allFinite() || !covariance_.allFinite()) {
      throw InputError("GaussianParams: non-finite parameters");
    }
    const Scalar scale = Scalar(1) + covariance_.cwiseAbs().maxCoeff();
    if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
      throw InputError("GaussianParams: covariance is not symmetric");
    }
    covariance_ = (covariance_ + covariance_.transpose()) / Scalar(2);
    llt_.compute(covariance_);
    if (llt_.info() != Eigen::Success) {
      throw InputError("GaussianParams: covariance is not positive definite");
    }
    lower_ = llt_.matrixL();
    if ((lower_.diagonal().array() <= Scalar(0)).any()) {
      throw InputError("GaussianParams: covariance is not positive definite");
    }
    precision_ = llt_.solve(Matrix::Identity(d, d));
    log_det_ = Scalar(2) * lower_.diagonal().array().log().sum();
  }

  static GaussianParams standard(Eigen::Index d) {
    return GaussianParams(Vector::Zero(d), Matrix::Identity(d, d));
  }
  static GaussianParams isotropic(Vector mean, Scalar variance) {
    const auto d = mean.size();
    return GaussianParams(std::move(mean), Matrix::Identity(d, d) * variance);
  }

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& precision() const { return precision_; }
  const Matrix& cholesky_lower() const { return lower_; }
  Scalar log_det() const { return log_det_; }

  // -0.5 * (d log 2pi + log det), the constant part of the log-density.
  Scalar log_normalizer() const {
    using std::log;
    return Scalar(-0.5) * (Scalar(dim()) * log(Scalar(2) * std::numbers::pi_v<Scalar>) + log_det_);
  }

 private:
  Vector mean_;
  Matrix covariance_;
  Eigen::LLT<Matrix> llt_;
  Matrix lower_;
  Matrix precision_;
  Scalar log_det_{};
};

using Gaussian = GaussianParams<double>;

template <typename Scalar, typename Derived>
Scalar log_density(const GaussianParams<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
  detail::require_dim<Scalar>(g.dim(), x.size(), "log_density");
  VectorX<Scalar> z = x - g.mean();
  g.cholesky_lower().template triangularView<Eigen::Lower>().solveInPlace(z);
  return g.log_normalizer() - Scalar(0.5) * z.squaredNorm();
}

/// Gradient of log N(x; mean, cov): -cov^{-1}(x - mean).
template <typename Scalar, typename Derived>
VectorX<Scalar> score(const GaussianParams<Scalar>& g, const Eigen::MatrixBase<Derived>& x) {
  detail::require_dim<Scalar>(g.dim(), x.size(), "score");
  return g.precision() * (g.mean() - x);
}

/// Gradient of the density itself (not its log).
template <typename Scalar, typename Derived>
VectorX<Scalar> density_gradient(const GaussianParams<Scalar>& g,
                                 const Eigen::MatrixBase<Derived>& x) {
  using std::exp;
  return score(g, x) * exp(log_density(g, x));
}

template <typename Scalar>
struct GaussianProduct {
  GaussianParams<Scalar> gaussian;
  // N(x; a) N(x; b) = exp(log_normalizer) * N(x; gaussian)
  Scalar log_normalizer;
};

/// Pointwise product of two Gaussian densities, in precision-weighted form:
/// cov = A (A+B)^{-1} B, mean = B (A+B)^{-1} mu_a + A (A+B)^{-1} mu_b,
/// with normalizer N(mu_a; mu_b, A+B).
template <typename Scalar>
GaussianProduct<Scalar> gaussian_product(const GaussianParams<Scalar>& a,
                                         const GaussianParams<Scalar>& b) {
  detail::require_dim<Scalar>(a.dim(), b.dim(), "gaussian_product");
  using Matrix = MatrixX<Scalar>;
  const Matrix sum = a.covariance() + b.covariance();
  const Eigen::LLT<Matrix> sum_llt(sum);
  const Matrix cov = a.covariance() * sum_llt.solve(b.covariance());
  const VectorX<Scalar> mean = b.covariance() * sum_llt.solve(a.mean()) +
                               a.covariance() * sum_llt.solve(b.mean());
  const GaussianParams<Scalar> marginal(b.mean(), sum);
  return {GaussianParams<Scalar>(mean, (cov + cov.transpose()) / Scalar(2)),
          log_density(marginal, a.mean())};
}

/// Density of the sum of independent draws: N(mu_a + mu_b, A + B).
template <typename Scalar>
GaussianParams<Scalar> gaussian_convolve(const GaussianParams<Scalar>& a,
                                         const GaussianParams<Scalar>& b) {
  detail::require_dim<Scalar>(a.dim(), b.dim(), "gaussian_convolve");
  return GaussianParams<Scalar>(a.mean() + b.mean(), a.covariance() + b.covariance());
}

// N(x - shift; mu, S) = N(x; mu + shift, S)
template <typename Scalar>
GaussianParams<Scalar> gaussian_shift(const GaussianParams<Scalar>& g,
                                      const VectorX<Scalar>& shift) {
  detail::require_dim<Scalar>(g.dim(), shift.size(), "gaussian_shift");
  return GaussianParams<Scalar>(g.mean() + shift, g.covariance());
}

// Law of a*X for X ~ g: N(a mu, a^2 S). Density identity N(x/a; mu, S) = |a|^d N(x; a mu, a^2 S).
template <typename Scalar>
GaussianParams<Scalar> gaussian_scale(const GaussianParams<Scalar>& g, Scalar factor) {
  if (factor == Scalar(0)) throw InputError("gaussian_scale: zero factor");
  return GaussianParams<Scalar>(g.mean() * factor, g.covariance() * (factor * factor));
}

template <typename Scalar>
VectorX<Scalar> gaussian_draw(const GaussianParams<Scalar>& g, RandomStream& rng) {
  VectorX<Scalar> eps(g.dim());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = Scalar(rng.normal());
  return g.mean() + g.cholesky_lower() * eps;
}

}  // namespace anneal
