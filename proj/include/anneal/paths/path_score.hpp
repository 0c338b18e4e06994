#pragma once

#include <type_traits>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "anneal/core/target.hpp"
#include "anneal/paths/mc_score.hpp"

namespace anneal {

namespace detail {

template <typename Scalar>
void require_lambda(Scalar lambda, bool allow_zero, const char* what) {
  const bool ok = allow_zero ? (lambda >= Scalar(0) && lambda <= Scalar(1))
                             : (lambda > Scalar(0) && lambda <= Scalar(1));
  if (!ok) {
    throw InputError(std::string(what) + ": lambda must lie in " + (allow_zero ? "[0,1]" : "(0,1]") +
                     ", got " + std::to_string(static_cast<double>(lambda)));
  }
}

template <typename Scalar>
VectorX<Scalar>& path_scratch(Eigen::Index d) {
  thread_local VectorX<Scalar> buffer;
  if (buffer.size() != d) buffer.resize(d);
  return buffer;
}

}  // namespace detail

/// Score of the dilated target mu(x) = pi(x / sqrt(lambda)) / sqrt(lambda):
/// (1/sqrt(lambda)) * score_pi(x / sqrt(lambda)).
template <typename Scalar, typename OutDerived>
void dilation_score_into(const TargetDensity<Scalar>& target,
                         const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& x, Scalar lambda,
                         const Eigen::MatrixBase<OutDerived>& out_) {
  detail::require_lambda(lambda, false, "dilation_score");
  detail::require_dim<Scalar>(target.dim(), x.size(), "dilation_score");
  auto& out = const_cast<Eigen::MatrixBase<OutDerived>&>(out_);
  using std::sqrt;
  const Scalar inv_root = Scalar(1) / sqrt(lambda);
  auto& scaled = detail::path_scratch<Scalar>(x.size());
  scaled.noalias() = x * inv_root;
  target.score_into(scaled, out.derived());
  out *= inv_root;
}

template <typename Scalar>
VectorX<Scalar> dilation_score(const TargetDensity<Scalar>& target,
                               const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& x, Scalar lambda) {
  VectorX<Scalar> out(target.dim());
  dilation_score_into(target, x, lambda, out);
  return out;
}

/// Score of the geometric path nu^{1-lambda} pi^{lambda}.
template <typename Scalar, typename OutDerived>
void geometric_score_into(const TargetDensity<Scalar>& target, const GaussianParams<Scalar>& proposal,
                          const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& x, Scalar lambda,
                          const Eigen::MatrixBase<OutDerived>& out_) {
  detail::require_lambda(lambda, true, "geometric_score");
  detail::require_dim<Scalar>(target.dim(), x.size(), "geometric_score");
  detail::require_dim<Scalar>(proposal.dim(), x.size(), "geometric_score");
  auto& out = const_cast<Eigen::MatrixBase<OutDerived>&>(out_);
  target.score_into(x, out.derived());
  out *= lambda;
  out.noalias() += (Scalar(1) - lambda) * (proposal.precision() * (proposal.mean() - x));
}

template <typename Scalar>
VectorX<Scalar> geometric_score(const TargetDensity<Scalar>& target,
                                const GaussianParams<Scalar>& proposal,
                                const Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>& x, Scalar lambda) {
  VectorX<Scalar> out(target.dim());
  geometric_score_into(target, proposal, x, lambda, out);
  return out;
}

/// Convolutional path between N(0, S0) and a Gaussian mixture, which stays a
/// mixture: weights w_m, means sqrt(lambda) mu_m, covariances
/// (1 - lambda) S0 + lambda S_m.
template <typename Scalar>
GaussianMixture<Scalar> convolutional_gmm_path(const GaussianMixture<Scalar>& gmm,
                                               const GaussianParams<Scalar>& proposal, Scalar lambda) {
  detail::require_lambda(lambda, true, "convolutional_gmm_path");
  detail::require_dim<Scalar>(gmm.dim(), proposal.dim(), "convolutional_gmm_path");
  if (!proposal.mean().isZero(Scalar(0))) {
    throw InputError("convolutional_gmm_path: proposal mean must be zero");
  }
  using std::sqrt;
  const Scalar root = sqrt(lambda);
  std::vector<GaussianParams<Scalar>> comps;
  comps.reserve(gmm.size());
  for (const auto& c : gmm.components()) {
    comps.emplace_back(c.mean() * root,
                       (Scalar(1) - lambda) * proposal.covariance() + lambda * c.covariance());
  }
  return GaussianMixture<Scalar>(gmm.weights(), std::move(comps));
}

enum class PathKind { none, dilation, geometric, convolutional_exact, convolutional_mc };

inline const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::none: return "none";
    case PathKind::dilation: return "dilation";
    case PathKind::geometric: return "geometric";
    case PathKind::convolutional_exact: return "convolutional_exact";
    case PathKind::convolutional_mc: return "convolutional_mc";
  }
  return "?";
}

/// A path of distributions from a proposal to `target`, evaluated level by
/// level. `none` is the target itself at every level (plain ULA).
template <typename Scalar>
class PathScore {
 public:
  using Vector = VectorX<Scalar>;
  using TargetPtr = std::shared_ptr<const TargetDensity<Scalar>>;

  static PathScore none(TargetPtr target) { return PathScore(PathKind::none, std::move(target)); }

  static PathScore dilation(TargetPtr target) {
    return PathScore(PathKind::dilation, std::move(target));
  }

  static PathScore geometric(TargetPtr target, GaussianParams<Scalar> proposal) {
    PathScore p(PathKind::geometric, std::move(target));
    detail::require_dim<Scalar>(p.target_->dim(), proposal.dim(), "geometric path proposal");
    p.proposal_ = std::move(proposal);
    return p;
  }

  static PathScore convolutional_exact(TargetPtr target, GaussianParams<Scalar> proposal) {
    PathScore p(PathKind::convolutional_exact, std::move(target));
    if (p.target_->mixture() == nullptr) {
      throw InputError("convolutional_exact path needs a Gaussian mixture target");
    }
    detail::require_dim<Scalar>(p.target_->dim(), proposal.dim(), "convolutional path proposal");
    if (!proposal.mean().isZero(Scalar(0))) {
      throw InputError("convolutional_exact path: proposal mean must be zero");
    }
    p.proposal_ = std::move(proposal);
    return p;
  }

  // Uses the exponential-schedule parametrization lambda = exp(-2 (T - t)).
  static PathScore convolutional_mc(TargetPtr target, Scalar horizon, McEstimatorConfig<Scalar> config) {
    PathScore p(PathKind::convolutional_mc, std::move(target));
    if (!(horizon > Scalar(0))) throw InputError("convolutional_mc path needs a positive horizon");
    validate(config);
    p.horizon_ = horizon;
    p.mc_ = config;
    p.proposal_ = GaussianParams<Scalar>::standard(p.target_->dim());
    return p;
  }

  PathKind kind() const { return kind_; }
  const TargetDensity<Scalar>& target() const { return *target_; }
  const TargetPtr& target_ptr() const { return target_; }
  const std::optional<GaussianParams<Scalar>>& proposal() const { return proposal_; }
  Scalar horizon() const { return horizon_; }
  const McEstimatorConfig<Scalar>& mc_config() const { return mc_; }

  /// Score evaluator frozen at one level; built once per sampler iteration.
  class Level {
   public:
    // Writes the path score at x and returns the number of target-score queries spent.
    template <typename OutDerived>
    std::size_t score_into(const Eigen::Ref<const Vector>& x, const Eigen::MatrixBase<OutDerived>& out,
                           RandomStream& rng) const {
      switch (path_->kind_) {
        case PathKind::none:
          path_->target_->score_into(x, const_cast<Eigen::MatrixBase<OutDerived>&>(out).derived());
          return 1;
        case PathKind::dilation:
          dilation_score_into(*path_->target_, x, lambda_, out);
          return 1;
        case PathKind::geometric:
          geometric_score_into(*path_->target_, *path_->proposal_, x, lambda_, out);
          return 1;
        case PathKind::convolutional_exact:
          gmm_score_into(*blended_, x, out);
          return 1;
        case PathKind::convolutional_mc: {
          if (time_ >= path_->horizon_) {
            path_->target_->score_into(x, const_cast<Eigen::MatrixBase<OutDerived>&>(out).derived());
            return 1;
          }
          auto result = convolutional_mc_score(*path_->target_, x, time_, path_->horizon_, path_->mc_, rng);
          const_cast<Eigen::MatrixBase<OutDerived>&>(out) = result.score;
          return result.diagnostics.score_queries;
        }
      }
      return 0;
    }

    Scalar lambda() const { return lambda_; }

   private:
    friend class PathScore;
    const PathScore* path_ = nullptr;
    Scalar lambda_ = 1;
    Scalar time_ = 0;
    std::shared_ptr<const GaussianMixture<Scalar>> blended_;
  };

  /// Level at annealing value `lambda` (schedule time `t` is used by the MC path).
  Level at(Scalar lambda, Scalar t = 0) const {
    Level level;
    level.path_ = this;
    level.lambda_ = kind_ == PathKind::none ? Scalar(1) : lambda;
    level.time_ = t;
    switch (kind_) {
      case PathKind::none:
        break;
      case PathKind::dilation:
        detail::require_lambda(lambda, false, "dilation path");
        break;
      case PathKind::geometric:
        detail::require_lambda(lambda, true, "geometric path");
        break;
      case PathKind::convolutional_exact:
        level.blended_ = std::make_shared<const GaussianMixture<Scalar>>(
            convolutional_gmm_path(*target_->mixture(), *proposal_, lambda));
        break;
      case PathKind::convolutional_mc:
        if (!(t >= Scalar(0))) throw InputError("convolutional_mc path: time must be non-negative");
        break;
    }
    return level;
  }

 private:
  PathScore(PathKind kind, TargetPtr target) : kind_(kind), target_(std::move(target)) {
    if (!target_) throw InputError("path needs a target");
  }

  PathKind kind_;
  TargetPtr target_;
  std::optional<GaussianParams<Scalar>> proposal_;
  Scalar horizon_ = 0;
  McEstimatorConfig<Scalar> mc_{};
};

/// Stochastic-interpolant draws sqrt(1 - lambda) x_nu + sqrt(lambda) x_pi.
template <typename Scalar>
PointsX<Scalar> sample_interpolant(const GaussianMixture<Scalar>& gmm,
                                   const GaussianParams<Scalar>& proposal, Scalar lambda, std::size_t n,
                                   RandomStream& rng) {
  detail::require_lambda(lambda, true, "sample_interpolant");
  detail::require_dim<Scalar>(gmm.dim(), proposal.dim(), "sample_interpolant");
  using std::sqrt;
  PointsX<Scalar> out = gmm_sample(gmm, n, rng) * sqrt(lambda);
  const Scalar w = sqrt(Scalar(1) - lambda);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) += w * gaussian_draw(proposal, rng).transpose();
  }
  return out;
}

}  // namespace anneal
