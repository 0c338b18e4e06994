#pragma once

#include <memory>

#include "anneal/core/mixture.hpp"

namespace anneal {

/// What a sampler may ask of a target: an unnormalized log-density and its
/// gradient. Exact sampling is optional and only used by evaluation code.
template <typename Scalar>
class TargetDensity {
 public:
  using Vector = VectorX<Scalar>;

  virtual ~TargetDensity() = default;

  virtual Eigen::Index dim() const = 0;
  virtual Scalar log_density(const Eigen::Ref<const Vector>& x) const = 0;
  virtual void score_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const = 0;

  Vector score(const Eigen::Ref<const Vector>& x) const {
    Vector out(dim());
    score_into(x, out);
    return out;
  }

  // Non-null when the target is a Gaussian mixture (closed-form paths, exact draws).
  virtual const GaussianMixture<Scalar>* mixture() const { return nullptr; }
};

template <typename Scalar>
class MixtureTarget final : public TargetDensity<Scalar> {
 public:
  using Vector = VectorX<Scalar>;

  explicit MixtureTarget(GaussianMixture<Scalar> gmm) : gmm_(std::move(gmm)) {}

  Eigen::Index dim() const override { return gmm_.dim(); }
  Scalar log_density(const Eigen::Ref<const Vector>& x) const override {
    return gmm_log_density(gmm_, x);
  }
  void score_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override {
    gmm_score_into(gmm_, x, out);
  }
  const GaussianMixture<Scalar>* mixture() const override { return &gmm_; }

 private:
  GaussianMixture<Scalar> gmm_;
};

using Target = TargetDensity<double>;

template <typename Scalar>
std::shared_ptr<const TargetDensity<Scalar>> make_mixture_target(GaussianMixture<Scalar> gmm) {
  return std::make_shared<const MixtureTarget<Scalar>>(std::move(gmm));
}

}  // namespace anneal
