#include <cmath>

#include "anneal/metrics/metrics.hpp"
#include "detail.hpp"

namespace anneal {

void validate(const MetricConfig& cfg) {
  if (!(cfg.ksd.beta >= 0.0 && cfg.ksd.beta <= 1.0)) throw InputError("KSD beta must lie in [0,1]");
  if (!(cfg.mmd.bandwidth > 0.0)) throw InputError("MMD bandwidth must be positive");
  if (cfg.kl.k < 1) throw InputError("k-NN KL needs k >= 1");
  if (!(cfg.ot.epsilon > 0.0)) throw InputError("Sinkhorn epsilon must be positive");
  if (cfg.ot.max_iterations < 1) throw InputError("Sinkhorn needs at least one iteration");
  if (!(cfg.ot.tolerance > 0.0)) throw InputError("Sinkhorn tolerance must be positive");
  if (cfg.jobs < 1) throw InputError("jobs must be at least 1");
}

double ksd_squared(const Points& cloud, const Points& scores, const MetricConfig& cfg) {
  const Eigen::Index n = cloud.rows();
  const Eigen::Index d = cloud.cols();
  if (n < 1) throw InputError("ksd: empty cloud");
  if (scores.rows() != n || scores.cols() != d) throw InputError("ksd: scores must match the cloud");
  const double beta = cfg.ksd.beta;
  const bool root = beta == 0.5;

  Eigen::VectorXd rows(n);
#pragma omp parallel for schedule(static) num_threads(cfg.jobs) if (cfg.jobs > 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double r2 = 0.0, sxsy = 0.0, drift = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        const double r = cloud(i, c) - cloud(j, c);
        r2 += r * r;
        sxsy += scores(i, c) * scores(j, c);
        drift += (scores(i, c) - scores(j, c)) * r;
      }
      const double q = 1.0 + r2;
      const double base = root ? 1.0 / std::sqrt(q) : std::pow(q, -beta);
      const double base1 = base / q;   // q^{-beta-1}
      const double base2 = base1 / q;  // q^{-beta-2}
      // s_x.s_y K + s_x.grad_y K + grad_x K.s_y + tr(grad_x grad_y K)
      acc += sxsy * base + 2.0 * beta * base1 * drift + 2.0 * beta * static_cast<double>(d) * base1 -
             4.0 * beta * (beta + 1.0) * r2 * base2;
    }
    rows[i] = acc;
  }
  return detail::ordered_sum(rows) / (static_cast<double>(n) * static_cast<double>(n));
}

double ksd(const Points& cloud, const Points& scores, const MetricConfig& cfg) {
  return std::sqrt(std::max(0.0, ksd_squared(cloud, scores, cfg)));
}

double ksd(const Points& cloud, const Target& target, const MetricConfig& cfg) {
  if (cloud.cols() != target.dim()) throw InputError("ksd: cloud dimension does not match target");
  Points scores(cloud.rows(), cloud.cols());
#pragma omp parallel for schedule(static) num_threads(cfg.jobs) if (cfg.jobs > 1)
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    target.score_into(cloud.row(i).transpose(), scores.row(i).transpose());
  }
  return ksd(cloud, scores, cfg);
}

}  // namespace anneal
