#include <cmath>

#include "anneal/metrics/metrics.hpp"
#include "detail.hpp"

namespace anneal {

namespace {

// Sum over pairs of exp(-|a_i - b_j|^2 / (2h)); skips i == j when `skip_diagonal`.
double kernel_sum(const Points& a, const Points& b, double bandwidth, bool skip_diagonal, int jobs) {
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();
  const double scale = -0.5 / bandwidth;
  Eigen::VectorXd rows(n);
#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      if (skip_diagonal && i == j) continue;
      double r2 = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        const double r = a(i, c) - b(j, c);
        r2 += r * r;
      }
      acc += std::exp(scale * r2);
    }
    rows[i] = acc;
  }
  return detail::ordered_sum(rows);
}

}  // namespace

double mmd(const Points& cloud, const Points& reference, const MetricConfig& cfg) {
  const auto n = cloud.rows();
  const auto m = reference.rows();
  if (n < 2 || m < 2) throw InputError("mmd: both sets need at least two points");
  if (cloud.cols() != reference.cols()) throw InputError("mmd: dimension mismatch");
  const double h = cfg.mmd.bandwidth;
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  const double within_cloud = kernel_sum(cloud, cloud, h, true, cfg.jobs) / (nn * (nn - 1.0));
  const double within_ref = kernel_sum(reference, reference, h, true, cfg.jobs) / (mm * (mm - 1.0));
  const double cross = kernel_sum(cloud, reference, h, false, cfg.jobs) / (nn * mm);
  return std::sqrt(std::max(0.0, within_cloud + within_ref - 2.0 * cross));
}

}  // namespace anneal
