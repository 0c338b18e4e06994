#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "anneal/metrics/metrics.hpp"
#include "detail.hpp"

namespace anneal {

namespace {

struct OneWay {
  double value = 0.0;
  std::size_t excluded = 0;
};

// Squared distance from row i of `a` to its k-th nearest row of `b`,
// skipping b's row i when the sets are the same.
double kth_sq_distance(const Points& a, Eigen::Index i, const Points& b, std::size_t k, bool same,
                       std::vector<double>& best) {
  best.assign(k, std::numeric_limits<double>::infinity());
  const Eigen::Index d = a.cols();
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    if (same && j == i) continue;
    double r2 = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double r = a(i, c) - b(j, c);
      r2 += r * r;
    }
    if (r2 < best.back()) {
      auto pos = std::upper_bound(best.begin(), best.end(), r2);
      std::copy_backward(pos, best.end() - 1, best.end());
      *pos = r2;
    }
  }
  return best.back();
}

OneWay one_way(const Points& p, const Points& q, std::size_t k, int jobs) {
  const Eigen::Index n = p.rows();
  const double d = static_cast<double>(p.cols());
  Eigen::VectorXd terms(n);
  std::vector<unsigned char> keep(static_cast<std::size_t>(n), 0);
#pragma omp parallel num_threads(jobs) if (jobs > 1)
  {
    std::vector<double> best;
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r2 = kth_sq_distance(p, i, p, k, true, best);
      const double s2 = kth_sq_distance(p, i, q, k, false, best);
      const bool ok = r2 > 0.0 && s2 > 0.0;
      keep[static_cast<std::size_t>(i)] = ok ? 1 : 0;
      // log(s/r) = 0.5 log(s^2 / r^2)
      terms[i] = ok ? 0.5 * (std::log(s2) - std::log(r2)) : 0.0;
    }
  }
  OneWay out;
  const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 1));
  out.excluded = static_cast<std::size_t>(n) - kept;
  if (kept == 0) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.value = d * detail::ordered_sum(terms) / static_cast<double>(kept) +
              std::log(static_cast<double>(q.rows()) / static_cast<double>(n - 1));
  return out;
}

}  // namespace

KlEstimate knn_kl(const Points& cloud, const Points& reference, const MetricConfig& cfg) {
  const std::size_t k = cfg.kl.k;
  if (k < 1) throw InputError("knn_kl: k must be at least 1");
  if (cloud.cols() != reference.cols()) throw InputError("knn_kl: dimension mismatch");
  if (static_cast<std::size_t>(cloud.rows()) <= k || static_cast<std::size_t>(reference.rows()) <= k) {
    throw InputError("knn_kl: both sets need more than k points");
  }
  const auto fwd = one_way(cloud, reference, k, cfg.jobs);
  const auto rev = one_way(reference, cloud, k, cfg.jobs);
  return {fwd.value, rev.value, fwd.excluded, rev.excluded};
}

}  // namespace anneal
