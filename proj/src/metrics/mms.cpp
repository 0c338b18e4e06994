#include <cmath>
#include <limits>

#include "anneal/metrics/metrics.hpp"

namespace anneal {

std::vector<std::size_t> mode_counts(const Points& cloud, const Mixture& gmm) {
  if (cloud.cols() != gmm.dim()) throw InputError("mode_counts: dimension mismatch");
  std::vector<std::size_t> counts(gmm.size(), 0);
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < gmm.size(); ++m) {
      const double dist = (cloud.row(i).transpose() - gmm.component(m).mean()).squaredNorm();
      if (dist < best) {
        best = dist;
        arg = m;
      }
    }
    ++counts[arg];
  }
  return counts;
}

double mms(const Points& cloud, const Mixture& gmm) {
  const auto counts = mode_counts(cloud, gmm);
  const double n = static_cast<double>(cloud.rows());
  double acc = 0.0;
  for (std::size_t m = 0; m < counts.size(); ++m) {
    const double gap = static_cast<double>(counts[m]) - gmm.weights()[m] * n;
    acc += gap * gap;
  }
  return std::sqrt(acc / static_cast<double>(counts.size()));
}

std::size_t occupied_modes(const Points& cloud, const Mixture& gmm, double radius) {
  if (cloud.cols() != gmm.dim()) throw InputError("occupied_modes: dimension mismatch");
  const double r2 = radius * radius;
  std::size_t occupied = 0;
  for (const auto& c : gmm.components()) {
    for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
      const Vector diff = cloud.row(i).transpose() - c.mean();
      if (diff.dot(c.precision() * diff) <= r2) {
        ++occupied;
        break;
      }
    }
  }
  return occupied;
}

}  // namespace anneal
