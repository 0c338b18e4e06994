#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace anneal::detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Serial, index-ordered reduction of per-row partial sums so the total does
// not depend on how rows were split across threads.
inline double ordered_sum(const Eigen::VectorXd& parts) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < parts.size(); ++i) s.add(parts[i]);
  return s.value();
}

}  // namespace anneal::detail
