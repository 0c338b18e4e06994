#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace anneal {

using BigCount = boost::multiprecision::cpp_int;

/// Windowed recursive score estimator: N_p inner particles, N_i inner ULA
/// iterations, nested over N_s windows.
struct RecursiveCostModel {
  std::uint64_t particles_per_window = 1;
  std::uint64_t iterations_per_window = 1;
  std::uint64_t windows = 1;
};

/// Number of final-target score queries, (N_p * N_i)^{N_s}, exactly.
BigCount recursive_cost(const RecursiveCostModel& model);

}  // namespace anneal
