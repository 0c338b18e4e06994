#include "anneal/paths/cost_model.hpp"

#include "anneal/core/errors.hpp"

namespace anneal {

BigCount recursive_cost(const RecursiveCostModel& model) {
  if (model.particles_per_window < 1 || model.iterations_per_window < 1 || model.windows < 1) {
    throw InputError("recursive_cost: all counts must be at least 1");
  }
  const BigCount per_window = BigCount(model.particles_per_window) * model.iterations_per_window;
  BigCount total = 1;
  for (std::uint64_t s = 0; s < model.windows; ++s) total *= per_window;
  return total;
}

}  // namespace anneal
