#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anneal/paths/cost_model.hpp"

namespace anneal {

struct DilationBudget {
  std::uint64_t particles = 1000;
  std::uint64_t iterations = 10000;
};

struct CostRow {
  std::string label;
  RecursiveCostModel model;  // dilation row: {n, K, 1}
  BigCount queries;
  double log10_queries = 0.0;
};

/// Recursive-estimator costs, plus the dilation sampler's K * n queries when a budget is given.
std::vector<CostRow> estimate_mc_cost(const std::vector<RecursiveCostModel>& models,
                                      const std::optional<DilationBudget>& dilation = std::nullopt);

/// {"models":[{"particles_per_window":..,"iterations_per_window":..,"windows":..}], "dilation":{..}}
std::vector<CostRow> estimate_mc_cost(const nlohmann::json& spec);

std::string to_csv(const std::vector<CostRow>& rows);

}  // namespace anneal
