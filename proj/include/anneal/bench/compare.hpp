#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anneal/metrics/report.hpp"

namespace anneal {

/// Runs side by side on a shared checkpoint grid: one column group per run,
/// then a difference column for every pair of runs and shared metric.
struct Comparison {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary;  // final-checkpoint values and pairwise differences
};

Comparison compare_runs(const std::vector<DiagnosticsReport>& reports);
std::string to_csv(const Comparison& comparison);

}  // namespace anneal
