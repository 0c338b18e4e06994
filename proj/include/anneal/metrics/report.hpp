#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anneal/metrics/metrics.hpp"

namespace anneal {

enum class MetricKind { ksd, mmd, kl, ot, mms };

const char* to_string(MetricKind k);
MetricKind metric_from_string(const std::string& name);
std::vector<MetricKind> all_metrics();

/// One checkpoint's diagnostics. Metrics that were not enabled stay empty.
struct DiagnosticsRow {
  std::size_t iteration = 0;
  double time = 0.0;
  double lambda = 0.0;
  std::optional<double> ksd, mmd, kl, rev_kl, ot, mms;
  std::optional<bool> ot_converged;
  std::optional<std::size_t> kl_excluded;
  std::optional<std::size_t> occupied_modes;
};

struct DiagnosticsReport {
  std::string name;
  std::vector<MetricKind> metrics;
  double ot_epsilon = 0.05;
  std::vector<DiagnosticsRow> rows;
};

/// Header plus one line per checkpoint; numbers use round-trip precision.
std::string to_csv(const DiagnosticsReport& report);
std::vector<std::string> csv_columns(const DiagnosticsReport& report);
std::vector<std::string> csv_values(const DiagnosticsReport& report, const DiagnosticsRow& row);

nlohmann::json to_json(const DiagnosticsReport& report);
DiagnosticsReport report_from_json(const nlohmann::json& j);

std::string format_number(double v);

}  // namespace anneal
