#include "anneal/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace anneal {

const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::ksd: return "ksd";
    case MetricKind::mmd: return "mmd";
    case MetricKind::kl: return "kl";
    case MetricKind::ot: return "ot";
    case MetricKind::mms: return "mms";
  }
  return "?";
}

MetricKind metric_from_string(const std::string& name) {
  for (auto k : all_metrics()) {
    if (name == to_string(k)) return k;
  }
  throw InputError("unknown metric '" + name + "' (expected ksd, mmd, kl, ot or mms)");
}

std::vector<MetricKind> all_metrics() {
  return {MetricKind::ksd, MetricKind::mmd, MetricKind::kl, MetricKind::ot, MetricKind::mms};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

bool has(const DiagnosticsReport& r, MetricKind k) {
  return std::find(r.metrics.begin(), r.metrics.end(), k) != r.metrics.end();
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return format_number(*v);
  return *v;
}

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& v = j.at(key);
  if (v.is_string()) return std::stod(v.get<std::string>());
  return v.get<double>();
}

}  // namespace

std::vector<std::string> csv_columns(const DiagnosticsReport& r) {
  std::vector<std::string> cols{"iteration", "t", "lambda"};
  if (has(r, MetricKind::ksd)) cols.push_back("ksd");
  if (has(r, MetricKind::mmd)) cols.push_back("mmd");
  if (has(r, MetricKind::kl)) {
    cols.insert(cols.end(), {"kl", "rev_kl", "kl_excluded"});
  }
  if (has(r, MetricKind::ot)) cols.insert(cols.end(), {"ot", "ot_converged"});
  if (has(r, MetricKind::mms)) cols.insert(cols.end(), {"mms", "occupied_modes"});
  return cols;
}

std::vector<std::string> csv_values(const DiagnosticsReport& r, const DiagnosticsRow& row) {
  std::vector<std::string> v{std::to_string(row.iteration), format_number(row.time),
                             format_number(row.lambda)};
  if (has(r, MetricKind::ksd)) v.push_back(opt(row.ksd));
  if (has(r, MetricKind::mmd)) v.push_back(opt(row.mmd));
  if (has(r, MetricKind::kl)) {
    v.push_back(opt(row.kl));
    v.push_back(opt(row.rev_kl));
    v.push_back(row.kl_excluded ? std::to_string(*row.kl_excluded) : "");
  }
  if (has(r, MetricKind::ot)) {
    v.push_back(opt(row.ot));
    v.push_back(row.ot_converged ? (*row.ot_converged ? "1" : "0") : "");
  }
  if (has(r, MetricKind::mms)) {
    v.push_back(opt(row.mms));
    v.push_back(row.occupied_modes ? std::to_string(*row.occupied_modes) : "");
  }
  return v;
}

std::string to_csv(const DiagnosticsReport& r) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(csv_columns(r));
  for (const auto& row : r.rows) line(csv_values(r, row));
  return out.str();
}

nlohmann::json to_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["metrics"] = nlohmann::json::array();
  for (auto k : r.metrics) j["metrics"].push_back(to_string(k));
  j["ot_epsilon"] = r.ot_epsilon;
  j["checkpoints"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json c;
    c["iteration"] = row.iteration;
    c["t"] = row.time;
    c["lambda"] = row.lambda;
    c["ksd"] = opt_json(row.ksd);
    c["mmd"] = opt_json(row.mmd);
    c["kl"] = opt_json(row.kl);
    c["rev_kl"] = opt_json(row.rev_kl);
    c["ot"] = opt_json(row.ot);
    c["mms"] = opt_json(row.mms);
    c["ot_converged"] = row.ot_converged ? nlohmann::json(*row.ot_converged) : nlohmann::json(nullptr);
    c["kl_excluded"] = row.kl_excluded ? nlohmann::json(*row.kl_excluded) : nlohmann::json(nullptr);
    c["occupied_modes"] =
        row.occupied_modes ? nlohmann::json(*row.occupied_modes) : nlohmann::json(nullptr);
    j["checkpoints"].push_back(std::move(c));
  }
  return j;
}

DiagnosticsReport report_from_json(const nlohmann::json& j) {
  try {
    DiagnosticsReport r;
    r.name = j.value("name", std::string{});
    for (const auto& m : j.at("metrics")) r.metrics.push_back(metric_from_string(m.get<std::string>()));
    r.ot_epsilon = j.value("ot_epsilon", 0.05);
    for (const auto& c : j.at("checkpoints")) {
      DiagnosticsRow row;
      row.iteration = c.at("iteration").get<std::size_t>();
      row.time = c.at("t").get<double>();
      row.lambda = c.at("lambda").get<double>();
      row.ksd = opt_from(c, "ksd");
      row.mmd = opt_from(c, "mmd");
      row.kl = opt_from(c, "kl");
      row.rev_kl = opt_from(c, "rev_kl");
      row.ot = opt_from(c, "ot");
      row.mms = opt_from(c, "mms");
      if (c.contains("ot_converged") && !c["ot_converged"].is_null()) row.ot_converged = c["ot_converged"].get<bool>();
      if (c.contains("kl_excluded") && !c["kl_excluded"].is_null()) row.kl_excluded = c["kl_excluded"].get<std::size_t>();
      if (c.contains("occupied_modes") && !c["occupied_modes"].is_null()) {
        row.occupied_modes = c["occupied_modes"].get<std::size_t>();
      }
      r.rows.push_back(row);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed diagnostics report: ") + e.what());
  }
}

}  // namespace anneal
