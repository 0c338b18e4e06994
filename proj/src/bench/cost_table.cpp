#include "anneal/bench/cost_table.hpp"

#include <cmath>
#include <sstream>

#include "anneal/core/errors.hpp"
#include "anneal/metrics/report.hpp"

namespace anneal {

std::vector<CostRow> estimate_mc_cost(const std::vector<RecursiveCostModel>& models,
                                      const std::optional<DilationBudget>& dilation) {
  if (models.empty()) throw InputError("cost table needs at least one recursive-estimator configuration");
  std::vector<CostRow> rows;
  for (const auto& m : models) {
    CostRow row;
    row.label = "recursive";
    row.model = m;
    row.queries = recursive_cost(m);
    row.log10_queries = static_cast<double>(m.windows) *
                        std::log10(static_cast<double>(m.particles_per_window) *
                                   static_cast<double>(m.iterations_per_window));
    rows.push_back(std::move(row));
  }
  if (dilation) {
    if (dilation->particles < 1) throw InputError("dilation budget needs at least one particle");
    CostRow row;
    row.label = "dilation";
    // One pass of n particles over K iterations: shown as a single window.
    row.model = RecursiveCostModel{dilation->particles, dilation->iterations, 1};
    row.queries = BigCount(dilation->particles) * BigCount(dilation->iterations);
    row.log10_queries = dilation->iterations == 0
                            ? -INFINITY
                            : std::log10(static_cast<double>(dilation->particles)) +
                                  std::log10(static_cast<double>(dilation->iterations));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CostRow> estimate_mc_cost(const nlohmann::json& spec) {
  auto count = [](const nlohmann::json& j, const char* key, const std::string& where) -> std::uint64_t {
    if (!j.contains(key)) throw InputError(where + ": missing '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) throw InputError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  };
  if (!spec.is_object() || !spec.contains("models") || !spec.at("models").is_array()) {
    throw InputError("cost config needs a 'models' array");
  }
  std::vector<RecursiveCostModel> models;
  for (std::size_t i = 0; i < spec.at("models").size(); ++i) {
    const auto& m = spec.at("models")[i];
    const std::string where = "models[" + std::to_string(i) + "]";
    models.push_back({count(m, "particles_per_window", where), count(m, "iterations_per_window", where),
                      count(m, "windows", where)});
  }
  std::optional<DilationBudget> dilation;
  if (spec.contains("dilation")) {
    const auto& d = spec.at("dilation");
    dilation = DilationBudget{count(d, "particles", "dilation"), count(d, "iterations", "dilation")};
  }
  return estimate_mc_cost(models, dilation);
}

std::string to_csv(const std::vector<CostRow>& rows) {
  std::ostringstream out;
  out << "path,particles_per_window,iterations_per_window,windows,score_queries,log10_score_queries\n";
  for (const auto& r : rows) {
    out << r.label << ',';
    out << r.model.particles_per_window << ',' << r.model.iterations_per_window << ','
        << r.model.windows;
    out << ',' << r.queries.str() << ',' << format_number(r.log10_queries) << '\n';
  }
  return out.str();
}

}  // namespace anneal
