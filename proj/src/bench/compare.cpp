#include "anneal/bench/compare.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace anneal {

namespace {

struct Field {
  const char* name;
  std::optional<double> DiagnosticsRow::*member;
};

const Field kFields[] = {{"ksd", &DiagnosticsRow::ksd}, {"mmd", &DiagnosticsRow::mmd},
                         {"kl", &DiagnosticsRow::kl},   {"rev_kl", &DiagnosticsRow::rev_kl},
                         {"ot", &DiagnosticsRow::ot},   {"mms", &DiagnosticsRow::mms}};

nlohmann::json value_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

// Identical values (including two NaNs from fully excluded k-NN sets) differ by zero.
double difference(double b, double a) {
  if (a == b || (std::isnan(a) && std::isnan(b))) return 0.0;
  return b - a;
}

}  // namespace

Comparison compare_runs(const std::vector<DiagnosticsReport>& reports) {
  if (reports.size() < 2) throw InputError("compare needs at least two reports");
  const auto& first = reports.front();
  for (std::size_t r = 1; r < reports.size(); ++r) {
    const auto& other = reports[r];
    bool same = other.rows.size() == first.rows.size();
    for (std::size_t i = 0; same && i < first.rows.size(); ++i) {
      same = other.rows[i].iteration == first.rows[i].iteration;
    }
    if (!same) {
      throw InputError("checkpoint grids differ between report 1 ('" + first.name + "') and report " +
                       std::to_string(r + 1) + " ('" + other.name + "')");
    }
  }

  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < reports.size(); ++r) {
    std::string name = reports[r].name.empty() ? "run" + std::to_string(r + 1) : reports[r].name;
    if (!seen.insert(name).second) {
      name += "#" + std::to_string(r + 1);
      seen.insert(name);
    }
    names.push_back(name);
  }

  Comparison out;
  out.columns = {"iteration", "t", "lambda"};
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const auto cols = csv_columns(reports[r]);
    for (std::size_t c = 3; c < cols.size(); ++c) out.columns.push_back(names[r] + "." + cols[c]);
  }
  struct Diff {
    std::size_t a, b;
    const Field* field;
  };
  std::vector<Diff> diffs;
  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      for (const auto& f : kFields) {
        const auto has = [&](const DiagnosticsReport& rep) {
          return std::any_of(rep.rows.begin(), rep.rows.end(),
                             [&](const DiagnosticsRow& row) { return (row.*f.member).has_value(); });
        };
        if (has(reports[a]) && has(reports[b])) {
          diffs.push_back({a, b, &f});
          out.columns.push_back(names[b] + "-" + names[a] + "." + f.name);
        }
      }
    }
  }

  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    const auto base = csv_values(first, first.rows[i]);
    std::vector<std::string> line(base.begin(), base.begin() + 3);
    for (const auto& rep : reports) {
      const auto vals = csv_values(rep, rep.rows[i]);
      line.insert(line.end(), vals.begin() + 3, vals.end());
    }
    for (const auto& d : diffs) {
      const auto& va = reports[d.a].rows[i].*(d.field->member);
      const auto& vb = reports[d.b].rows[i].*(d.field->member);
      line.push_back(va && vb ? format_number(difference(*vb, *va)) : "");
    }
    out.rows.push_back(std::move(line));
  }

  auto& s = out.summary;
  s["runs"] = names;
  if (!first.rows.empty()) {
    s["iteration"] = first.rows.back().iteration;
    for (std::size_t r = 0; r < reports.size(); ++r) {
      nlohmann::json values = nlohmann::json::object();
      const auto& row = reports[r].rows.back();
      for (const auto& f : kFields) {
        if ((row.*f.member)) values[f.name] = value_json(*(row.*f.member));
      }
      if (row.occupied_modes) values["occupied_modes"] = *row.occupied_modes;
      s["final"][names[r]] = values;
    }
    for (const auto& d : diffs) {
      const auto& va = reports[d.a].rows.back().*(d.field->member);
      const auto& vb = reports[d.b].rows.back().*(d.field->member);
      if (va && vb) s["differences"][names[d.b] + "-" + names[d.a]][d.field->name] = value_json(difference(*vb, *va));
    }
  }
  return out;
}

std::string to_csv(const Comparison& c) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(c.columns);
  for (const auto& row : c.rows) line(row);
  return out.str();
}

}  // namespace anneal
