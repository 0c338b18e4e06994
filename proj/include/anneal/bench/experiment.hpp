#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anneal/bench/config.hpp"

namespace anneal {

struct ExperimentOptions {
  std::filesystem::path out_dir;  // empty: keep everything in memory
  int jobs = 1;
  std::ostream* log = nullptr;
};

struct ExperimentResult {
  DiagnosticsReport report;
  Points final_positions;  // layout units
  std::vector<std::size_t> final_counts;
  std::size_t occupied_modes = 0;
  std::uint64_t score_queries = 0;
  bool aborted = false;
  std::string abort_message;
  std::optional<std::size_t> abort_iteration;
  std::optional<std::size_t> abort_particle;
  std::vector<std::string> files;
};

/// Metrics for one cloud (layout units) against the layout target.
DiagnosticsRow evaluate_cloud(const Points& cloud, const Mixture& target, const Points& reference,
                              const std::vector<MetricKind>& metrics, const MetricConfig& cfg);

/// Runs the sampler, scores every checkpoint and writes the artifacts. A
/// numerical abort is reported in the result (and in the manifest) instead of
/// being thrown; everything computed up to that point is still written.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options = {});

}  // namespace anneal
