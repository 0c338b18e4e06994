#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "anneal/metrics/report.hpp"
#include "anneal/sampler/langevin.hpp"

namespace anneal {

/// Config problem located in the source text. what() reads "<source>:<line>: <message>".
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Line on which each JSON value starts, keyed by JSON pointer ("" is the root).
std::map<std::string, std::size_t> json_value_lines(const std::string& text);

struct ExperimentConfig {
  std::string name = "experiment";
  std::string preset;  // empty when the mixture was given inline
  // Target in layout units; the sampler sees it scaled by frame_scale.
  std::shared_ptr<const Mixture> target;
  double frame_scale = 1.0;

  // Proposal, initialization and bounds are in layout units like the target.
  RunConfig run;

  std::vector<MetricKind> metrics = all_metrics();
  MetricConfig metric_config;
  std::size_t reference_samples = 0;  // 0 means one per particle

  bool write_particles = true;
  bool write_svg = true;
  std::string output_dir;  // used when the CLI is given no --out
};

/// Target as the sampler sees it.
Mixture sampler_target(const ExperimentConfig& cfg);

/// cfg.run with the proposal and initialization mapped into the sampler frame.
RunConfig sampler_run_config(const ExperimentConfig& cfg);

/// Parses and validates an experiment config. Errors carry the line of the offending value.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_experiment_config(const std::string& path);

/// Full config with every default filled in; parsing it gives back the same experiment.
nlohmann::json resolved_config(const ExperimentConfig& cfg);

}  // namespace anneal
