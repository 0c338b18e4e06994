// sample: run annealed Langevin experiments, compare reports, tabulate costs.
//
// Exit codes: 0 success, 2 bad config or arguments, 3 numerical abort,
// 1 anything else (I/O failures).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anneal/bench/compare.hpp"
#include "anneal/bench/config.hpp"
#include "anneal/bench/cost_table.hpp"
#include "anneal/bench/experiment.hpp"
#include "anneal/bench/presets.hpp"

namespace fs = std::filesystem;
using namespace anneal;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;
constexpr int kNumericalAbort = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot read file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// --jobs wins, then ANNEAL_PATH_THREADS, then 1.
int resolve_jobs(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw InputError("--jobs must be at least 1");
    return *flag;
  }
  const char* env = std::getenv("ANNEAL_PATH_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const int jobs = std::stoi(env, &used);
    if (used != std::string(env).size() || jobs < 1) throw std::invalid_argument(env);
    return jobs;
  } catch (const std::exception&) {
    throw InputError(std::string("ANNEAL_PATH_THREADS must be a positive integer, got '") + env + "'");
  }
}

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool quiet = false;
};

int cmd_run(const RunArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config);
  if (args.seed) cfg.run.seed = *args.seed;
  const int jobs = resolve_jobs(args.jobs);
  const std::string out = args.out.empty() ? cfg.output_dir : args.out;
  if (out.empty()) throw InputError("no output directory: pass --out or set output.dir in the config");

  ExperimentOptions options;
  options.out_dir = out;
  options.jobs = jobs;
  options.log = args.quiet ? nullptr : &std::cerr;
  const auto result = run_experiment(cfg, options);
  if (result.aborted) {
    std::cerr << "sample: numerical abort: " << result.abort_message << '\n'
              << "sample: partial results written to " << out << '\n';
    return kNumericalAbort;
  }
  std::cout << out << '\n';
  return kOk;
}

DiagnosticsReport load_report(const std::string& arg) {
  fs::path path = arg;
  if (fs::is_directory(path)) path /= "metrics.json";
  const std::string text = read_file(path.string());
  try {
    auto report = report_from_json(nlohmann::json::parse(text));
    if (report.name.empty()) report.name = path.parent_path().filename().string();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<DiagnosticsReport> reports;
  for (const auto& in : inputs) reports.push_back(load_report(in));
  const auto cmp = compare_runs(reports);
  if (out.empty()) {
    std::cout << to_csv(cmp);
    return kOk;
  }
  fs::create_directories(out);
  write_file(fs::path(out) / "compare.csv", to_csv(cmp));
  write_file(fs::path(out) / "compare.json", cmp.summary.dump(2) + "\n");
  std::cout << out << '\n';
  return kOk;
}

int cmd_cost(const std::string& config) {
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(read_file(config));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(config + ": malformed JSON: " + e.what());
  }
  std::cout << to_csv(estimate_mc_cost(spec));
  return kOk;
}

int cmd_preset_list() {
  for (const auto& p : presets()) {
    std::cout << p.name << "\t" << p.mixture.size() << " modes, d=" << p.mixture.dim()
              << ", frame_scale=" << p.frame_scale << "\t" << p.description << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annealed Langevin sampling experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write particles, metrics and plots");
  run->add_option("--config", run_args.config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_args.out, "Output directory (default: output.dir from the config)");
  run->add_option("--seed", run_args.seed, "Override run.seed");
  run->add_option("--jobs", run_args.jobs, "Worker threads (default: $ANNEAL_PATH_THREADS or 1)");
  run->add_flag("--quiet", run_args.quiet, "Do not log checkpoints to stderr");

  std::vector<std::string> reports;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Merge metrics reports that share a checkpoint grid");
  compare->add_option("reports", reports, "metrics.json files or run directories")->required();
  compare->add_option("--out", compare_out, "Write compare.csv and compare.json here instead of stdout");

  std::string cost_config;
  auto* cost = app.add_subcommand("cost", "Score-query cost of recursive estimators vs dilation");
  cost->add_option("--config", cost_config, "Cost table spec (JSON)")->required();

  auto* preset = app.add_subcommand("preset", "Built-in targets");
  preset->require_subcommand(1);
  auto* list = preset->add_subcommand("list", "List presets");
  std::string show_name, show_path = "dilation";
  auto* show = preset->add_subcommand("show", "Print a ready-to-run config for a preset");
  show->add_option("name", show_name, "Preset name")->required();
  show->add_option("--path", show_path, "Path kind for the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*compare) return cmd_compare(reports, compare_out);
    if (*cost) return cmd_cost(cost_config);
    if (*list) return cmd_preset_list();
    if (*show) {
      std::cout << preset_config(show_name, show_path).dump(2) << '\n';
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "sample: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    std::cerr << "sample: numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "sample: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
