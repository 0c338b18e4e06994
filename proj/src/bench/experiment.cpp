#include "anneal/bench/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "anneal/bench/hash.hpp"
#include "anneal/bench/svg.hpp"
#include "anneal/core/mixture_json.hpp"

namespace anneal {

namespace fs = std::filesystem;

namespace {

bool enabled(const std::vector<MetricKind>& metrics, MetricKind k) {
  return std::find(metrics.begin(), metrics.end(), k) != metrics.end();
}

std::string points_csv(const Points& p) {
  std::ostringstream out;
  for (Eigen::Index c = 0; c < p.cols(); ++c) out << (c ? "," : "") << 'x' << (c + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) out << (c ? "," : "") << format_number(p(i, c));
    out << '\n';
  }
  return out.str();
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  bool active() const { return !dir_.empty(); }

  void write(const std::string& name, const std::string& content) {
    if (!active()) return;
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.push_back(name);
  }

  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

}  // namespace

DiagnosticsRow evaluate_cloud(const Points& cloud, const Mixture& target, const Points& reference,
                              const std::vector<MetricKind>& metrics, const MetricConfig& cfg) {
  DiagnosticsRow row;
  if (enabled(metrics, MetricKind::ksd)) row.ksd = ksd(cloud, *make_mixture_target(target), cfg);
  if (enabled(metrics, MetricKind::mmd)) row.mmd = mmd(cloud, reference, cfg);
  if (enabled(metrics, MetricKind::kl)) {
    const auto kl = knn_kl(cloud, reference, cfg);
    row.kl = kl.kl;
    row.rev_kl = kl.rev_kl;
    row.kl_excluded = kl.excluded + kl.rev_excluded;
  }
  if (enabled(metrics, MetricKind::ot)) {
    const auto ot = sinkhorn_w2(cloud, reference, cfg);
    row.ot = ot.w2;
    row.ot_converged = ot.converged;
  }
  if (enabled(metrics, MetricKind::mms)) {
    row.mms = mms(cloud, target);
    row.occupied_modes = occupied_modes(cloud, target);
  }
  return row;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
  if (!cfg.target) throw InputError("experiment has no target");
  if (options.jobs < 1) throw InputError("jobs must be at least 1");
  if (!options.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec || !fs::is_directory(options.out_dir)) {
      throw InputError("cannot create output directory " + options.out_dir.string() +
                       (ec ? ": " + ec.message() : ""));
    }
  }

  const Mixture& layout = *cfg.target;
  const auto target = make_mixture_target(sampler_target(cfg));
  RunConfig run = sampler_run_config(cfg);
  run.jobs = options.jobs;
  MetricConfig metric_cfg = cfg.metric_config;
  metric_cfg.jobs = options.jobs;

  Points reference;
  if (enabled(cfg.metrics, MetricKind::mmd) || enabled(cfg.metrics, MetricKind::kl) ||
      enabled(cfg.metrics, MetricKind::ot)) {
    const std::size_t m = cfg.reference_samples ? cfg.reference_samples : run.particles;
    RandomStream rng(derive_seed(run.seed, 1), 0);
    reference = gmm_sample(layout, m, rng);
  }

  ExperimentResult result;
  result.report.name = cfg.name;
  result.report.metrics = cfg.metrics;
  result.report.ot_epsilon = metric_cfg.ot.epsilon;
  ArtifactWriter writer(options.out_dir);
  const double inv_scale = 1.0 / cfg.frame_scale;

  auto sink = [&](const Checkpoint& cp) {
    Points cloud = cp.positions * inv_scale;
    DiagnosticsRow row = evaluate_cloud(cloud, layout, reference, cfg.metrics, metric_cfg);
    row.iteration = cp.iteration;
    row.time = cp.time;
    row.lambda = cp.lambda;
    result.report.rows.push_back(row);
    result.score_queries = cp.score_queries;
    if (cfg.write_particles && writer.active()) {
      const std::string stem = "particles_" + std::to_string(cp.iteration);
      writer.write(stem + ".csv", points_csv(cloud));
      const nlohmann::json sidecar = {{"iteration", cp.iteration},
                                      {"t", cp.time},
                                      {"lambda", cp.lambda},
                                      {"wall_time_ms", cp.wall_time_ms},
                                      {"score_query_count", cp.score_queries}};
      writer.write(stem + ".json", sidecar.dump(2) + "\n");
    }
    if (options.log) {
      auto& log = *options.log;
      log << "k=" << cp.iteration << " t=" << format_number(cp.time) << " lambda=" << format_number(cp.lambda);
      if (row.ksd) log << " ksd=" << *row.ksd;
      if (row.mmd) log << " mmd=" << *row.mmd;
      if (row.kl) log << " kl=" << *row.kl << " rev_kl=" << *row.rev_kl;
      if (row.ot) log << " ot=" << *row.ot;
      if (row.mms) log << " mms=" << *row.mms << " occupied=" << *row.occupied_modes;
      log << '\n' << std::flush;
    }
    result.final_positions = std::move(cloud);
  };

  try {
    run_annealed(run, target, sink);
  } catch (const NumericalError& e) {
    result.aborted = true;
    result.abort_message = e.what();
    result.abort_iteration = e.iteration();
    result.abort_particle = e.particle();
  }

  if (result.final_positions.rows() > 0) {
    result.final_counts = mode_counts(result.final_positions, layout);
    result.occupied_modes = occupied_modes(result.final_positions, layout);
  }

  writer.write("metrics.csv", to_csv(result.report));
  writer.write("metrics.json", to_json(result.report).dump(2) + "\n");
  if (cfg.write_svg && layout.dim() == 2 && result.final_positions.rows() > 0) {
    SvgOptions svg;
    svg.title = cfg.name + ", iteration " + std::to_string(result.report.rows.back().iteration);
    writer.write("final.svg", render_svg(result.final_positions, layout, svg));
  }

  if (writer.active()) {
    const nlohmann::json resolved = resolved_config(cfg);
    nlohmann::json manifest;
    manifest["name"] = cfg.name;
    manifest["status"] = result.aborted ? "aborted" : "completed";
    if (result.aborted) {
      manifest["error"] = {{"message", result.abort_message}, {"iteration", *result.abort_iteration}};
      if (result.abort_particle) manifest["error"]["particle"] = *result.abort_particle;
    }
    manifest["config"] = resolved;
    manifest["config_sha256"] = sha256_hex(resolved.dump());
    manifest["target"] = {{"mixture", mixture_to_json(layout)}, {"frame_scale", cfg.frame_scale}};
    manifest["jobs"] = options.jobs;
    manifest["score_queries"] = result.score_queries;
    nlohmann::json files = nlohmann::json::array();
    auto names = writer.names();
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
      const fs::path path = writer.dir() / name;
      files.push_back({{"path", name}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file(path)}});
    }
    manifest["files"] = files;
    writer.write("manifest.json", manifest.dump(2) + "\n");
    result.files = writer.names();
  }
  return result;
}

}  // namespace anneal
