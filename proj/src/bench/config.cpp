#include "anneal/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "anneal/bench/presets.hpp"
#include "anneal/core/mixture_json.hpp"

namespace anneal {

using nlohmann::json;

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : InputError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::map<std::string, std::size_t> json_value_lines(const std::string& text) {
  struct Frame {
    bool object;
    std::string key;
    std::size_t index = 0;
    bool expect_key = true;
  };
  std::vector<Frame> stack;
  std::map<std::string, std::size_t> lines;
  std::size_t line = 1;
  const std::size_t n = text.size();

  auto record = [&] {
    std::string p;
    for (const auto& f : stack) p += "/" + (f.object ? escape_token(f.key) : std::to_string(f.index));
    lines.emplace(std::move(p), line);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '"') {
      std::string s;
      for (++i; i < n && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < n) ++i;
        if (text[i] == '\n') ++line;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = std::move(s);
      } else {
        record();
      }
      continue;
    }
    switch (c) {
      case '{':
      case '[':
        record();
        stack.push_back({c == '{', "", 0, true});
        break;
      case '}':
      case ']':
        if (!stack.empty()) stack.pop_back();
        break;
      case ':':
        if (!stack.empty()) stack.back().expect_key = false;
        break;
      case ',':
        if (!stack.empty()) {
          if (stack.back().object) {
            stack.back().expect_key = true;
          } else {
            ++stack.back().index;
          }
        }
        break;
      default:
        record();
        while (i + 1 < n && !std::strchr(",]}: \t\r\n", text[i + 1])) ++i;
        break;
    }
  }
  return lines;
}

namespace {

class Reader {
 public:
  Reader(const json& root, std::map<std::string, std::size_t> lines, std::string source)
      : root_(root), lines_(std::move(lines)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& message) const {
    std::string label = ptr.empty() ? std::string("config") : ptr.substr(1);
    std::replace(label.begin(), label.end(), '/', '.');
    throw ConfigError(source_, line_of(ptr), label + ": " + message);
  }

  std::size_t line_of(std::string ptr) const {
    for (;;) {
      const auto it = lines_.find(ptr);
      if (it != lines_.end()) return it->second;
      if (ptr.empty()) return 1;
      ptr.erase(ptr.rfind('/'));
    }
  }

  bool has(const std::string& ptr) const { return root_.contains(json::json_pointer(ptr)); }
  const json& at(const std::string& ptr) const { return root_.at(json::json_pointer(ptr)); }

  // Object at ptr (or null when absent) whose keys must all be in `allowed`.
  const json* object(const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!has(ptr)) return nullptr;
    const json& node = at(ptr);
    if (!node.is_object()) fail(ptr, "expected an object");
    for (const auto& item : node.items()) {
      const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                  [&](const char* k) { return item.key() == k; });
      if (!ok) {
        std::string list;
        for (const char* k : allowed) list += (list.empty() ? "" : ", ") + std::string(k);
        fail(ptr + "/" + escape_token(item.key()), "unknown key (expected one of: " + list + ")");
      }
    }
    return &node;
  }

  double number(const std::string& ptr, double fallback) const {
    if (!has(ptr)) return fallback;
    const json& v = at(ptr);
    if (!v.is_number()) fail(ptr, "expected a number");
    return v.get<double>();
  }

  double positive(const std::string& ptr, double fallback) const {
    const double v = number(ptr, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) fail(ptr, "must be a positive finite number");
    return v;
  }

  std::uint64_t integer(const std::string& ptr, std::uint64_t fallback, std::uint64_t min = 0) const {
    if (!has(ptr)) return fallback;
    const json& v = at(ptr);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(ptr, "expected a non-negative integer");
    }
    const auto out = v.get<std::uint64_t>();
    if (out < min) fail(ptr, "must be at least " + std::to_string(min));
    return out;
  }

  std::string text(const std::string& ptr, const std::string& fallback) const {
    if (!has(ptr)) return fallback;
    const json& v = at(ptr);
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& ptr, bool fallback) const {
    if (!has(ptr)) return fallback;
    const json& v = at(ptr);
    if (!v.is_boolean()) fail(ptr, "expected true or false");
    return v.get<bool>();
  }

  Vector vector(const std::string& ptr, Eigen::Index dim) const {
    const json& v = at(ptr);
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
      fail(ptr, "expected an array of " + std::to_string(dim) + " numbers");
    }
    Vector out(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& e = v[static_cast<std::size_t>(i)];
      if (!e.is_number()) fail(ptr + "/" + std::to_string(i), "expected a number");
      out[i] = e.get<double>();
    }
    return out;
  }

  Gaussian gaussian(const std::string& ptr, Eigen::Index dim) const {
    object(ptr, {"mean", "covariance"});
    try {
      json g = at(ptr);
      if (!g.contains("mean")) g["mean"] = std::vector<double>(static_cast<std::size_t>(dim), 0.0);
      const Gaussian out = gaussian_from_json(g);
      if (out.dim() != dim) fail(ptr, "dimension " + std::to_string(out.dim()) + " does not match the target (" + std::to_string(dim) + ")");
      return out;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(ptr, e.what());
    }
  }

 private:
  const json& root_;
  std::map<std::string, std::size_t> lines_;
  std::string source_;
};

PathKind path_from_string(const Reader& r, const std::string& ptr, const std::string& name) {
  for (auto k : {PathKind::none, PathKind::dilation, PathKind::geometric, PathKind::convolutional_exact,
                 PathKind::convolutional_mc}) {
    if (name == to_string(k)) return k;
  }
  r.fail(ptr, "unknown path '" + name +
                  "' (expected none, dilation, geometric, convolutional_exact or convolutional_mc)");
}

}  // namespace

Mixture sampler_target(const ExperimentConfig& cfg) {
  if (!cfg.target) throw InputError("experiment has no target");
  return cfg.frame_scale == 1.0 ? *cfg.target : gmm_scale(*cfg.target, cfg.frame_scale);
}

RunConfig sampler_run_config(const ExperimentConfig& cfg) {
  RunConfig run = cfg.run;
  const double s = cfg.frame_scale;
  if (s == 1.0) return run;
  if (run.path.proposal) run.path.proposal = gaussian_scale(*run.path.proposal, s);
  if (run.init.gaussian) run.init.gaussian = gaussian_scale(*run.init.gaussian, s);
  run.init.low *= s;
  run.init.high *= s;
  return run;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte > 0 ? byte - 1 : 0), '\n'));
    std::string what = e.what();
    const auto colon = what.find("error: ");
    throw ConfigError(source, line, "malformed JSON: " + (colon == std::string::npos ? what : what.substr(colon + 7)));
  }
  const Reader r(root, json_value_lines(text), source);
  if (!root.is_object()) r.fail("", "expected a JSON object");
  r.object("", {"name", "target", "path", "schedule", "run", "metrics", "output"});

  ExperimentConfig cfg;
  cfg.name = r.text("/name", cfg.name);

  // target
  if (!r.has("/target")) r.fail("", "missing 'target' section");
  r.object("/target", {"preset", "mixture", "frame_scale"});
  if (r.has("/target/preset") == r.has("/target/mixture")) {
    r.fail("/target", "give exactly one of 'preset' or 'mixture'");
  }
  if (r.has("/target/preset")) {
    cfg.preset = r.text("/target/preset", "");
    try {
      const auto& preset = find_preset(cfg.preset);
      cfg.target = std::make_shared<const Mixture>(preset.mixture);
      cfg.frame_scale = preset.frame_scale;
    } catch (const InputError& e) {
      r.fail("/target/preset", e.what());
    }
  } else {
    try {
      cfg.target = std::make_shared<const Mixture>(mixture_from_json(r.at("/target/mixture")));
    } catch (const std::exception& e) {
      r.fail("/target/mixture", e.what());
    }
  }
  cfg.frame_scale = r.positive("/target/frame_scale", cfg.frame_scale);
  const Eigen::Index d = cfg.target->dim();

  // path
  r.object("/path", {"kind", "proposal", "mc"});
  auto& run = cfg.run;
  run.path.kind = path_from_string(r, "/path/kind", r.text("/path/kind", "dilation"));
  const bool wants_proposal =
      run.path.kind == PathKind::geometric || run.path.kind == PathKind::convolutional_exact;
  if (r.has("/path/proposal")) {
    if (!wants_proposal) r.fail("/path/proposal", std::string("not used by the ") + to_string(run.path.kind) + " path");
    run.path.proposal = r.gaussian("/path/proposal", d);
    if (run.path.kind == PathKind::convolutional_exact && !run.path.proposal->mean().isZero(0.0)) {
      r.fail("/path/proposal/mean", "convolutional_exact needs a zero-mean proposal");
    }
  } else if (wants_proposal) {
    run.path.proposal = Gaussian::standard(d);
  }
  if (r.has("/path/mc") && run.path.kind != PathKind::convolutional_mc) {
    r.fail("/path/mc", "only used by the convolutional_mc path");
  }
  r.object("/path/mc", {"samples", "iterations", "step"});
  run.path.mc.samples = r.integer("/path/mc/samples", run.path.mc.samples, 1);
  run.path.mc.iterations = r.integer("/path/mc/iterations", run.path.mc.iterations, 1);
  run.path.mc.step = r.positive("/path/mc/step", run.path.mc.step);

  // schedule
  r.object("/schedule", {"kind", "horizon"});
  const auto sched = r.text("/schedule/kind", "linear");
  if (sched == "linear") {
    if (r.has("/schedule/horizon")) r.fail("/schedule/horizon", "only used by the exponential schedule");
    run.schedule = Schedule::linear();
  } else if (sched == "exponential") {
    run.schedule = Schedule::exponential(r.positive("/schedule/horizon", 1.0));
  } else {
    r.fail("/schedule/kind", "unknown schedule '" + sched + "' (expected linear or exponential)");
  }
  if (run.path.kind == PathKind::convolutional_mc && run.schedule.kind != Schedule::Kind::exponential) {
    r.fail("/schedule/kind", "the convolutional_mc path needs the exponential schedule");
  }

  // run
  r.object("/run", {"particles", "iterations", "step", "init", "checkpoint_stride", "seed"});
  run.particles = r.integer("/run/particles", run.particles, 1);
  run.iterations = r.integer("/run/iterations", run.iterations, 0);
  run.checkpoint_stride = r.integer("/run/checkpoint_stride", run.checkpoint_stride, 1);
  run.seed = r.integer("/run/seed", 0);
  r.object("/run/step", {"policy", "h", "bound"});
  const auto policy = r.text("/run/step/policy", "position_adaptive");
  const double h = r.positive("/run/step/h", 1e-3);
  const double bound = r.positive("/run/step/bound", 1.0);
  if (policy == "fixed") {
    run.step = StepPolicy::fixed(h);
  } else if (policy == "time_adaptive") {
    run.step = StepPolicy::time_adaptive(h);
  } else if (policy == "position_adaptive") {
    run.step = StepPolicy::position_adaptive(h, bound);
  } else {
    r.fail("/run/step/policy", "unknown step policy '" + policy +
                                   "' (expected fixed, time_adaptive or position_adaptive)");
  }
  if (policy != "position_adaptive" && r.has("/run/step/bound")) {
    r.fail("/run/step/bound", "only used by the position_adaptive policy");
  }

  r.object("/run/init", {"kind", "mean", "covariance", "low", "high"});
  const auto init = r.text("/run/init/kind", run.path.kind == PathKind::dilation ? "dirac" : "gaussian");
  if (init == "dirac") {
    if (r.has("/run/init/mean") || r.has("/run/init/covariance") || r.has("/run/init/low") || r.has("/run/init/high")) {
      r.fail("/run/init", "dirac initialization takes no parameters");
    }
    run.init = Initialization::dirac();
  } else if (init == "gaussian") {
    if (r.has("/run/init/low") || r.has("/run/init/high")) r.fail("/run/init", "low/high belong to uniform initialization");
    json g = json::object();
    if (r.has("/run/init/mean")) g["mean"] = r.at("/run/init/mean");
    if (r.has("/run/init/covariance")) g["covariance"] = r.at("/run/init/covariance");
    try {
      if (!g.contains("mean")) g["mean"] = std::vector<double>(static_cast<std::size_t>(d), 0.0);
      auto gauss = gaussian_from_json(g);
      if (gauss.dim() != d) r.fail("/run/init", "dimension does not match the target");
      run.init = Initialization::from_gaussian(std::move(gauss));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      r.fail("/run/init", e.what());
    }
  } else if (init == "uniform") {
    if (!r.has("/run/init/low") || !r.has("/run/init/high")) r.fail("/run/init", "uniform initialization needs low and high");
    const Vector lo = r.vector("/run/init/low", d);
    const Vector hi = r.vector("/run/init/high", d);
    if ((hi.array() <= lo.array()).any()) r.fail("/run/init/high", "must exceed low in every coordinate");
    run.init = Initialization::from_uniform(lo, hi);
  } else {
    r.fail("/run/init/kind", "unknown initialization '" + init + "' (expected dirac, gaussian or uniform)");
  }
  if (run.path.kind == PathKind::dilation && run.init.kind != Initialization::Kind::dirac_at_origin) {
    r.fail("/run/init/kind", "the dilation path starts from a Dirac at the origin; use \"dirac\"");
  }

  // metrics
  r.object("/metrics", {"enabled", "reference_samples", "ksd", "mmd", "kl", "ot"});
  if (r.has("/metrics/enabled")) {
    const auto& list = r.at("/metrics/enabled");
    if (!list.is_array()) r.fail("/metrics/enabled", "expected an array of metric names");
    cfg.metrics.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ptr = "/metrics/enabled/" + std::to_string(i);
      if (!list[i].is_string()) r.fail(ptr, "expected a metric name");
      MetricKind k{};
      try {
        k = metric_from_string(list[i].get<std::string>());
      } catch (const InputError& e) {
        r.fail(ptr, e.what());
      }
      if (std::find(cfg.metrics.begin(), cfg.metrics.end(), k) != cfg.metrics.end()) r.fail(ptr, "listed twice");
      cfg.metrics.push_back(k);
    }
    // Canonical order keeps report columns independent of how the list was written.
    std::vector<MetricKind> ordered;
    for (auto k : all_metrics()) {
      if (std::find(cfg.metrics.begin(), cfg.metrics.end(), k) != cfg.metrics.end()) ordered.push_back(k);
    }
    cfg.metrics = ordered;
  }
  cfg.reference_samples = r.integer("/metrics/reference_samples", 0);
  auto& mc = cfg.metric_config;
  r.object("/metrics/ksd", {"beta"});
  mc.ksd.beta = r.number("/metrics/ksd/beta", mc.ksd.beta);
  if (!(mc.ksd.beta >= 0.0 && mc.ksd.beta <= 1.0)) r.fail("/metrics/ksd/beta", "must lie in [0, 1]");
  r.object("/metrics/mmd", {"bandwidth"});
  mc.mmd.bandwidth = r.positive("/metrics/mmd/bandwidth", mc.mmd.bandwidth);
  r.object("/metrics/kl", {"k"});
  mc.kl.k = r.integer("/metrics/kl/k", mc.kl.k, 1);
  r.object("/metrics/ot", {"epsilon", "max_iterations", "tolerance", "standardize"});
  mc.ot.epsilon = r.positive("/metrics/ot/epsilon", mc.ot.epsilon);
  mc.ot.max_iterations = r.integer("/metrics/ot/max_iterations", mc.ot.max_iterations, 1);
  mc.ot.tolerance = r.positive("/metrics/ot/tolerance", mc.ot.tolerance);
  mc.ot.standardize = r.flag("/metrics/ot/standardize", mc.ot.standardize);

  const auto enabled = [&](MetricKind k) {
    return std::find(cfg.metrics.begin(), cfg.metrics.end(), k) != cfg.metrics.end();
  };
  const std::size_t refs = cfg.reference_samples ? cfg.reference_samples : run.particles;
  if (enabled(MetricKind::mmd) && (run.particles < 2 || refs < 2)) {
    r.fail("/run/particles", "mmd needs at least two particles and two reference samples");
  }
  if (enabled(MetricKind::kl) && (run.particles <= mc.kl.k || refs <= mc.kl.k)) {
    r.fail("/run/particles", "kl needs more than k particles and reference samples");
  }

  // output
  r.object("/output", {"particles", "svg", "dir"});
  cfg.write_particles = r.flag("/output/particles", true);
  cfg.write_svg = r.flag("/output/svg", true);
  cfg.output_dir = r.text("/output/dir", "");

  try {
    validate(run, d);
  } catch (const InputError& e) {
    r.fail("/run", e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot read config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str(), path);
}

json resolved_config(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (!cfg.preset.empty()) {
    j["target"] = {{"preset", cfg.preset}, {"frame_scale", cfg.frame_scale}};
  } else {
    j["target"] = {{"mixture", mixture_to_json(*cfg.target)}, {"frame_scale", cfg.frame_scale}};
  }
  const auto& run = cfg.run;
  j["path"] = {{"kind", to_string(run.path.kind)}};
  if (run.path.proposal) j["path"]["proposal"] = gaussian_to_json(*run.path.proposal);
  if (run.path.kind == PathKind::convolutional_mc) {
    j["path"]["mc"] = {{"samples", run.path.mc.samples},
                       {"iterations", run.path.mc.iterations},
                       {"step", run.path.mc.step}};
  }
  j["schedule"] = {{"kind", to_string(run.schedule.kind)}};
  if (run.schedule.kind == Schedule::Kind::exponential) j["schedule"]["horizon"] = run.schedule.horizon;

  json step = {{"policy", to_string(run.step.kind)}, {"h", run.step.step}};
  if (run.step.kind == StepPolicy::Kind::position_adaptive) step["bound"] = run.step.bound;
  json init = {{"kind", to_string(run.init.kind)}};
  if (run.init.kind == Initialization::Kind::gaussian) {
    const auto g = gaussian_to_json(*run.init.gaussian);
    init["mean"] = g["mean"];
    init["covariance"] = g["covariance"];
  } else if (run.init.kind == Initialization::Kind::uniform) {
    init["low"] = std::vector<double>(run.init.low.begin(), run.init.low.end());
    init["high"] = std::vector<double>(run.init.high.begin(), run.init.high.end());
  }
  j["run"] = {{"particles", run.particles}, {"iterations", run.iterations},
              {"step", step},               {"init", init},
              {"checkpoint_stride", run.checkpoint_stride}, {"seed", run.seed}};

  json enabled = json::array();
  for (auto k : cfg.metrics) enabled.push_back(to_string(k));
  const auto& mc = cfg.metric_config;
  j["metrics"] = {{"enabled", enabled},
                  {"reference_samples", cfg.reference_samples},
                  {"ksd", {{"beta", mc.ksd.beta}}},
                  {"mmd", {{"bandwidth", mc.mmd.bandwidth}}},
                  {"kl", {{"k", mc.kl.k}}},
                  {"ot",
                   {{"epsilon", mc.ot.epsilon},
                    {"max_iterations", mc.ot.max_iterations},
                    {"tolerance", mc.ot.tolerance},
                    {"standardize", mc.ot.standardize}}}};
  j["output"] = {{"particles", cfg.write_particles}, {"svg", cfg.write_svg}};
  if (!cfg.output_dir.empty()) j["output"]["dir"] = cfg.output_dir;
  return j;
}

}  // namespace anneal
