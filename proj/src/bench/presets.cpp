#include "anneal/bench/presets.hpp"

#include <string_view>

#include "anneal/core/mixture_json.hpp"

namespace anneal {

namespace detail {
extern const std::string_view grid16_json;
extern const std::string_view rings40_json;
}  // namespace detail

namespace {

Preset load(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  return Preset{j.at("name").get<std::string>(), j.at("description").get<std::string>(),
                j.at("frame_scale").get<double>(), mixture_from_json(j.at("mixture"))};
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{load(detail::grid16_json), load(detail::rings40_json)};
  return all;
}

const Preset& find_preset(const std::string& name) {
  std::string known;
  for (const auto& p : presets()) {
    if (p.name == name) return p;
    known += (known.empty() ? "" : ", ") + p.name;
  }
  throw InputError("unknown preset '" + name + "' (known: " + known + ")");
}

nlohmann::json preset_config(const std::string& name, const std::string& path) {
  const auto& preset = find_preset(name);
  nlohmann::json cfg;
  cfg["name"] = preset.name + "-" + path;
  cfg["target"] = {{"preset", preset.name}};
  cfg["path"] = {{"kind", path}};
  cfg["schedule"] = {{"kind", "linear"}};
  nlohmann::json run = {{"particles", 1000},
                        {"iterations", 10000},
                        {"step", {{"policy", "position_adaptive"}, {"h", 0.001}, {"bound", 1.0}}},
                        {"checkpoint_stride", 1000},
                        {"seed", 0}};
  run["init"] = {{"kind", path == "dilation" ? "dirac" : "gaussian"}};
  cfg["run"] = run;
  cfg["metrics"] = {{"enabled", {"ksd", "mmd", "kl", "ot", "mms"}}};
  return cfg;
}

}  // namespace anneal
