#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anneal/core/mixture.hpp"

namespace anneal {

/// A frozen target layout. Means and covariances are in layout units; the
/// sampler runs on the mixture scaled by `frame_scale`.
struct Preset {
  std::string name;
  std::string description;
  double frame_scale = 1.0;
  Mixture mixture;
};

const std::vector<Preset>& presets();

/// Throws InputError naming the known presets when `name` is not one of them.
const Preset& find_preset(const std::string& name);

/// Ready-to-run experiment config for a preset and path kind
/// ("dilation", "geometric", "none", ...), matching the default protocol.
nlohmann::json preset_config(const std::string& name, const std::string& path = "dilation");

}  // namespace anneal
