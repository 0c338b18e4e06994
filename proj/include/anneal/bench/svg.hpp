#pragma once

#include <string>

#include "anneal/core/mixture.hpp"

namespace anneal {

struct SvgOptions {
  int size = 640;
  int grid = 160;  // density samples per side for the contours
  std::string title;
};

/// Scatter of 2D particles over density contours of `target`, one
/// <circle class="particle"> per row.
std::string render_svg(const Points& particles, const Mixture& target, const SvgOptions& options = {});

}  // namespace anneal
