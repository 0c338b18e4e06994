#include "anneal/bench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace anneal {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Box {
  double x0, x1, y0, y1;
};

// Mixture extent (3.5 standard deviations past every mean) widened to the
// particles, but never more than three times the mixture's own span.
Box view_box(const Points& particles, const Mixture& target) {
  Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& c : target.components()) {
    const double sx = 3.5 * std::sqrt(c.covariance()(0, 0));
    const double sy = 3.5 * std::sqrt(c.covariance()(1, 1));
    b.x0 = std::min(b.x0, c.mean()[0] - sx);
    b.x1 = std::max(b.x1, c.mean()[0] + sx);
    b.y0 = std::min(b.y0, c.mean()[1] - sy);
    b.y1 = std::max(b.y1, c.mean()[1] + sy);
  }
  const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
  const double span = std::max(b.x1 - b.x0, b.y1 - b.y0);
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    const double x = particles(i, 0), y = particles(i, 1);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    b.x0 = std::min(b.x0, x);
    b.x1 = std::max(b.x1, x);
    b.y0 = std::min(b.y0, y);
    b.y1 = std::max(b.y1, y);
  }
  const double half = 0.5 * std::min(std::max(b.x1 - b.x0, b.y1 - b.y0), 3.0 * span) * 1.05;
  return {cx - half, cx + half, cy - half, cy + half};
}

// Marching squares over a density grid; returns an SVG path for one level.
std::string contour_path(const Eigen::MatrixXd& field, double level, const Box& box, double px) {
  const Eigen::Index g = field.rows();
  const double step = (box.x1 - box.x0) / static_cast<double>(g - 1);
  auto to_px = [&](double gx, double gy) {
    return fmt(gx * step / (box.x1 - box.x0) * px) + " " + fmt(px - gy * step / (box.y1 - box.y0) * px);
  };
  std::ostringstream d;
  for (Eigen::Index i = 0; i + 1 < g; ++i) {
    for (Eigen::Index j = 0; j + 1 < g; ++j) {
      // Corners counter-clockwise from (i, j); field(i, j) sits at x = i, y = j.
      const double v[4] = {field(i, j), field(i + 1, j), field(i + 1, j + 1), field(i, j + 1)};
      const double cx[4] = {0, 1, 1, 0}, cy[4] = {0, 0, 1, 1};
      int mask = 0;
      for (int k = 0; k < 4; ++k) mask |= (v[k] > level ? 1 : 0) << k;
      if (mask == 0 || mask == 15) continue;
      std::vector<std::pair<double, double>> hits;
      for (int k = 0; k < 4; ++k) {
        const int l = (k + 1) % 4;
        if ((v[k] > level) != (v[l] > level)) {
          const double f = (level - v[k]) / (v[l] - v[k]);
          hits.emplace_back(static_cast<double>(i) + cx[k] + f * (cx[l] - cx[k]),
                            static_cast<double>(j) + cy[k] + f * (cy[l] - cy[k]));
        }
      }
      for (std::size_t h = 0; h + 1 < hits.size(); h += 2) {
        d << 'M' << to_px(hits[h].first, hits[h].second) << 'L' << to_px(hits[h + 1].first, hits[h + 1].second);
      }
    }
  }
  return d.str();
}

}  // namespace

std::string render_svg(const Points& particles, const Mixture& target, const SvgOptions& options) {
  if (particles.cols() != 2 || target.dim() != 2) throw InputError("render_svg: only 2D clouds are drawn");
  const Box box = view_box(particles, target);
  const double px = options.size;
  const int g = std::max(options.grid, 8);

  Eigen::MatrixXd field(g, g);
  double peak = -INFINITY;
  Vector x(2);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      x << box.x0 + (box.x1 - box.x0) * i / (g - 1), box.y0 + (box.y1 - box.y0) * j / (g - 1);
      field(i, j) = gmm_log_density(target, x);
      peak = std::max(peak, field(i, j));
    }
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.size << "\" height=\""
      << options.size << "\" viewBox=\"0 0 " << options.size << ' ' << options.size << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) out << "<title>" << escape_xml(options.title) << "</title>\n";
  // Levels at 50%, 10% and 1% of the peak density.
  const double levels[] = {std::log(0.01), std::log(0.1), std::log(0.5)};
  const char* shades[] = {"#c6dbef", "#6baed6", "#2171b5"};
  out << "<g class=\"contours\" fill=\"none\" stroke-width=\"1\">\n";
  for (int l = 0; l < 3; ++l) {
    out << "<path stroke=\"" << shades[l] << "\" d=\"" << contour_path(field, peak + levels[l], box, px) << "\"/>\n";
  }
  out << "</g>\n<g class=\"particles\" fill=\"#d62728\" fill-opacity=\"0.6\">\n";
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    const double u = (particles(i, 0) - box.x0) / (box.x1 - box.x0) * px;
    const double v = px - (particles(i, 1) - box.y0) / (box.y1 - box.y0) * px;
    out << "<circle class=\"particle\" cx=\"" << fmt(std::isfinite(u) ? u : -10.0) << "\" cy=\""
        << fmt(std::isfinite(v) ? v : -10.0) << "\" r=\"1.8\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace anneal
