#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "glassfrac/pbr_overlay.hpp"

namespace glassfrac {

namespace {

constexpr double kUnitTolerance = 1e-9;

void require_unit(Vec2 v, const char* what) {
  if (std::abs(norm(v) - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(std::string(what) + " must be a unit vector");
  }
}

}  // namespace

void LightSource::validate() const {
  for (double c : mean_intensity) {
    if (!(c >= 0.0 && c <= 255.0)) {
      throw std::invalid_argument("light intensity channels must lie in [0, 255]");
    }
  }
  require_unit(azimuth_dir, "azimuth direction");
  require_unit(zenith_dir, "zenith direction");
}

Vec2 project_to_plane(Vec3 direction) {
  const Vec2 planar{direction.x, direction.y};
  const double n = norm(planar);
  if (!(n > 0.0)) {
    throw std::invalid_argument("light direction has no in-plane component");
  }
  return {planar.x / n, planar.y / n};
}

double RenderConfig::effective_blur_sigma() const {
  if (blur_sigma) return *blur_sigma;
  return focus_mode == FocusMode::far_focus ? kDefaultFarBlurSigma : kDefaultShortBlurSigma;
}

void RenderConfig::validate() const {
  light.validate();
  if (!(effective_blur_sigma() >= 0.0)) throw std::invalid_argument("blur sigma must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(stroke_width >= 1.0)) throw std::invalid_argument("stroke width must be >= 1");
  if (dilation < 0) throw std::invalid_argument("dilation must be >= 0");
}

double mean_incident_energy(Vec2 crack_normal, const LightSource& light) {
  require_unit(crack_normal, "crack normal");
  require_unit(light.azimuth_dir, "azimuth direction");
  require_unit(light.zenith_dir, "zenith direction");
  const double e =
      (std::abs(dot(light.azimuth_dir, crack_normal)) + std::abs(dot(light.zenith_dir, crack_normal))) / 2.0;
  return std::clamp(e, 0.0, 1.0);
}

Rgb crack_intensity(const LightSource& light, double energy, double total_reflected) {
  if (!(total_reflected > 0.0)) {
    throw std::invalid_argument("total reflected energy must be positive");
  }
  if (!(energy >= 0.0)) {
    throw std::invalid_argument("incident energy must be non-negative");
  }
  const double ratio = energy / total_reflected;
  Rgb out{};
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = std::clamp(light.mean_intensity[c] * ratio, 0.0, 255.0);
  }
  return out;
}

std::vector<Rgb> shade_pattern(const CrackPattern& pattern, const LightSource& light) {
  light.validate();
  std::vector<double> energies(pattern.edges.size(), 0.0);
  std::vector<bool> degenerate(pattern.edges.size(), false);
  double total = 0.0;
  for (std::size_t i = 0; i < pattern.edges.size(); ++i) {
    const Vec2 d = pattern.nodes[pattern.edges[i].b] - pattern.nodes[pattern.edges[i].a];
    if (squared_norm(d) == 0.0) {
      spdlog::warn("skipping zero-length crack edge {} ({} -> {})", i, pattern.edges[i].a,
                   pattern.edges[i].b);
      degenerate[i] = true;
      continue;
    }
    energies[i] = mean_incident_energy(perpendicular(unit(d)), light);
    total += energies[i];
  }

  std::vector<Rgb> colors(pattern.edges.size(), Rgb{0.0, 0.0, 0.0});
  if (!(total > 0.0)) {
    return colors;
  }
  for (std::size_t i = 0; i < pattern.edges.size(); ++i) {
    if (!degenerate[i]) colors[i] = crack_intensity(light, energies[i], total);
  }
  return colors;
}

nlohmann::json shading_to_json(const CrackPattern& pattern, const std::vector<Rgb>& shading) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < pattern.edges.size() && i < shading.size(); ++i) {
    edges.push_back({pattern.edges[i].a, pattern.edges[i].b,
                     {shading[i][0], shading[i][1], shading[i][2]}});
  }
  return {{"edges", std::move(edges)}};
}

std::string to_string(FocusMode mode) {
  return mode == FocusMode::far_focus ? "far_focus" : "short_focus";
}

FocusMode focus_mode_from_string(const std::string& text) {
  if (text == "far" || text == "far_focus") return FocusMode::far_focus;
  if (text == "short" || text == "short_focus") return FocusMode::short_focus;
  throw std::invalid_argument("unknown focus mode '" + text + "'");
}

}  // namespace glassfrac
