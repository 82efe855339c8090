#pragma once

// Microfacet shading of crack segments and compositing onto a camera image.
//
// Each crack segment is treated as a perfect mirror whose normal lies in the
// image plane. Glass emits nothing, so outgoing radiance is the reflected term
// only; its hemisphere integral is abstracted to the mean of the incident
// energies from the azimuth and zenith light directions:
//
//   E(L_r) = (|w_azimuth . n| + |w_zenith . n|) / 2
//   I_c    = (I_r, I_g, I_b) * E(L_r) / sum(L_r)
//
// where the sum runs over every segment of the pattern.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "glassfrac/crack_raster.hpp"
#include "glassfrac/geometry.hpp"
#include "glassfrac/image.hpp"
#include "glassfrac/stress_sim.hpp"

namespace glassfrac {

using Rgb = std::array<double, 3>;

struct LightSource {
  Rgb mean_intensity{255.0, 255.0, 255.0};
  Vec2 azimuth_dir{1.0, 0.0};
  Vec2 zenith_dir{0.0, 1.0};

  /// Throws std::invalid_argument for non-unit directions or channels outside [0, 255].
  void validate() const;
};

/// In-plane unit direction of a 3D light vector. Throws std::invalid_argument
/// when the vector has no in-plane component.
Vec2 project_to_plane(Vec3 direction);

enum class FocusMode { far_focus, short_focus };

inline constexpr double kDefaultAlpha = 0.65;
inline constexpr double kDefaultFarBlurSigma = 2.0;
inline constexpr double kDefaultShortBlurSigma = 4.0;

struct RenderConfig {
  LightSource light;
  FocusMode focus_mode = FocusMode::far_focus;
  /// Unset: 2.0 px for far focus, 4.0 px for short focus.
  std::optional<double> blur_sigma;
  double alpha = kDefaultAlpha;
  double stroke_width = kDefaultStrokeWidth;
  int dilation = kDefaultDilation;

  double effective_blur_sigma() const;
  void validate() const;
};

struct OverlayResult {
  RgbImage image;
  BinaryMask mask;
  std::vector<Rgb> crack_intensities;
};

/// Throws std::invalid_argument when a vector is not unit length (1e-9).
double mean_incident_energy(Vec2 crack_normal, const LightSource& light);

/// Light scaled by energy / total_reflected, clamped to [0, 255].
/// Throws std::invalid_argument when total_reflected <= 0 or energy < 0.
Rgb crack_intensity(const LightSource& light, double energy, double total_reflected);

/// Per-edge colors in pattern edge order. Zero-length edges get black and a
/// warning; they do not contribute to the normalization.
std::vector<Rgb> shade_pattern(const CrackPattern& pattern, const LightSource& light);

/// Throws std::invalid_argument when the source, crack and mask sizes differ
/// or the config is invalid.
OverlayResult composite(const RgbImage& source, const CrackImage& crack,
                        const std::vector<Rgb>& shading, const BinaryMask& mask,
                        const RenderConfig& config);

/// Far focus blurs only masked pixels, short focus blurs everything.
/// A sigma of 0 returns the input unchanged.
RgbImage apply_focus(const RgbImage& image, const BinaryMask& mask, FocusMode mode,
                     double blur_sigma);

/// {edges: [[i, j, [r, g, b]], ...]}
nlohmann::json shading_to_json(const CrackPattern& pattern, const std::vector<Rgb>& shading);

std::string to_string(FocusMode mode);
/// Accepts "far", "far_focus", "short", "short_focus".
FocusMode focus_mode_from_string(const std::string& text);

}  // namespace glassfrac
