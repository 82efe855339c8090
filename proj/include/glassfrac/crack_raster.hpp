#pragma once

#include <cstdint>
#include <vector>

#include "glassfrac/image.hpp"
#include "glassfrac/stress_sim.hpp"

namespace glassfrac {

inline constexpr double kDefaultStrokeWidth = 2.0;
inline constexpr int kDefaultDilation = 3;

/// Anti-aliased crack coverage. Pixel (x, y) covers [x, x+1) x [y, y+1).
struct CrackImage {
  int width = 0;
  int height = 0;
  double stroke_width = kDefaultStrokeWidth;
  /// Coverage in [0, 1], row-major.
  std::vector<float> intensity;
  /// Pattern edge that owns each pixel (largest coverage, lowest index on
  /// ties), -1 where intensity is 0.
  std::vector<std::int32_t> edge_index;

  float at(int x, int y) const { return intensity[static_cast<std::size_t>(y) * width + x]; }
  std::int32_t owner(int x, int y) const {
    return edge_index[static_cast<std::size_t>(y) * width + x];
  }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

struct RasterOptions {
  double stroke_width = kDefaultStrokeWidth;
  /// Narrow linearly from stroke_width at the impact node to 1 px at the leaves.
  bool taper = true;
};

/// Draws each pattern edge as a round-capped segment with coverage-based
/// anti-aliasing. Geometry outside the frame is clipped. Throws
/// std::invalid_argument for non-positive dimensions or stroke width < 1.
CrackImage rasterize(const CrackPattern& pattern, int width, int height,
                     const RasterOptions& options = {});

/// Pixels with intensity > 0, dilated by a disk of radius `dilation`.
/// Throws std::invalid_argument for a negative dilation.
BinaryMask crack_mask(const CrackImage& image, int dilation = kDefaultDilation);

/// intensity * 255, rounded half to even.
GrayImage crack_to_gray(const CrackImage& image);
/// 255 where set.
GrayImage mask_to_gray(const BinaryMask& mask);
/// Non-zero pixels become set; used to read masks back from PNG.
BinaryMask mask_from_gray(const GrayImage& gray);

}  // namespace glassfrac
