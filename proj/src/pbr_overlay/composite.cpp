#include <algorithm>
#include <cfenv>
#include <cmath>
#include <stdexcept>

#include "glassfrac/pbr_overlay.hpp"

namespace glassfrac {

namespace {

// Interleaved RGB in floating point.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  explicit FloatImage(const RgbImage& image)
      : width(image.width), height(image.height), values(image.pixels.begin(), image.pixels.end()) {}

  double& at(int x, int y, int c) { return values[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  double at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open
  bool empty() const { return x0 >= x1 || y0 >= y1; }
};

class RoundToNearest {
 public:
  RoundToNearest() : previous_(std::fegetround()) { std::fesetround(FE_TONEAREST); }
  ~RoundToNearest() { std::fesetround(previous_); }
  RoundToNearest(const RoundToNearest&) = delete;
  RoundToNearest& operator=(const RoundToNearest&) = delete;

 private:
  int previous_;
};

// Half-to-even under the default rounding mode.
std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::nearbyint(std::clamp(v, 0.0, 255.0)));
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

// Mirror without repeating the edge pixel: -1 -> 1, n -> n - 2.
int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Separable Gaussian of `src` evaluated over `roi`; result is roi-sized.
std::vector<double> blur_region(const FloatImage& src, Rect roi, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int roi_w = roi.x1 - roi.x0;
  const int roi_h = roi.y1 - roi.y0;
  const int rows = roi_h + 2 * radius;

  // Horizontal pass for every source row the vertical pass will touch.
  std::vector<double> horizontal(static_cast<std::size_t>(rows) * roi_w * 3, 0.0);
  for (int r = 0; r < rows; ++r) {
    const int sy = reflect101(roi.y0 - radius + r, src.height);
    for (int x = 0; x < roi_w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = -radius; k <= radius; ++k) {
        const int sx = reflect101(roi.x0 + x + k, src.width);
        const double w = kernel[static_cast<std::size_t>(k + radius)];
        for (int c = 0; c < 3; ++c) acc[c] += w * src.at(sx, sy, c);
      }
      for (int c = 0; c < 3; ++c) {
        horizontal[(static_cast<std::size_t>(r) * roi_w + x) * 3 + c] = acc[c];
      }
    }
  }

  std::vector<double> out(static_cast<std::size_t>(roi_h) * roi_w * 3, 0.0);
  for (int y = 0; y < roi_h; ++y) {
    for (int x = 0; x < roi_w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < static_cast<int>(kernel.size()); ++k) {
        const double w = kernel[static_cast<std::size_t>(k)];
        for (int c = 0; c < 3; ++c) {
          acc[c] += w * horizontal[(static_cast<std::size_t>(y + k) * roi_w + x) * 3 + c];
        }
      }
      for (int c = 0; c < 3; ++c) out[(static_cast<std::size_t>(y) * roi_w + x) * 3 + c] = acc[c];
    }
  }
  return out;
}

Rect mask_bounds(const BinaryMask& mask) {
  Rect r{mask.width, mask.height, 0, 0};
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      r.x0 = std::min(r.x0, x);
      r.y0 = std::min(r.y0, y);
      r.x1 = std::max(r.x1, x + 1);
      r.y1 = std::max(r.y1, y + 1);
    }
  }
  return r;
}

// Replaces masked pixels of `image` by their blurred values.
void blur_masked(FloatImage& image, const BinaryMask& mask, double sigma) {
  const Rect roi = mask_bounds(mask);
  if (roi.empty() || sigma <= 0.0) return;
  const std::vector<double> blurred = blur_region(image, roi, sigma);
  const int roi_w = roi.x1 - roi.x0;
  for (int y = roi.y0; y < roi.y1; ++y) {
    for (int x = roi.x0; x < roi.x1; ++x) {
      if (!mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        image.at(x, y, c) =
            blurred[(static_cast<std::size_t>(y - roi.y0) * roi_w + (x - roi.x0)) * 3 + c];
      }
    }
  }
}

void blur_all(FloatImage& image, double sigma) {
  if (sigma <= 0.0) return;
  image.values = blur_region(image, Rect{0, 0, image.width, image.height}, sigma);
}

// Crack color over the image, weighted by coverage and opacity.
void blend_crack(FloatImage& image, const CrackImage& crack, const std::vector<Rgb>& shading,
                 double alpha) {
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double coverage = crack.at(x, y);
      if (!(coverage > 0.0)) continue;
      const Rgb& color = shading[static_cast<std::size_t>(crack.owner(x, y))];
      const double a = alpha * coverage;
      for (int c = 0; c < 3; ++c) {
        image.at(x, y, c) = image.at(x, y, c) * (1.0 - a) + color[static_cast<std::size_t>(c)] * a;
      }
    }
  }
}

RgbImage to_rgb(const FloatImage& image) {
  RoundToNearest rounding;
  RgbImage out(image.width, image.height);
  for (std::size_t i = 0; i < image.values.size(); ++i) out.pixels[i] = to_byte(image.values[i]);
  return out;
}

void require_same_size(const RgbImage& image, const BinaryMask& mask) {
  if (image.width != mask.width || image.height != mask.height) {
    throw std::invalid_argument("image and mask dimensions differ");
  }
}

}  // namespace

RgbImage apply_focus(const RgbImage& image, const BinaryMask& mask, FocusMode mode,
                     double blur_sigma) {
  if (!(blur_sigma >= 0.0)) {
    throw std::invalid_argument("blur sigma must be non-negative");
  }
  if (blur_sigma == 0.0) return image;
  FloatImage work(image);
  if (mode == FocusMode::far_focus) {
    require_same_size(image, mask);
    blur_masked(work, mask, blur_sigma);
    return to_rgb(work);
  }
  blur_all(work, blur_sigma);
  return to_rgb(work);
}

OverlayResult composite(const RgbImage& source, const CrackImage& crack,
                        const std::vector<Rgb>& shading, const BinaryMask& mask,
                        const RenderConfig& config) {
  config.validate();
  require_same_size(source, mask);
  if (crack.width != source.width || crack.height != source.height) {
    throw std::invalid_argument("crack image and source dimensions differ");
  }
  for (std::int32_t owner : crack.edge_index) {
    if (owner >= static_cast<std::int32_t>(shading.size())) {
      throw std::invalid_argument("crack pixel refers to an edge without shading");
    }
  }

  const double sigma = config.effective_blur_sigma();
  FloatImage work(source);
  if (config.focus_mode == FocusMode::far_focus) {
    blend_crack(work, crack, shading, config.alpha);
    blur_masked(work, mask, sigma);
  } else {
    blur_all(work, sigma);
    blend_crack(work, crack, shading, config.alpha);
  }

  return OverlayResult{to_rgb(work), mask, shading};
}

}  // namespace glassfrac
