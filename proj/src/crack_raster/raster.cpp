#include <algorithm>
#include <cfenv>
#include <cmath>
#include <stdexcept>

#include "glassfrac/crack_raster.hpp"

namespace glassfrac {

namespace {

// Hops from each node to the deepest leaf below it, rooted at the impact node.
std::vector<int> subtree_heights(const CrackPattern& pattern) {
  const std::size_t n = pattern.nodes.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const CrackEdge& e : pattern.edges) {
    adjacency[e.a].push_back(e.b);
    adjacency[e.b].push_back(e.a);
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> parent(n, n);
  std::vector<bool> seen(n, false);
  order.reserve(n);
  order.push_back(pattern.impact_node);
  seen[pattern.impact_node] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t v : adjacency[order[i]]) {
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = order[i];
      order.push_back(v);
    }
  }
  std::vector<int> height(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (parent[*it] != n) height[parent[*it]] = std::max(height[parent[*it]], height[*it] + 1);
  }
  return height;
}

void draw_segment(CrackImage& image, Point2 a, Point2 b, double radius_a, double radius_b,
                  std::int32_t edge) {
  const double reach = std::max(radius_a, radius_b) + 1.0;
  // Clamp in floating point first so far out-of-frame nodes cannot overflow int.
  auto pixel = [](double v, int hi) {
    return static_cast<int>(std::clamp(v, -1.0, static_cast<double>(hi) + 1.0));
  };
  const int x0 = std::max(0, pixel(std::floor(std::min(a.x, b.x) - reach), image.width));
  const int x1 = std::min(image.width - 1, pixel(std::ceil(std::max(a.x, b.x) + reach), image.width));
  const int y0 = std::max(0, pixel(std::floor(std::min(a.y, b.y) - reach), image.height));
  const int y1 = std::min(image.height - 1, pixel(std::ceil(std::max(a.y, b.y) + reach), image.height));
  if (x0 > x1 || y0 > y1) return;

  const Vec2 ab = b - a;
  const double len_sq = squared_norm(ab);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Point2 p{x + 0.5, y + 0.5};
      const double t = len_sq > 0.0 ? std::clamp(dot(p - a, ab) / len_sq, 0.0, 1.0) : 0.0;
      const double d = distance(p, a + t * ab);
      const double radius = radius_a + t * (radius_b - radius_a);
      // Linear ramp over one pixel around the stroke boundary; integrates to
      // the exact stroke area across a straight edge.
      const double coverage = std::clamp(radius + 0.5 - d, 0.0, 1.0);
      if (coverage <= 0.0) continue;
      const std::size_t i = static_cast<std::size_t>(y) * image.width + x;
      const auto c = static_cast<float>(coverage);
      if (c > image.intensity[i]) {
        image.intensity[i] = c;
        image.edge_index[i] = edge;
      }
    }
  }
}

}  // namespace

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

CrackImage rasterize(const CrackPattern& pattern, int width, int height,
                     const RasterOptions& options) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("raster dimensions must be positive");
  }
  if (!(options.stroke_width >= 1.0)) {
    throw std::invalid_argument("stroke width must be at least 1 px");
  }
  CrackImage image;
  image.width = width;
  image.height = height;
  image.stroke_width = options.stroke_width;
  image.intensity.assign(static_cast<std::size_t>(width) * height, 0.0f);
  image.edge_index.assign(static_cast<std::size_t>(width) * height, -1);
  if (pattern.empty() || pattern.edges.empty()) {
    return image;
  }

  const std::vector<int> heights = subtree_heights(pattern);
  const int root_height = heights[pattern.impact_node];
  auto stroke_at = [&](std::size_t node) {
    if (!options.taper || root_height == 0) return options.stroke_width;
    return 1.0 + (options.stroke_width - 1.0) * heights[node] / root_height;
  };

  for (std::size_t e = 0; e < pattern.edges.size(); ++e) {
    const CrackEdge& edge = pattern.edges[e];
    draw_segment(image, pattern.nodes[edge.a], pattern.nodes[edge.b], stroke_at(edge.a) / 2.0,
                 stroke_at(edge.b) / 2.0, static_cast<std::int32_t>(e));
  }
  return image;
}

BinaryMask crack_mask(const CrackImage& image, int dilation) {
  if (dilation < 0) {
    throw std::invalid_argument("mask dilation must be non-negative");
  }
  BinaryMask mask(image.width, image.height);
  std::vector<std::pair<int, int>> disk;
  for (int dy = -dilation; dy <= dilation; ++dy) {
    for (int dx = -dilation; dx <= dilation; ++dx) {
      if (dx * dx + dy * dy <= dilation * dilation) disk.emplace_back(dx, dy);
    }
  }
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (!(image.at(x, y) > 0.0f)) continue;
      for (const auto& [dx, dy] : disk) {
        const int u = x + dx;
        const int v = y + dy;
        if (u >= 0 && u < image.width && v >= 0 && v < image.height) mask.set(u, v, true);
      }
    }
  }
  return mask;
}

GrayImage crack_to_gray(const CrackImage& image) {
  GrayImage gray(image.width, image.height);
  const int old_mode = std::fegetround();
  std::fesetround(FE_TONEAREST);
  for (std::size_t i = 0; i < image.intensity.size(); ++i) {
    gray.pixels[i] = static_cast<std::uint8_t>(std::nearbyint(255.0 * image.intensity[i]));
  }
  std::fesetround(old_mode);
  return gray;
}

GrayImage mask_to_gray(const BinaryMask& mask) {
  GrayImage gray(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) gray.pixels[i] = mask.bits[i] ? 255 : 0;
  return gray;
}

BinaryMask mask_from_gray(const GrayImage& gray) {
  BinaryMask mask(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) mask.bits[i] = gray.pixels[i] != 0 ? 1 : 0;
  return mask;
}

}  // namespace glassfrac
