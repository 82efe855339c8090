#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "glassfrac/mesh_gen.hpp"
#include "glassfrac/rng.hpp"

namespace glassfrac {

namespace {

struct PointBitsHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    return std::hash<std::uint64_t>{}(p.first * 0x9E3779B97F4A7C15ull ^ p.second);
  }
};

using PointKey = std::pair<std::uint64_t, std::uint64_t>;

PointKey key_of(Point2 p) {
  // +0.0 and -0.0 compare equal but differ in bits; positions are >= 0 and
  // any -0.0 is normalized here.
  return {std::bit_cast<std::uint64_t>(p.x + 0.0), std::bit_cast<std::uint64_t>(p.y + 0.0)};
}

void require_extent(Extent extent) {
  if (!(extent.width > 0.0) || !(extent.height > 0.0) || !std::isfinite(extent.area())) {
    throw std::invalid_argument("particle extent must have positive finite area");
  }
}

}  // namespace

ParticleSet::ParticleSet(std::vector<Point2> positions, Extent extent, std::uint64_t seed)
    : positions_(std::move(positions)), extent_(extent), seed_(seed) {
  require_extent(extent_);
  std::unordered_set<PointKey, PointBitsHash> seen;
  seen.reserve(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!extent_.contains(positions_[i])) {
      throw std::invalid_argument("particle " + std::to_string(i) + " lies outside the extent");
    }
    if (!seen.insert(key_of(positions_[i])).second) {
      throw std::invalid_argument("particle " + std::to_string(i) + " duplicates an earlier one");
    }
  }
}

ParticleSet sample_particles(std::size_t count, Extent extent, std::uint64_t seed) {
  if (count < 3) {
    throw std::invalid_argument("sample_particles needs at least 3 particles");
  }
  require_extent(extent);

  Rng rng(seed);
  std::vector<Point2> positions;
  positions.reserve(count);
  std::unordered_set<PointKey, PointBitsHash> seen;
  seen.reserve(count);

  const double max_x = std::nextafter(extent.width, 0.0);
  const double max_y = std::nextafter(extent.height, 0.0);
  while (positions.size() < count) {
    Point2 p{rng.uniform01() * extent.width, rng.uniform01() * extent.height};
    // Rounding in the product can land exactly on the open upper bound.
    p.x = std::min(p.x, max_x);
    p.y = std::min(p.y, max_y);
    if (seen.insert(key_of(p)).second) {
      positions.push_back(p);
    }
  }
  return ParticleSet(std::move(positions), extent, seed);
}

double default_neighbor_radius(Extent extent, std::size_t count) {
  if (count == 0) {
    throw std::invalid_argument("default_neighbor_radius needs a positive particle count");
  }
  return 1.5 * std::sqrt(extent.area() / static_cast<double>(count));
}

}  // namespace glassfrac
