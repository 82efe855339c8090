#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "glassfrac/mesh_gen.hpp"

namespace glassfrac {

namespace {

constexpr std::uint32_t kLeafSize = 8;

double coord(Point2 p, int axis) { return axis == 0 ? p.x : p.y; }

}  // namespace

NeighborIndex::NeighborIndex(const ParticleSet& particles)
    : points_(particles.positions().begin(), particles.positions().end()),
      order_(particles.size()) {
  if (points_.empty()) {
    throw std::invalid_argument("cannot index an empty particle set");
  }
  std::iota(order_.begin(), order_.end(), ParticleId{0});
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

std::int32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) {
    return index;
  }

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Point2 p = points_[order_[i]];
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int axis = (max_x - min_x) >= (max_y - min_y) ? 0 : 1;

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](ParticleId a, ParticleId b) {
                     const double ca = coord(points_[a], axis);
                     const double cb = coord(points_[b], axis);
                     return ca < cb || (ca == cb && a < b);
                   });

  const double split = coord(points_[order_[mid]], axis);
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(index)];
  node.split_axis = static_cast<std::int8_t>(axis);
  node.split_value = split;
  node.left = left;
  node.right = right;
  return index;
}

// Everything left of the split has coordinate <= split_value and everything
// right has coordinate >= split_value, so pruning uses non-strict bounds.
void NeighborIndex::collect(std::int32_t node_index, Point2 center, double radius_sq,
                            std::vector<ParticleId>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_index)];
  if (node.split_axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const ParticleId id = order_[i];
      if (squared_distance(points_[id], center) <= radius_sq) {
        out.push_back(id);
      }
    }
    return;
  }
  const double delta = coord(center, node.split_axis) - node.split_value;
  const double delta_sq = delta * delta;
  if (delta <= 0.0) {
    collect(node.left, center, radius_sq, out);
    if (delta_sq <= radius_sq) collect(node.right, center, radius_sq, out);
  } else {
    collect(node.right, center, radius_sq, out);
    if (delta_sq <= radius_sq) collect(node.left, center, radius_sq, out);
  }
}

std::vector<ParticleId> NeighborIndex::query_radius(Point2 center, double radius) const {
  if (!(radius >= 0.0)) {
    throw std::invalid_argument("query radius must be non-negative");
  }
  std::vector<ParticleId> out;
  collect(root_, center, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void NeighborIndex::search_nearest(std::int32_t node_index, Point2 center, ParticleId& best,
                                   double& best_sq) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_index)];
  if (node.split_axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const ParticleId id = order_[i];
      const double d = squared_distance(points_[id], center);
      if (d < best_sq || (d == best_sq && id < best)) {
        best_sq = d;
        best = id;
      }
    }
    return;
  }
  const double delta = coord(center, node.split_axis) - node.split_value;
  const std::int32_t near_side = delta <= 0.0 ? node.left : node.right;
  const std::int32_t far_side = delta <= 0.0 ? node.right : node.left;
  search_nearest(near_side, center, best, best_sq);
  if (delta * delta <= best_sq) {
    search_nearest(far_side, center, best, best_sq);
  }
}

ParticleId NeighborIndex::nearest(Point2 center) const {
  ParticleId best = std::numeric_limits<ParticleId>::max();
  double best_sq = std::numeric_limits<double>::infinity();
  search_nearest(root_, center, best, best_sq);
  return best;
}

NeighborIndex build_neighbor_index(const ParticleSet& particles) {
  return NeighborIndex(particles);
}

std::vector<ParticleId> query_radius(const NeighborIndex& index, Point2 center, double radius) {
  return index.query_radius(center, radius);
}

}  // namespace glassfrac
