#pragma once

// Glass sheet discretization: particle sampling, fixed-radius neighbor
// queries and the Delaunay mesh the stress field propagates through.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "glassfrac/geometry.hpp"

namespace glassfrac {

using ParticleId = std::uint32_t;

/// Particle positions inside a [0, width) x [0, height) frame.
class ParticleSet {
 public:
  ParticleSet() = default;

  /// Throws std::invalid_argument if a position lies outside `extent` or two
  /// positions coincide.
  ParticleSet(std::vector<Point2> positions, Extent extent, std::uint64_t seed = 0);

  std::span<const Point2> positions() const noexcept { return positions_; }
  const Point2& operator[](ParticleId id) const { return positions_[id]; }
  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  const Extent& extent() const noexcept { return extent_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::vector<Point2> positions_;
  Extent extent_;
  std::uint64_t seed_ = 0;
};

/// `count` distinct uniform samples over `extent`, reproducible per seed.
/// Throws std::invalid_argument for count < 3 or a zero-area extent.
ParticleSet sample_particles(std::size_t count, Extent extent, std::uint64_t seed);

/// 1.5 x the expected nearest-neighbor spacing sqrt(area / count).
double default_neighbor_radius(Extent extent, std::size_t count);

/// Static 2D kd-tree over a particle set. Radius queries are exact: a particle
/// is reported iff its squared distance to the center is <= R * R.
class NeighborIndex {
 public:
  explicit NeighborIndex(const ParticleSet& particles);

  /// Ids within distance `radius` of `center`, ascending.
  /// Throws std::invalid_argument for a negative radius.
  std::vector<ParticleId> query_radius(Point2 center, double radius) const;

  /// Closest particle to `center`; ties go to the lowest id.
  ParticleId nearest(Point2 center) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    // Leaf when split_axis < 0: items [begin, end) of order_.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int8_t split_axis = -1;
    double split_value = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void collect(std::int32_t node, Point2 center, double radius_sq,
               std::vector<ParticleId>& out) const;
  void search_nearest(std::int32_t node, Point2 center, ParticleId& best,
                      double& best_sq) const;

  std::vector<Point2> points_;
  std::vector<ParticleId> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

/// Throws std::invalid_argument when `particles` is empty.
NeighborIndex build_neighbor_index(const ParticleSet& particles);

/// Free-function form of NeighborIndex::query_radius.
std::vector<ParticleId> query_radius(const NeighborIndex& index, Point2 center, double radius);

using MeshEdge = std::array<ParticleId, 2>;
using MeshTriangle = std::array<ParticleId, 3>;

/// Delaunay triangulation of a particle set. Edges are stored with the lower
/// id first and sorted; every triangle has positive signed area
/// cross(b - a, c - a) > 0. Convex-hull segments are the constrained boundary
/// edges.
class TriMesh {
 public:
  TriMesh(ParticleSet vertices, std::vector<MeshEdge> edges,
          std::vector<MeshTriangle> triangles, std::vector<MeshEdge> boundary);

  const ParticleSet& vertices() const noexcept { return vertices_; }
  const std::vector<MeshEdge>& edges() const noexcept { return edges_; }
  const std::vector<MeshTriangle>& triangles() const noexcept { return triangles_; }
  const std::vector<MeshEdge>& boundary_edges() const noexcept { return boundary_; }
  const Extent& extent() const noexcept { return vertices_.extent(); }

  /// Mesh-adjacent vertices of `id`, ascending.
  std::span<const ParticleId> neighbors(ParticleId id) const;

 private:
  ParticleSet vertices_;
  std::vector<MeshEdge> edges_;
  std::vector<MeshTriangle> triangles_;
  std::vector<MeshEdge> boundary_;
  std::vector<std::uint32_t> adjacency_offsets_;
  std::vector<ParticleId> adjacency_;
};

/// Throws DegenerateGeometryError when fewer than three non-collinear points
/// are supplied.
TriMesh triangulate(const ParticleSet& particles);

/// {vertices: [[x,y],...], edges: [[i,j],...], triangles: [[i,j,k],...]}
nlohmann::json mesh_to_json(const TriMesh& mesh);

}  // namespace glassfrac
