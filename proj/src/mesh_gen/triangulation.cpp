// Sweep-hull Delaunay triangulation: points are inserted in order of distance
// from a seed circumcenter, each insertion fans triangles onto the visible part
// of the convex hull, and Lawson flips restore the empty-circumcircle property.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "glassfrac/errors.hpp"
#include "glassfrac/mesh_gen.hpp"

namespace glassfrac {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::int64_t kNoHalfedge = -1;

// Positive when a, b, c turn counter-clockwise (y up).
double orientation(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

// Positive when d lies inside the circumcircle of the positively oriented a, b, c.
double in_circle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

double circumradius_sq(Point2 a, Point2 b, Point2 c) {
  const Point2 d = b - a;
  const Point2 e = c - a;
  const double bl = squared_norm(d);
  const double cl = squared_norm(e);
  const double det = cross(d, e);
  if (det == 0.0) return std::numeric_limits<double>::infinity();
  const double s = 0.5 / det;
  const double x = (e.y * bl - d.y * cl) * s;
  const double y = (d.x * cl - e.x * bl) * s;
  return x * x + y * y;
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 d = b - a;
  const Point2 e = c - a;
  const double bl = squared_norm(d);
  const double cl = squared_norm(e);
  const double s = 0.5 / cross(d, e);
  return {a.x + (e.y * bl - d.y * cl) * s, a.y + (d.x * cl - e.x * bl) * s};
}

// Monotone in angle around the center, in [0, 1).
double pseudo_angle(Point2 v) {
  const double p = v.x / (std::abs(v.x) + std::abs(v.y));
  return (v.y > 0.0 ? 3.0 - p : 1.0 + p) / 4.0;
}

// Triangles are stored as three consecutive halfedges; halfedge h starts at
// triangles[h] and its twin in the neighboring triangle is halfedges[h].
// Triangles are kept with negative orientation() during construction.
class SweepHull {
 public:
  explicit SweepHull(std::span<const Point2> points) : pts_(points) {}

  void run();

  std::vector<std::uint32_t> triangles;
  std::vector<std::int64_t> halfedges;
  std::vector<std::uint32_t> hull;

 private:
  std::size_t hash_key(Point2 p) const {
    const double a = pseudo_angle(p - center_);
    return static_cast<std::size_t>(std::floor(a * static_cast<double>(hash_size_))) % hash_size_;
  }

  void link(std::int64_t a, std::int64_t b) {
    halfedges[static_cast<std::size_t>(a)] = b;
    if (b != kNoHalfedge) halfedges[static_cast<std::size_t>(b)] = a;
  }

  std::int64_t add_triangle(std::uint32_t i0, std::uint32_t i1, std::uint32_t i2, std::int64_t a,
                            std::int64_t b, std::int64_t c) {
    const auto t = static_cast<std::int64_t>(triangles.size());
    triangles.insert(triangles.end(), {i0, i1, i2});
    halfedges.insert(halfedges.end(), {kNoHalfedge, kNoHalfedge, kNoHalfedge});
    link(t, a);
    link(t + 1, b);
    link(t + 2, c);
    return t;
  }

  std::int64_t legalize(std::int64_t a);

  std::span<const Point2> pts_;
  Point2 center_;
  std::size_t hash_size_ = 1;
  std::uint32_t hull_start_ = 0;
  std::vector<std::uint32_t> hull_prev_;
  std::vector<std::uint32_t> hull_next_;
  std::vector<std::int64_t> hull_tri_;
  std::vector<std::int64_t> hull_hash_;
  std::vector<std::int64_t> edge_stack_;
};

std::int64_t SweepHull::legalize(std::int64_t a) {
  auto at = [](std::int64_t h) { return static_cast<std::size_t>(h); };
  std::int64_t ar = 0;
  edge_stack_.clear();
  while (true) {
    const std::int64_t b = halfedges[at(a)];
    const std::int64_t a0 = a - a % 3;
    ar = a0 + (a + 2) % 3;

    if (b == kNoHalfedge) {
      if (edge_stack_.empty()) break;
      a = edge_stack_.back();
      edge_stack_.pop_back();
      continue;
    }

    const std::int64_t b0 = b - b % 3;
    const std::int64_t al = a0 + (a + 1) % 3;
    const std::int64_t bl = b0 + (b + 2) % 3;

    const std::uint32_t p0 = triangles[at(ar)];
    const std::uint32_t pr = triangles[at(a)];
    const std::uint32_t pl = triangles[at(al)];
    const std::uint32_t p1 = triangles[at(bl)];

    // (p0, pr, pl) has negative orientation, so inside means in_circle < 0.
    const bool illegal = in_circle(pts_[p0], pts_[pr], pts_[pl], pts_[p1]) < 0.0;
    if (illegal) {
      triangles[at(a)] = p1;
      triangles[at(b)] = p0;

      const std::int64_t hbl = halfedges[at(bl)];
      if (hbl == kNoHalfedge) {
        // The flipped edge was on the hull; repoint the hull triangle.
        std::uint32_t e = hull_start_;
        do {
          if (hull_tri_[e] == bl) {
            hull_tri_[e] = a;
            break;
          }
          e = hull_prev_[e];
        } while (e != hull_start_);
      }
      link(a, hbl);
      link(b, halfedges[at(ar)]);
      link(ar, bl);

      const std::int64_t br = b0 + (b + 1) % 3;
      edge_stack_.push_back(br);
    } else {
      if (edge_stack_.empty()) break;
      a = edge_stack_.back();
      edge_stack_.pop_back();
    }
  }
  return ar;
}

void SweepHull::run() {
  const std::size_t n = pts_.size();
  if (n < 3) {
    throw DegenerateGeometryError("triangulation needs at least 3 points");
  }

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const Point2& p : pts_) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const Point2 box_center{(min_x + max_x) / 2.0, (min_y + max_y) / 2.0};

  // Seed triangle: point nearest the bounding-box center, its nearest
  // neighbor, and the third point giving the smallest circumcircle.
  std::uint32_t i0 = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < n; ++i) {
    const double d = squared_distance(box_center, pts_[i]);
    if (d < best) {
      i0 = i;
      best = d;
    }
  }
  std::uint32_t i1 = kNone;
  best = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (i == i0) continue;
    const double d = squared_distance(pts_[i0], pts_[i]);
    if (d < best && d > 0.0) {
      i1 = i;
      best = d;
    }
  }
  std::uint32_t i2 = kNone;
  double min_radius = std::numeric_limits<double>::infinity();
  if (i1 != kNone) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (i == i0 || i == i1) continue;
      const double r = circumradius_sq(pts_[i0], pts_[i1], pts_[i]);
      if (r < min_radius) {
        i2 = i;
        min_radius = r;
      }
    }
  }
  if (i2 == kNone || !std::isfinite(min_radius)) {
    throw DegenerateGeometryError("all points are collinear");
  }
  if (orientation(pts_[i0], pts_[i1], pts_[i2]) > 0.0) {
    std::swap(i1, i2);
  }

  center_ = circumcenter(pts_[i0], pts_[i1], pts_[i2]);

  std::vector<double> dists(n);
  for (std::size_t i = 0; i < n; ++i) dists[i] = squared_distance(pts_[i], center_);
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    return dists[a] < dists[b] || (dists[a] == dists[b] && a < b);
  });

  hash_size_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  hull_prev_.assign(n, 0);
  hull_next_.assign(n, 0);
  hull_tri_.assign(n, 0);
  hull_hash_.assign(hash_size_, -1);

  hull_start_ = i0;
  hull_next_[i0] = hull_prev_[i2] = i1;
  hull_next_[i1] = hull_prev_[i0] = i2;
  hull_next_[i2] = hull_prev_[i1] = i0;
  hull_tri_[i0] = 0;
  hull_tri_[i1] = 1;
  hull_tri_[i2] = 2;
  hull_hash_[hash_key(pts_[i0])] = i0;
  hull_hash_[hash_key(pts_[i1])] = i1;
  hull_hash_[hash_key(pts_[i2])] = i2;

  const std::size_t max_triangles = 2 * n - 5;
  triangles.reserve(max_triangles * 3);
  halfedges.reserve(max_triangles * 3);
  add_triangle(i0, i1, i2, kNoHalfedge, kNoHalfedge, kNoHalfedge);

  for (std::uint32_t i : ids) {
    if (i == i0 || i == i1 || i == i2) continue;
    const Point2 p = pts_[i];

    // Find a hull vertex near p's angular position, then walk to a visible edge.
    std::uint32_t start = 0;
    const std::size_t key = hash_key(p);
    for (std::size_t j = 0; j < hash_size_; ++j) {
      const std::int64_t s = hull_hash_[(key + j) % hash_size_];
      if (s != -1 && static_cast<std::uint32_t>(s) != hull_next_[static_cast<std::size_t>(s)]) {
        start = static_cast<std::uint32_t>(s);
        break;
      }
    }
    start = hull_prev_[start];
    std::uint32_t e = start;
    std::uint32_t q = hull_next_[e];
    bool visible = true;
    while (orientation(p, pts_[e], pts_[q]) <= 0.0) {
      e = q;
      if (e == start) {
        visible = false;
        break;
      }
      q = hull_next_[e];
    }
    if (!visible) continue;  // numerically on the hull of existing points

    std::int64_t t = add_triangle(e, i, hull_next_[e], kNoHalfedge, kNoHalfedge, hull_tri_[e]);
    hull_tri_[i] = legalize(t + 2);
    hull_tri_[e] = t;

    std::uint32_t nxt = hull_next_[e];
    q = hull_next_[nxt];
    while (orientation(p, pts_[nxt], pts_[q]) > 0.0) {
      t = add_triangle(nxt, i, q, hull_tri_[i], kNoHalfedge, hull_tri_[nxt]);
      hull_tri_[i] = legalize(t + 2);
      hull_next_[nxt] = nxt;  // removed from hull
      nxt = q;
      q = hull_next_[nxt];
    }

    if (e == start) {
      q = hull_prev_[e];
      while (orientation(p, pts_[q], pts_[e]) > 0.0) {
        t = add_triangle(q, i, e, kNoHalfedge, hull_tri_[e], hull_tri_[q]);
        legalize(t + 2);
        hull_tri_[q] = t;
        hull_next_[e] = e;
        e = q;
        q = hull_prev_[e];
      }
    }

    hull_start_ = hull_prev_[i] = e;
    hull_next_[e] = hull_prev_[nxt] = i;
    hull_next_[i] = nxt;
    hull_hash_[hash_key(p)] = i;
    hull_hash_[hash_key(pts_[e])] = e;
  }

  std::uint32_t e = hull_start_;
  do {
    hull.push_back(e);
    e = hull_next_[e];
  } while (e != hull_start_);
}

MeshEdge ordered(ParticleId a, ParticleId b) { return a < b ? MeshEdge{a, b} : MeshEdge{b, a}; }

}  // namespace

TriMesh::TriMesh(ParticleSet vertices, std::vector<MeshEdge> edges,
                 std::vector<MeshTriangle> triangles, std::vector<MeshEdge> boundary)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)) {
  const std::size_t n = vertices_.size();
  adjacency_offsets_.assign(n + 1, 0);
  for (const MeshEdge& e : edges_) {
    ++adjacency_offsets_[e[0] + 1];
    ++adjacency_offsets_[e[1] + 1];
  }
  std::partial_sum(adjacency_offsets_.begin(), adjacency_offsets_.end(),
                   adjacency_offsets_.begin());
  adjacency_.resize(adjacency_offsets_.back());
  std::vector<std::uint32_t> fill(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (const MeshEdge& e : edges_) {
    adjacency_[fill[e[0]]++] = e[1];
    adjacency_[fill[e[1]]++] = e[0];
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adjacency_.begin() + adjacency_offsets_[v],
              adjacency_.begin() + adjacency_offsets_[v + 1]);
  }
}

std::span<const ParticleId> TriMesh::neighbors(ParticleId id) const {
  return std::span<const ParticleId>(adjacency_).subspan(
      adjacency_offsets_[id], adjacency_offsets_[id + 1] - adjacency_offsets_[id]);
}

TriMesh triangulate(const ParticleSet& particles) {
  SweepHull sweep(particles.positions());
  sweep.run();

  std::vector<MeshTriangle> triangles;
  triangles.reserve(sweep.triangles.size() / 3);
  std::vector<MeshEdge> edges;
  edges.reserve(sweep.triangles.size() / 2 + 1);
  for (std::size_t t = 0; t < sweep.triangles.size(); t += 3) {
    const ParticleId a = sweep.triangles[t];
    const ParticleId b = sweep.triangles[t + 1];
    const ParticleId c = sweep.triangles[t + 2];
    // Stored clockwise (y up); flip to positive orientation.
    triangles.push_back({a, c, b});
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t h = t + k;
      const std::int64_t twin = sweep.halfedges[h];
      // Each interior edge is seen twice; keep the copy from the larger halfedge.
      if (twin == kNoHalfedge || static_cast<std::int64_t>(h) > twin) {
        edges.push_back(ordered(sweep.triangles[h], sweep.triangles[t + (k + 1) % 3]));
      }
    }
  }
  std::sort(edges.begin(), edges.end());

  std::vector<MeshEdge> boundary;
  boundary.reserve(sweep.hull.size());
  for (std::size_t k = 0; k < sweep.hull.size(); ++k) {
    boundary.push_back(ordered(sweep.hull[k], sweep.hull[(k + 1) % sweep.hull.size()]));
  }
  std::sort(boundary.begin(), boundary.end());

  std::vector<bool> covered(particles.size(), false);
  for (const MeshTriangle& t : triangles) {
    for (ParticleId v : t) covered[v] = true;
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    // Only reachable when a point lies exactly on a hull edge during the sweep.
    throw DegenerateGeometryError("triangulation dropped a point lying on the convex hull");
  }

  return TriMesh(particles, std::move(edges), std::move(triangles), std::move(boundary));
}

nlohmann::json mesh_to_json(const TriMesh& mesh) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const Point2& p : mesh.vertices().positions()) vertices.push_back({p.x, p.y});
  nlohmann::json edges = nlohmann::json::array();
  for (const MeshEdge& e : mesh.edges()) edges.push_back({e[0], e[1]});
  nlohmann::json triangles = nlohmann::json::array();
  for (const MeshTriangle& t : mesh.triangles()) triangles.push_back({t[0], t[1], t[2]});
  return {{"vertices", std::move(vertices)},
          {"edges", std::move(edges)},
          {"triangles", std::move(triangles)}};
}

}  // namespace glassfrac
