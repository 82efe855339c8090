#pragma once

// Impact stress propagation over a particle mesh and extraction of the final
// crack as a minimum spanning tree over the stressed nodes.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "glassfrac/geometry.hpp"
#include "glassfrac/mesh_gen.hpp"

namespace glassfrac {

inline constexpr double kDefaultForce = 500.0;
inline constexpr double kDefaultStopThreshold = 300.0;
inline constexpr double kDefaultCriticalStress = 300.0;
inline constexpr double kDefaultSafetyFactor = 1.0;
inline constexpr double kDefaultDecay = 0.97;
inline constexpr int kDefaultBranchCount = 3;
/// Carried stress within this distance below the stop threshold still propagates.
inline constexpr double kConvergenceTolerance = 1e-6;
/// Visited-node count above which the crack MST is built on the radius graph
/// instead of the complete graph.
inline constexpr std::size_t kCompleteGraphLimit = 2000;

struct ImpactSpec {
  Point2 impact_point;
  double force = kDefaultForce;
  Vec2 impact_vector{1.0, 0.0};
  double critical_stress = kDefaultCriticalStress;
  double safety_factor = kDefaultSafetyFactor;
  double stop_threshold = kDefaultStopThreshold;

  /// Throws std::invalid_argument on a non-unit impact vector, a point outside
  /// `extent`, or out-of-range material parameters.
  void validate(const Extent& extent) const;
};

/// One hop of the crack front.
struct TraceStep {
  ParticleId parent = 0;
  ParticleId child = 0;
  /// Stress carried into `child`.
  double stress = 0.0;
  /// Hop count from the impact node (its direct children are step 1).
  int step = 0;
  /// Direction the hop was evaluated against, after any sign flip of the
  /// splitting side. The hop direction always has a non-negative cosine with it.
  Vec2 carried_vector;
  /// Below the stop threshold: the crack arrests at `child`.
  bool terminal = false;
};

struct StressField {
  /// Particle nearest the impact point; empty when the fracture condition fails.
  std::optional<ParticleId> root;
  /// Stress for every node reached by a stress update. Visited nodes hold the
  /// stress they carried when visited.
  std::map<ParticleId, double> node_stress;
  /// Visited nodes in visit order, root first.
  std::vector<ParticleId> visited;
  std::vector<TraceStep> trace;
  /// Neighborhood radius the field was propagated with.
  double radius = 0.0;

  bool empty() const noexcept { return trace.empty(); }
  int max_step() const noexcept { return trace.empty() ? 0 : trace.back().step; }
  /// Step at which `id` was visited (root: 0); nullopt if never visited.
  std::optional<int> visit_step(ParticleId id) const;
};

struct CrackEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double stress = 0.0;
};

/// Tree over stressed nodes. Node 0 is the impact node when the pattern is
/// nonempty; node_ids maps nodes back to particles.
struct CrackPattern {
  std::vector<Point2> nodes;
  std::vector<ParticleId> node_ids;
  std::vector<CrackEdge> edges;
  std::size_t impact_node = 0;
  Point2 impact_point;

  bool empty() const noexcept { return nodes.empty(); }
  double total_length() const;
};

/// Strict sigma_v > sigma_c / safety. Throws std::invalid_argument when
/// sigma_c or safety is not positive.
bool fracture_condition(double sigma_v, double sigma_c, double safety);

/// sigma_v * cos(angle between to - from and impact_vector).
/// Throws DegenerateGeometryError when from == to and std::invalid_argument
/// for a non-unit impact vector.
double edge_stress(double sigma_v, Point2 from, Point2 to, Vec2 impact_vector);

struct StressSums {
  double positive = 0.0;  // q1
  double negative = 0.0;  // q2, <= 0
};

StressSums summed_stress(std::span<const double> stresses);

struct FrontierEntry {
  ParticleId id = 0;
  double stress = 0.0;
};

/// Picks the side of the splitting plane with the larger summed stress
/// magnitude and returns its member with the largest |stress|. On equal sums
/// both sides compete. Remaining ties go to the lowest id.
/// Throws NoFrontierError for an empty frontier.
ParticleId select_splitting_edge(std::span<const FrontierEntry> frontier);

/// Propagates the impact through the mesh. The impact snaps to the nearest
/// particle; up to `branch_k` radial arms leave the impact node and each arm
/// continues as a single path. A hop carries
///   stress * |cos| * decay
/// and a branch stops once that drops below the stop threshold (the arresting
/// node is still recorded as a terminal step) or its frontier is empty.
///
/// Returns an empty field when the fracture condition fails. Throws
/// std::invalid_argument for an impact outside the mesh extent or invalid
/// radius / branch count / decay.
StressField propagate(const TriMesh& mesh, const NeighborIndex& index, const ImpactSpec& impact,
                      double radius, int branch_k = kDefaultBranchCount,
                      double decay = kDefaultDecay);

/// Minimum spanning tree over the visited nodes of `field`, Euclidean weights.
/// Edge stress is the smaller carried stress of the two endpoints.
CrackPattern extract_crack_pattern(const StressField& field, const ParticleSet& particles,
                                   const ImpactSpec& impact);

/// Growth frames of the crack. Frame t (1-based) keeps nodes visited at a step
/// s with s * frame_count <= t * max_step and takes the subtree of the final
/// pattern spanned from the impact node by those nodes. Frames only grow and the
/// last one equals extract_crack_pattern(field).
std::vector<CrackPattern> crack_frames(const StressField& field, const ParticleSet& particles,
                                       const ImpactSpec& impact, int frame_count);

/// propagate + crack_frames. Throws std::invalid_argument for frame_count < 1.
std::vector<CrackPattern> simulate_timesteps(const TriMesh& mesh, const NeighborIndex& index,
                                             const ImpactSpec& impact, double radius, int branch_k,
                                             int frame_count, double decay = kDefaultDecay);

/// {nodes: [[x,y],...], edges: [[i,j,stress],...], impact: [x,y]}
nlohmann::json pattern_to_json(const CrackPattern& pattern);
/// Inverse of pattern_to_json; node_ids are not part of the format and come
/// back as 0..n-1. Throws ParseError on malformed documents.
CrackPattern pattern_from_json(const nlohmann::json& doc);

}  // namespace glassfrac
