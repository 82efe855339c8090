#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "glassfrac/stress_sim.hpp"

namespace glassfrac {

namespace {

struct Branch {
  ParticleId node = 0;
  double stress = 0.0;
  Vec2 direction;
  int step = 0;
};

class Propagator {
 public:
  Propagator(const TriMesh& mesh, const NeighborIndex& index, const ImpactSpec& impact,
             double radius, double decay)
      : particles_(mesh.vertices()),
        index_(index),
        impact_(impact),
        radius_(radius),
        decay_(decay),
        visited_(particles_.size(), false) {}

  StressField run(int branch_k);

 private:
  std::vector<ParticleId> frontier(ParticleId node, double radius) const {
    std::vector<ParticleId> ids = index_.query_radius(particles_[node], radius);
    std::erase_if(ids, [&](ParticleId id) { return visited_[id]; });
    return ids;
  }

  std::vector<FrontierEntry> stress_update(ParticleId node, double sigma, Vec2 direction,
                                           const std::vector<ParticleId>& ids) {
    std::vector<FrontierEntry> entries;
    entries.reserve(ids.size());
    for (ParticleId id : ids) {
      const double s = edge_stress(sigma, particles_[node], particles_[id], direction);
      entries.push_back({id, s});
      double& held = field_.node_stress[id];
      held = std::max(held, std::abs(s) * decay_);
    }
    return entries;
  }

  void visit(ParticleId id, double stress) {
    visited_[id] = true;
    field_.visited.push_back(id);
    field_.node_stress[id] = stress;
  }

  // Chooses the continuation node among `entries` and records the hop.
  void advance(ParticleId parent, Vec2 direction,
               const std::vector<FrontierEntry>& entries, int step, std::vector<Branch>& next) {
    const ParticleId chosen = select_splitting_edge(entries);
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const FrontierEntry& e) { return e.id == chosen; });
    const double s = it->stress;
    // The negative side of the splitting plane won: travel against the vector.
    const Vec2 carried_vector = s < 0.0 ? -direction : direction;
    const double carried = std::abs(s) * decay_;
    const bool terminal =
        !(carried > 0.0 && carried >= impact_.stop_threshold - kConvergenceTolerance);

    visit(chosen, carried);
    field_.trace.push_back({parent, chosen, carried, step, carried_vector, terminal});
    if (!terminal) {
      next.push_back({chosen, carried, unit(particles_[chosen] - particles_[parent]), step});
    }
  }

  const ParticleSet& particles_;
  const NeighborIndex& index_;
  const ImpactSpec& impact_;
  double radius_;
  double decay_;
  std::vector<bool> visited_;
  StressField field_;
};

StressField Propagator::run(int branch_k) {
  field_.radius = radius_;
  const ParticleId root = index_.nearest(impact_.impact_point);
  field_.root = root;
  visit(root, impact_.force);

  // Only the impact node widens its search when nothing lies within R.
  const Extent& extent = particles_.extent();
  const double diagonal = std::hypot(extent.width, extent.height);
  double root_radius = radius_;
  std::vector<ParticleId> candidates = frontier(root, root_radius);
  while (candidates.empty() && root_radius < diagonal && particles_.size() > 1) {
    root_radius = root_radius > 0.0
                      ? std::min(2.0 * root_radius, diagonal)
                      : std::sqrt(extent.area() / static_cast<double>(particles_.size()));
    candidates = frontier(root, root_radius);
  }

  std::vector<Branch> active;
  for (int arm = 0; arm < branch_k; ++arm) {
    std::erase_if(candidates, [&](ParticleId id) { return visited_[id]; });
    if (candidates.empty()) break;
    const Vec2 arm_vector =
        arm == 0 ? impact_.impact_vector
                 : unit(rotate(impact_.impact_vector, 2.0 * std::numbers::pi * arm / branch_k));
    const auto entries = stress_update(root, impact_.force, arm_vector, candidates);
    advance(root, arm_vector, entries, 1, active);
  }

  // Branches advance one hop per round, in arm order.
  while (!active.empty()) {
    std::vector<Branch> next;
    for (const Branch& branch : active) {
      const std::vector<ParticleId> ids = frontier(branch.node, radius_);
      if (ids.empty()) continue;
      const auto entries = stress_update(branch.node, branch.stress, branch.direction, ids);
      advance(branch.node, branch.direction, entries, branch.step + 1, next);
    }
    active = std::move(next);
  }
  return std::move(field_);
}

}  // namespace

std::optional<int> StressField::visit_step(ParticleId id) const {
  if (root && *root == id) return 0;
  for (const TraceStep& t : trace) {
    if (t.child == id) return t.step;
  }
  return std::nullopt;
}

StressField propagate(const TriMesh& mesh, const NeighborIndex& index, const ImpactSpec& impact,
                      double radius, int branch_k, double decay) {
  impact.validate(mesh.extent());
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("propagation radius must be finite and non-negative");
  }
  if (branch_k < 1) {
    throw std::invalid_argument("branch count must be at least 1");
  }
  if (!(decay > 0.0 && decay < 1.0)) {
    throw std::invalid_argument("decay must lie in (0, 1)");
  }
  if (index.size() != mesh.vertices().size()) {
    throw std::invalid_argument("neighbor index was built for a different particle set");
  }

  if (!fracture_condition(impact.force, impact.critical_stress, impact.safety_factor)) {
    StressField field;
    field.radius = radius;
    return field;
  }
  return Propagator(mesh, index, impact, radius, decay).run(branch_k);
}

}  // namespace glassfrac
