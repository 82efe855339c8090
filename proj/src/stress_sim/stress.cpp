#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "glassfrac/errors.hpp"
#include "glassfrac/stress_sim.hpp"

namespace glassfrac {

namespace {

constexpr double kUnitTolerance = 1e-9;

bool is_unit(Vec2 v) { return std::abs(norm(v) - 1.0) <= kUnitTolerance; }

}  // namespace

void ImpactSpec::validate(const Extent& extent) const {
  if (!is_unit(impact_vector)) {
    throw std::invalid_argument("impact vector must be unit length");
  }
  if (!extent.contains(impact_point)) {
    throw std::invalid_argument("impact point lies outside the mesh extent");
  }
  if (!(force >= 0.0)) {
    throw std::invalid_argument("impact force must be non-negative");
  }
  if (!(critical_stress > 0.0) || !(safety_factor > 0.0)) {
    throw std::invalid_argument("critical stress and safety factor must be positive");
  }
  if (!(stop_threshold >= 0.0)) {
    throw std::invalid_argument("stop threshold must be non-negative");
  }
}

bool fracture_condition(double sigma_v, double sigma_c, double safety) {
  if (!(sigma_c > 0.0) || !(safety > 0.0)) {
    throw std::invalid_argument("critical stress and safety factor must be positive");
  }
  return sigma_v > sigma_c / safety;
}

double edge_stress(double sigma_v, Point2 from, Point2 to, Vec2 impact_vector) {
  if (from == to) {
    throw DegenerateGeometryError("edge stress between coincident points");
  }
  if (!is_unit(impact_vector)) {
    throw std::invalid_argument("impact vector must be unit length");
  }
  const Vec2 d = to - from;
  // |n| is 1 within tolerance; dividing by it keeps |cos| <= 1 exactly.
  const double cosine = std::clamp(dot(d, impact_vector) / (norm(d) * norm(impact_vector)), -1.0, 1.0);
  return sigma_v * cosine;
}

StressSums summed_stress(std::span<const double> stresses) {
  StressSums sums;
  for (double s : stresses) {
    if (s > 0.0) {
      sums.positive += s;
    } else if (s < 0.0) {
      sums.negative += s;
    }
  }
  return sums;
}

ParticleId select_splitting_edge(std::span<const FrontierEntry> frontier) {
  if (frontier.empty()) {
    throw NoFrontierError("no candidate nodes to propagate into");
  }
  std::vector<double> stresses;
  stresses.reserve(frontier.size());
  for (const FrontierEntry& f : frontier) stresses.push_back(f.stress);
  const StressSums sums = summed_stress(stresses);

  const double pos = std::abs(sums.positive);
  const double neg = std::abs(sums.negative);
  auto in_winning_side = [&](double s) {
    if (pos > neg) return s > 0.0;
    if (neg > pos) return s < 0.0;
    return true;
  };

  const FrontierEntry* best = nullptr;
  for (const FrontierEntry& f : frontier) {
    if (!in_winning_side(f.stress)) continue;
    if (best == nullptr) {
      best = &f;
      continue;
    }
    const double m = std::abs(f.stress);
    const double bm = std::abs(best->stress);
    if (m > bm || (m == bm && f.id < best->id)) best = &f;
  }
  return best->id;
}

}  // namespace glassfrac
