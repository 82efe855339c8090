#pragma once

// Five-node propagation fixture traced by hand.
//
//        3 (-0.3, 1)
//
//   0 (0, 0) ---- 1 (1, 0) ---- 2 (2, 0.2)
//
//        4 (-0.3, -1)
//
// Coordinates are shifted by (5, 5) into a 10 x 10 frame. R = 1.2,
// force 500, stop threshold 470, decay 0.97, one branch.
//
// Hop 1 from node 0 with v = (1, 0): frontier {1, 3, 4} with stresses
//   500, -143.674, -143.674 -> q1 = 500 > |q2| = 287.35 -> node 1,
//   carried 500 * 0.97 = 485.
// Hop 2 from node 1 with v = (1, 0): frontier {2} (0 is visited, 3 and 4
//   lie 1.64 away) with stress 485 / sqrt(1.04) -> carried
//   485 / sqrt(1.04) * 0.97 = 461.31417887879337 < 470 -> terminal.
// Nodes 3 and 4 receive 143.674 * 0.97 = 139.36372449967752 but are never
// visited.

#include <vector>

#include "glassfrac/mesh_gen.hpp"
#include "glassfrac/stress_sim.hpp"

namespace fixture {

using namespace glassfrac;

inline constexpr double kRadius = 1.2;
inline constexpr double kStopThreshold = 470.0;
inline constexpr double kHop1Stress = 485.0;
inline constexpr double kHop2Stress = 461.31417887879337;
inline constexpr double kSideNodeStress = 139.36372449967752;

struct ExpectedStep {
  ParticleId parent;
  ParticleId child;
  double stress;
  int step;
  bool terminal;
};

inline const std::vector<ExpectedStep> kTrace = {
    {0, 1, kHop1Stress, 1, false},
    {1, 2, kHop2Stress, 2, true},
};

inline ParticleSet particles() {
  return ParticleSet({{5.0, 5.0}, {6.0, 5.0}, {7.0, 5.2}, {4.7, 6.0}, {4.7, 4.0}}, Extent{10.0, 10.0});
}

inline ImpactSpec impact(Vec2 direction = {1.0, 0.0}) {
  ImpactSpec out;
  out.impact_point = {5.0, 5.0};
  out.force = 500.0;
  out.impact_vector = direction;
  out.critical_stress = 300.0;
  out.safety_factor = 1.0;
  out.stop_threshold = kStopThreshold;
  return out;
}

}  // namespace fixture
