#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>

#include "glassfrac/errors.hpp"
#include "glassfrac/spanning_tree.hpp"
#include "glassfrac/stress_sim.hpp"

namespace glassfrac {

namespace {

std::vector<WeightedEdge> complete_graph(const std::vector<Point2>& nodes) {
  std::vector<WeightedEdge> edges;
  const auto n = static_cast<std::uint32_t>(nodes.size());
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      edges.push_back({i, j, distance(nodes[i], nodes[j])});
    }
  }
  return edges;
}

std::vector<WeightedEdge> radius_graph(const std::vector<Point2>& nodes, const Extent& extent,
                                       double radius) {
  const NeighborIndex index(ParticleSet(nodes, extent));
  std::vector<WeightedEdge> edges;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    for (ParticleId j : index.query_radius(nodes[i], radius)) {
      if (j > i) edges.push_back({i, j, distance(nodes[i], nodes[j])});
    }
  }
  return edges;
}

// Borůvka rounds over the complete graph, joining the forest's components by
// their shortest outgoing edges until one tree remains.
void bridge_components(const std::vector<Point2>& nodes, std::vector<WeightedEdge>& tree) {
  const std::size_t n = nodes.size();
  DisjointSet sets(n);
  for (const WeightedEdge& e : tree) sets.unite(e.u, e.v);

  while (tree.size() + 1 < n) {
    std::vector<WeightedEdge> best(n, {0, 0, std::numeric_limits<double>::infinity()});
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::size_t ci = sets.find(i);
      for (std::uint32_t j = i + 1; j < n; ++j) {
        const std::size_t cj = sets.find(j);
        if (ci == cj) continue;
        const double d = distance(nodes[i], nodes[j]);
        if (d < best[ci].weight) best[ci] = {i, j, d};
        if (d < best[cj].weight) best[cj] = {i, j, d};
      }
    }
    std::vector<WeightedEdge> candidates;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::isfinite(best[c].weight)) candidates.push_back(best[c]);
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      return a.weight < b.weight || (a.weight == b.weight && std::pair(a.u, a.v) < std::pair(b.u, b.v));
    });
    for (const WeightedEdge& e : candidates) {
      if (sets.unite(e.u, e.v)) tree.push_back(e);
    }
  }
}

}  // namespace

double CrackPattern::total_length() const {
  double sum = 0.0;
  for (const CrackEdge& e : edges) sum += distance(nodes[e.a], nodes[e.b]);
  return sum;
}

CrackPattern extract_crack_pattern(const StressField& field, const ParticleSet& particles,
                                   const ImpactSpec& impact) {
  CrackPattern pattern;
  pattern.impact_point = impact.impact_point;
  if (field.empty() || !field.root) {
    return pattern;
  }

  pattern.node_ids = field.visited;
  pattern.nodes.reserve(field.visited.size());
  for (ParticleId id : field.visited) pattern.nodes.push_back(particles[id]);
  const std::size_t n = pattern.nodes.size();

  std::vector<WeightedEdge> tree;
  if (n <= kCompleteGraphLimit) {
    tree = minimum_spanning_tree(n, complete_graph(pattern.nodes));
  } else {
    const double radius =
        field.radius > 0.0 ? field.radius : default_neighbor_radius(particles.extent(), particles.size());
    tree = minimum_spanning_tree(n, radius_graph(pattern.nodes, particles.extent(), radius));
    bridge_components(pattern.nodes, tree);
  }

  // Orient the tree away from the impact node, breadth first.
  std::vector<std::vector<std::uint32_t>> adjacency(n);
  for (const WeightedEdge& e : tree) {
    adjacency[e.u].push_back(e.v);
    adjacency[e.v].push_back(e.u);
  }
  for (auto& list : adjacency) std::sort(list.begin(), list.end());

  auto stress_of = [&](std::size_t node) { return field.node_stress.at(pattern.node_ids[node]); };
  std::vector<bool> seen(n, false);
  std::queue<std::uint32_t> queue;
  queue.push(0);
  seen[0] = true;
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop();
    for (std::uint32_t v : adjacency[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      pattern.edges.push_back({u, v, std::min(stress_of(u), stress_of(v))});
      queue.push(v);
    }
  }
  pattern.impact_node = 0;
  return pattern;
}

std::vector<CrackPattern> crack_frames(const StressField& field, const ParticleSet& particles,
                                       const ImpactSpec& impact, int frame_count) {
  if (frame_count < 1) {
    throw std::invalid_argument("frame count must be at least 1");
  }
  const CrackPattern full = extract_crack_pattern(field, particles, impact);
  if (full.empty()) {
    return std::vector<CrackPattern>(static_cast<std::size_t>(frame_count), full);
  }

  std::vector<std::int64_t> step_of(full.nodes.size(), 0);
  {
    std::map<ParticleId, int> steps;
    for (const TraceStep& t : field.trace) steps[t.child] = t.step;
    for (std::size_t i = 1; i < full.nodes.size(); ++i) step_of[i] = steps.at(full.node_ids[i]);
  }
  const auto max_step = static_cast<std::int64_t>(field.max_step());

  std::vector<std::vector<std::size_t>> children(full.nodes.size());
  for (const CrackEdge& e : full.edges) children[e.a].push_back(e.b);

  std::vector<CrackPattern> frames;
  frames.reserve(static_cast<std::size_t>(frame_count));
  for (int t = 1; t <= frame_count; ++t) {
    auto allowed = [&](std::size_t node) {
      return step_of[node] * frame_count <= static_cast<std::int64_t>(t) * max_step;
    };
    // Nodes reachable from the impact node through allowed nodes only.
    std::vector<bool> keep(full.nodes.size(), false);
    std::vector<std::size_t> stack{0};
    keep[0] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : children[u]) {
        if (!keep[v] && allowed(v)) {
          keep[v] = true;
          stack.push_back(v);
        }
      }
    }

    CrackPattern frame;
    frame.impact_point = full.impact_point;
    frame.impact_node = 0;
    std::vector<std::size_t> remap(full.nodes.size(), 0);
    for (std::size_t i = 0; i < full.nodes.size(); ++i) {
      if (!keep[i]) continue;
      remap[i] = frame.nodes.size();
      frame.nodes.push_back(full.nodes[i]);
      frame.node_ids.push_back(full.node_ids[i]);
    }
    for (const CrackEdge& e : full.edges) {
      if (keep[e.a] && keep[e.b]) frame.edges.push_back({remap[e.a], remap[e.b], e.stress});
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<CrackPattern> simulate_timesteps(const TriMesh& mesh, const NeighborIndex& index,
                                             const ImpactSpec& impact, double radius, int branch_k,
                                             int frame_count, double decay) {
  if (frame_count < 1) {
    throw std::invalid_argument("frame count must be at least 1");
  }
  const StressField field = propagate(mesh, index, impact, radius, branch_k, decay);
  return crack_frames(field, mesh.vertices(), impact, frame_count);
}

nlohmann::json pattern_to_json(const CrackPattern& pattern) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Point2& p : pattern.nodes) nodes.push_back({p.x, p.y});
  nlohmann::json edges = nlohmann::json::array();
  for (const CrackEdge& e : pattern.edges) edges.push_back({e.a, e.b, e.stress});
  return {{"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"impact", {pattern.impact_point.x, pattern.impact_point.y}}};
}

CrackPattern pattern_from_json(const nlohmann::json& doc) {
  CrackPattern pattern;
  try {
    for (const auto& node : doc.at("nodes")) {
      pattern.nodes.push_back({node.at(0).get<double>(), node.at(1).get<double>()});
    }
    for (const auto& edge : doc.at("edges")) {
      const auto a = edge.at(0).get<std::size_t>();
      const auto b = edge.at(1).get<std::size_t>();
      if (a >= pattern.nodes.size() || b >= pattern.nodes.size()) {
        throw ParseError("crack edge references a missing node", {});
      }
      pattern.edges.push_back({a, b, edge.at(2).get<double>()});
    }
    const auto& impact = doc.at("impact");
    pattern.impact_point = {impact.at(0).get<double>(), impact.at(1).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed crack pattern document: ") + e.what(), {});
  }
  pattern.node_ids.resize(pattern.nodes.size());
  for (std::size_t i = 0; i < pattern.node_ids.size(); ++i) {
    pattern.node_ids[i] = static_cast<ParticleId>(i);
  }
  pattern.impact_node = 0;
  return pattern;
}

}  // namespace glassfrac
