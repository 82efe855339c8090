#include <algorithm>
#include <utility>

#include "glassfrac/spanning_tree.hpp"

namespace glassfrac {

std::vector<WeightedEdge> minimum_spanning_tree(std::size_t node_count,
                                                std::vector<WeightedEdge> edges) {
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    const auto ka = std::minmax(a.u, a.v);
    const auto kb = std::minmax(b.u, b.v);
    if (a.weight != b.weight) return a.weight < b.weight;
    return ka < kb;
  });

  DisjointSet sets(node_count);
  std::vector<WeightedEdge> tree;
  tree.reserve(node_count > 0 ? node_count - 1 : 0);
  for (const WeightedEdge& e : edges) {
    if (sets.unite(e.u, e.v)) {
      tree.push_back(e);
      if (tree.size() + 1 == node_count) break;
    }
  }
  return tree;
}

double total_weight(std::vector<WeightedEdge> edges) {
  std::sort(edges.begin(), edges.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) { return a.weight < b.weight; });
  double sum = 0.0;
  for (const WeightedEdge& e : edges) sum += e.weight;
  return sum;
}

}  // namespace glassfrac
