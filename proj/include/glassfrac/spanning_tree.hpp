#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

namespace glassfrac {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// False when a and b were already joined.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double weight = 0.0;
};

/// Kruskal. Equal weights are ordered by (min endpoint, max endpoint) so the
/// result is deterministic. Returns a spanning forest if the graph is
/// disconnected.
std::vector<WeightedEdge> minimum_spanning_tree(std::size_t node_count,
                                                std::vector<WeightedEdge> edges);

/// Sum of weights in ascending order, so equal edge sets give equal totals
/// regardless of their order.
double total_weight(std::vector<WeightedEdge> edges);

}  // namespace glassfrac
