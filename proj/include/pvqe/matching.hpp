// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace pvqe::matching {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  std::int64_t weight = 0;
};

/// Maximum-weight matching on a general undirected graph with vertices
/// 0..n-1 (Edmonds' blossom algorithm with dual variables, O(n^3)).
/// Integer weights keep every dual update exact. Cardinality is not forced:
/// edges with non-positive weight are never worth matching.
///
/// Returns mate[v], the vertex matched to v, or -1.
std::vector<int> max_weight_matching(int n, const std::vector<WeightedEdge>& edges);

/// Sum of weights of the matched edges described by `mate`.
std::int64_t matching_weight(const std::vector<int>& mate, const std::vector<WeightedEdge>& edges);

}  // namespace pvqe::matching
