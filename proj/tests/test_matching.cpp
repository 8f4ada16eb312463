// SPDX-License-Identifier: Apache-2.0
#include "pvqe/matching.hpp"
#include "pvqe/rng.hpp"

#include <doctest.h>

#include <functional>

using namespace pvqe;
using matching::WeightedEdge;

namespace {

// Exhaustive search over all matchings.
std::int64_t brute_force(int n, const std::vector<WeightedEdge>& edges) {
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<std::int64_t(std::size_t)> best = [&](std::size_t i) -> std::int64_t {
    if (i == edges.size()) return 0;
    std::int64_t skip = best(i + 1);
    const auto& e = edges[i];
    if (!used[e.u] && !used[e.v]) {
      used[e.u] = used[e.v] = true;
      skip = std::max(skip, e.weight + best(i + 1));
      used[e.u] = used[e.v] = false;
    }
    return skip;
  };
  return best(0);
}

bool consistent(const std::vector<int>& mate, const std::vector<WeightedEdge>& edges) {
  for (std::size_t v = 0; v < mate.size(); ++v) {
    const int m = mate[v];
    if (m < 0) continue;
    if (mate[static_cast<std::size_t>(m)] != static_cast<int>(v)) return false;
    bool is_edge = false;
    for (const auto& e : edges)
      is_edge |= (e.u == static_cast<int>(v) && e.v == m) || (e.v == static_cast<int>(v) && e.u == m);
    if (!is_edge) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("small fixed graphs") {
  CHECK(matching::max_weight_matching(0, {}).empty());
  CHECK(matching::max_weight_matching(3, {}) == std::vector<int>{-1, -1, -1});

  const std::vector<WeightedEdge> one{{0, 1, 5}};
  CHECK(matching::max_weight_matching(2, one) == std::vector<int>{1, 0});

  // Path a-b-c-d: the two outer edges beat the heavy middle one.
  const std::vector<WeightedEdge> path{{0, 1, 6}, {1, 2, 10}, {2, 3, 6}};
  const auto m = matching::max_weight_matching(4, path);
  CHECK(matching::matching_weight(m, path) == 12);

  // Negative weights are never taken.
  const std::vector<WeightedEdge> neg{{0, 1, -3}};
  CHECK(matching::max_weight_matching(2, neg) == std::vector<int>{-1, -1});
}

TEST_CASE("odd cycle needs a blossom") {
  // Triangle with a pendant: the optimum uses the pendant edge.
  const std::vector<WeightedEdge> g{{0, 1, 8}, {1, 2, 9}, {0, 2, 10}, {2, 3, 7}};
  const auto m = matching::max_weight_matching(4, g);
  CHECK(matching::matching_weight(m, g) == brute_force(4, g));
  CHECK(consistent(m, g));
}

TEST_CASE("agrees with brute force on 100 random graphs") {
  RngStream rng(31337);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 10);
    const double density = rng.uniform(0.2, 1.0);
    std::vector<WeightedEdge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform() < density)
          edges.push_back({u, v, static_cast<std::int64_t>(rng.next_u64() % 1000) + 1});
    const auto mate = matching::max_weight_matching(n, edges);
    REQUIRE(consistent(mate, edges));
    CHECK(matching::matching_weight(mate, edges) == brute_force(n, edges));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("equal weights give a maximum cardinality matching") {
  // 6-cycle: a perfect matching exists.
  std::vector<WeightedEdge> ring;
  for (int i = 0; i < 6; ++i) ring.push_back({i, (i + 1) % 6, 1});
  const auto m = matching::max_weight_matching(6, ring);
  CHECK(std::count(m.begin(), m.end(), -1) == 0);
}
