#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aenet/multigraph.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// Random d-regular simple graph on n vertices.
//
// Even n: the union of d uniformly drawn perfect matchings, redrawing any
// matching that would duplicate an existing edge. Odd n (d must then be even
// for n*d to be even): the union of d/2 uniformly drawn Hamiltonian cycles
// with the same rejection rule. A redraw budget guards against pathological
// parameter choices (e.g. d close to n).
inline MultiGraph random_regular_graph(int n, int d, std::uint64_t seed, int retry_budget = 500) {
  if (n <= d || d < 1) throw std::invalid_argument("random_regular_graph: need n > d >= 1");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw std::invalid_argument("random_regular_graph: n*d must be even");
  if (n % 2 != 0 && d % 2 != 0)
    throw std::invalid_argument("random_regular_graph: odd n requires even d");

  Rng rng(seed);
  std::set<std::pair<int, int>> used;
  auto canon = [](int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); };

  std::vector<int> order(n);
  int attempts = 0;
  auto next_permutation_draw = [&]() {
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
  };

  MultiGraph g(n);
  const int layers = (n % 2 == 0) ? d : d / 2;
  for (int layer = 0; layer < layers; ++layer) {
    for (;;) {
      if (++attempts > retry_budget)
        throw std::runtime_error("random_regular_graph: redraw budget exhausted for n=" +
                                 std::to_string(n) + " d=" + std::to_string(d));
      next_permutation_draw();
      std::vector<std::pair<int, int>> layer_edges;
      bool clash = false;
      if (n % 2 == 0) {
        for (int i = 0; i + 1 < n && !clash; i += 2) {
          auto e = canon(order[i], order[i + 1]);
          clash = used.count(e) > 0;
          layer_edges.push_back(e);
        }
      } else {
        for (int i = 0; i < n && !clash; ++i) {
          auto e = canon(order[i], order[(i + 1) % n]);
          clash = used.count(e) > 0;
          layer_edges.push_back(e);
        }
      }
      if (clash) continue;
      // A Hamiltonian cycle can self-collide only for n <= 2, which the
      // preconditions exclude, so layer_edges is duplicate-free here.
      for (auto& e : layer_edges) {
        used.insert(e);
        g.add_edge(e.first, e.second);
      }
      break;
    }
  }
  return g;
}

}  // namespace aenet
