#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "aenet/replacement.hpp"

namespace aenet {

// One outer routing job extracted from a product-level permutation: a
// permutation on the clouds plus, per source cloud, the product vertex whose
// transfer rides this matching.
struct LabeledMatching {
  std::vector<int> perm;    // cloud -> destination cloud (a bijection)
  std::vector<int> source;  // cloud u -> product vertex z with cloud(z) == u
};

struct MatchingDecomposition {
  std::vector<LabeledMatching> sets;  // |V(H)| of them (= deg(G) when balanced)
};

namespace detail {

// Bipartite multigraph on left/right copies of [0, n); edges carry a label.
struct BipEdge {
  int l;
  int r;
  int label;
};

// Splits a k-regular edge list (k even) into two k/2-regular halves by
// orienting Euler circuits; alternation over the bipartition guarantees the
// even split at every node.
inline void euler_split(int n, const std::vector<BipEdge>& edges, std::vector<BipEdge>& half0,
                        std::vector<BipEdge>& half1) {
  const int nodes = 2 * n;
  std::vector<std::vector<int>> adj(nodes);
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    adj[edges[i].l].push_back(i);
    adj[n + edges[i].r].push_back(i);
  }
  std::vector<bool> used(edges.size(), false);
  std::vector<std::size_t> cursor(nodes, 0);
  for (int start = 0; start < nodes; ++start) {
    while (cursor[start] < adj[start].size()) {
      if (used[adj[start][cursor[start]]]) {
        ++cursor[start];
        continue;
      }
      // Trace one circuit from `start`; every node has even residual degree,
      // so the walk can only get stuck back at `start`.
      int at = start;
      for (;;) {
        while (cursor[at] < adj[at].size() && used[adj[at][cursor[at]]]) ++cursor[at];
        if (cursor[at] == adj[at].size()) break;
        const int ei = adj[at][cursor[at]];
        used[ei] = true;
        const bool from_left = at < n;
        (from_left ? half0 : half1).push_back(edges[ei]);
        at = from_left ? n + edges[ei].r : edges[ei].l;
      }
    }
  }
}

// One perfect matching of a regular bipartite edge list via augmenting paths
// (exists by regularity); returns chosen edge indices.
inline std::vector<int> one_perfect_matching(int n, const std::vector<BipEdge>& edges) {
  std::vector<std::vector<int>> adj(n);  // left -> incident edge indices
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) adj[edges[i].l].push_back(i);
  std::vector<int> match_r(n, -1);  // right -> edge index
  std::vector<bool> visited(n);

  auto augment = [&](auto&& self, int u) -> bool {
    for (int ei : adj[u]) {
      const int w = edges[ei].r;
      if (visited[w]) continue;
      visited[w] = true;
      if (match_r[w] < 0 || self(self, edges[match_r[w]].l)) {
        match_r[w] = ei;
        return true;
      }
    }
    return false;
  };

  for (int u = 0; u < n; ++u) {
    std::fill(visited.begin(), visited.end(), false);
    if (!augment(augment, u))
      throw std::runtime_error("one_perfect_matching: no augmenting path (graph not regular?)");
  }
  std::vector<int> picked;
  picked.reserve(n);
  for (int w = 0; w < n; ++w) picked.push_back(match_r[w]);
  std::sort(picked.begin(), picked.end());
  return picked;
}

inline void decompose_regular(int n, int k, std::vector<BipEdge> edges,
                              std::vector<std::vector<BipEdge>>& out) {
  if (k == 0) return;
  if (k == 1) {
    out.push_back(std::move(edges));
    return;
  }
  if (k % 2 == 1) {
    std::vector<int> picked = one_perfect_matching(n, edges);
    std::vector<BipEdge> matching;
    matching.reserve(n);
    std::vector<BipEdge> rest;
    rest.reserve(edges.size() - n);
    std::size_t pi = 0;
    for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
      if (pi < picked.size() && picked[pi] == i) {
        matching.push_back(edges[i]);
        ++pi;
      } else {
        rest.push_back(edges[i]);
      }
    }
    out.push_back(std::move(matching));
    decompose_regular(n, k - 1, std::move(rest), out);
    return;
  }
  std::vector<BipEdge> half0, half1;
  half0.reserve(edges.size() / 2);
  half1.reserve(edges.size() / 2);
  euler_split(n, edges, half0, half1);
  decompose_regular(n, k / 2, std::move(half0), out);
  decompose_regular(n, k / 2, std::move(half1), out);
}

}  // namespace detail

inline void require_permutation(const std::vector<int>& pi, int n, const std::string& who) {
  if (static_cast<int>(pi.size()) != n)
    throw std::invalid_argument(who + ": permutation has wrong length");
  std::vector<bool> seen(n, false);
  for (int x : pi) {
    if (x < 0 || x >= n || seen[x])
      throw std::invalid_argument(who + ": not a permutation");
    seen[x] = true;
  }
}

// Splits a permutation on V(Z) into |V(H)| cloud-level routing jobs. Each
// product vertex contributes the pair (z, pi[z]); projecting pairs to their
// clouds gives a |V(H)|-regular bipartite multigraph on the clouds, which
// decomposes into perfect matchings (Euler partition while the residual
// degree is even, one augmenting-path matching pulled out when it is odd).
// Every matching, read as a function cloud -> cloud, is a permutation, and
// the pair labels partition V(Z).
inline MatchingDecomposition permutation_to_matchings(const ProductGraph& p,
                                                      const std::vector<int>& pi) {
  require_permutation(pi, p.z.vertex_count(), "permutation_to_matchings");

  std::vector<detail::BipEdge> edges;
  edges.reserve(pi.size());
  for (int z = 0; z < static_cast<int>(pi.size()); ++z)
    edges.push_back(detail::BipEdge{p.cloud_of(z), p.cloud_of(pi[z]), z});

  std::vector<std::vector<detail::BipEdge>> raw;
  detail::decompose_regular(p.n_g, p.n_h, std::move(edges), raw);

  MatchingDecomposition out;
  out.sets.reserve(raw.size());
  for (const auto& m : raw) {
    LabeledMatching lm;
    lm.perm.assign(p.n_g, -1);
    lm.source.assign(p.n_g, -1);
    for (const detail::BipEdge& e : m) {
      if (lm.perm[e.l] != -1)
        throw std::runtime_error("permutation_to_matchings: matching visits a cloud twice");
      lm.perm[e.l] = e.r;
      lm.source[e.l] = e.label;
    }
    require_permutation(lm.perm, p.n_g, "permutation_to_matchings (result)");
    out.sets.push_back(std::move(lm));
  }
  return out;
}

// Round-robin (circle method) decomposition of the complete graph on
// [0, m): a list of involutions that together pair every two distinct
// vertices exactly once. Even m gives m-1 perfect matchings; odd m gives m
// near-perfect matchings, the bye vertex left as a fixed point.
inline std::vector<std::vector<int>> round_robin_matchings(int m) {
  if (m < 2) return {};
  const bool odd = (m % 2 != 0);
  const int mm = odd ? m + 1 : m;  // phantom partner marks the bye
  std::vector<std::vector<int>> rounds;
  rounds.reserve(mm - 1);
  for (int r = 0; r < mm - 1; ++r) {
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    // Vertex mm-1 sits fixed at the last position, the rest rotate; position
    // p pairs with position mm-1-p.
    std::vector<int> at(mm);
    for (int i = 0; i < mm - 1; ++i) at[(i + r) % (mm - 1)] = i;
    at[mm - 1] = mm - 1;
    for (int pos = 0; pos < mm / 2; ++pos) {
      int a = at[pos];
      int b = at[mm - 1 - pos];
      if (a >= m || b >= m) continue;  // partner is the phantom: bye round
      perm[a] = b;
      perm[b] = a;
    }
    rounds.push_back(std::move(perm));
  }
  return rounds;
}

}  // namespace aenet
