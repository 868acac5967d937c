#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"

namespace aenet {

// Tri-state re-evaluation: a protocol rerun with a subset of wires erased.
// An erased wire delivers the star placeholder in place of whatever was sent,
// and majorities follow the completion-safe rules of VoteCounter. A definite
// (non-star) result is therefore one the live protocol reaches under *every*
// behavior of the erased wires; a star means some behavior could change it.
//
// Erasures are remembered per slot, not per wire history: two stars fed by
// the same wire in different rounds count as independent unknowns. That only
// widens the star set, so definite results stay trustworthy.

// ---------------------------------------------------------------------------
// Flooding with erased wires.

struct ErasedFloodResult {
  // receipts[t-1][v][port][channel]: what v received on that port, rounds
  // 1..T. Filled only when recording is on.
  std::vector<std::vector<std::vector<std::vector<Message>>>> receipts;
  // outputs[v][u]: v's decode of source u's channel.
  std::vector<std::vector<Message>> outputs;
};

inline ErasedFloodResult erased_flood(const MultiGraph& g, const std::vector<Message>& inputs,
                                      int rounds, const std::vector<char>& starred,
                                      bool record_receipts = true) {
  const int n = g.vertex_count();
  if (static_cast<int>(inputs.size()) != n)
    throw std::invalid_argument("erased_flood: one input per vertex required");
  if (static_cast<int>(starred.size()) != g.copy_count())
    throw std::invalid_argument("erased_flood: one erasure flag per wire required");

  std::vector<std::vector<VoteCounter>> bags(n, std::vector<VoteCounter>(n));
  auto slot = [&](int v, int u) {
    return u == v ? inputs[v] : bags[v][u].tri_bag_majority();
  };

  ErasedFloodResult res;
  if (record_receipts) res.receipts.resize(rounds);

  std::vector<std::vector<Message>> sent(n, std::vector<Message>(n));
  for (int t = 1; t <= rounds; ++t) {
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < n; ++u) sent[v][u] = slot(v, u);
    if (record_receipts) {
      res.receipts[t - 1].resize(n);
      for (int v = 0; v < n; ++v)
        res.receipts[t - 1][v].assign(g.degree(v), std::vector<Message>(n));
    }
    for (int v = 0; v < n; ++v) {
      const auto& ports = g.ports(v);
      for (std::size_t p = 0; p < ports.size(); ++p) {
        const int wire = g.wire_id(ports[p].edge, ports[p].copy);
        const int peer = ports[p].peer;
        for (int u = 0; u < n; ++u) {
          const Message got = starred[wire] ? Message::star() : sent[peer][u];
          if (record_receipts) res.receipts[t - 1][v][p][u] = got;
          if (!got.is_bot()) bags[v][u].add(got);
        }
      }
    }
  }

  res.outputs.resize(n);
  for (int v = 0; v < n; ++v) {
    res.outputs[v].resize(n);
    for (int u = 0; u < n; ++u) res.outputs[v][u] = slot(v, u);
  }
  return res;
}

// Transfer jobs u -> perm[u] under flooding with erased wires: the ordered
// pairs whose delivery is not certain (the decode is star, or anything other
// than the injected value).
inline std::vector<std::pair<int, int>> erased_flood_failing_pairs(
    const MultiGraph& g, const std::vector<int>& perm, const std::vector<Message>& inputs,
    int rounds, const std::vector<char>& starred) {
  auto res = erased_flood(g, inputs, rounds, starred, /*record_receipts=*/false);
  std::vector<std::pair<int, int>> failing;
  for (int u = 0; u < g.vertex_count(); ++u)
    if (res.outputs[perm[u]][u] != inputs[u]) failing.emplace_back(u, perm[u]);
  return failing;
}

// ---------------------------------------------------------------------------
// The two-hop relay all-pairs protocol with erased wires.
//
// Every vertex starts with the same known sentinel; a pair (a, b) fails when
// b's decode of a's channel is not certainly that sentinel. Menu-free: one
// tri-state pass covers every behavior of the erased wires at once.
inline std::vector<std::pair<int, int>> erased_relay_failing_pairs(
    const MultiGraph& h, int hop_rounds, const std::vector<char>& starred) {
  const int n = h.vertex_count();
  if (static_cast<int>(starred.size()) != h.copy_count())
    throw std::invalid_argument("erased_relay_failing_pairs: one flag per wire required");
  const Message tru = Message::value(1, 1);

  std::vector<std::vector<VoteCounter>> hop1(n, std::vector<VoteCounter>(n));
  std::vector<std::vector<Message>> relay(n, std::vector<Message>(n, Message::bot()));
  std::vector<std::vector<VoteCounter>> hop2(
      n, std::vector<VoteCounter>(static_cast<std::size_t>(n) * n));

  auto hop1_slot = [&](int v, int a) {
    return a == v ? tru : hop1[v][a].tri_bag_majority();
  };
  auto hop2_slot = [&](int v, int w, int a) {
    return w == v ? relay[v][a]
                  : hop2[v][static_cast<std::size_t>(w) * n + a].tri_bag_majority();
  };

  std::vector<std::vector<Message>> sent;
  for (int t = 1; t <= 2 * hop_rounds; ++t) {
    const bool first = t <= hop_rounds;
    sent.assign(n, {});
    for (int v = 0; v < n; ++v) {
      if (first) {
        sent[v].resize(n);
        for (int a = 0; a < n; ++a) sent[v][a] = hop1_slot(v, a);
      } else {
        sent[v].resize(static_cast<std::size_t>(n) * n);
        for (int w = 0; w < n; ++w)
          for (int a = 0; a < n; ++a)
            sent[v][static_cast<std::size_t>(w) * n + a] = hop2_slot(v, w, a);
      }
    }
    for (int v = 0; v < n; ++v) {
      for (const MultiGraph::PortRef& pr : h.ports(v)) {
        const bool erased = starred[h.wire_id(pr.edge, pr.copy)];
        const auto& in = sent[pr.peer];
        if (first) {
          for (int a = 0; a < n; ++a) {
            const Message got = erased ? Message::star() : in[a];
            if (!got.is_bot()) hop1[v][a].add(got);
          }
        } else {
          for (std::size_t k = 0; k < in.size(); ++k) {
            const Message got = erased ? Message::star() : in[k];
            if (!got.is_bot()) hop2[v][k].add(got);
          }
        }
      }
      if (t == hop_rounds)
        for (int a = 0; a < n; ++a) relay[v][a] = hop1_slot(v, a);
    }
  }

  std::vector<std::pair<int, int>> failing;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      VoteCounter vc;
      for (int w = 0; w < n; ++w) vc.add(hop2_slot(b, w, a));
      if (vc.tri_strict_majority() != tru) failing.emplace_back(a, b);
    }
  return failing;
}

}  // namespace aenet
