#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aenet/engine.hpp"
#include "aenet/flooding.hpp"
#include "aenet/matching.hpp"
#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// All-pairs transfer via relays, in two flooding hops of L rounds each.
//
// Hop 1 (rounds 1..L): the inputs are flooded on n channels, one per source.
// When the hop ends, each vertex w freezes its estimate relay[w][a] of every
// input a.
//
// Hop 2 (rounds L+1..2L): the frozen estimates are flooded on n*n channels,
// one per (relay w, source a). A bot estimate simply never enters the bags,
// so "relay w had nothing" and "relay w said bot" coincide at the receiver.
//
// Decode: for the pair (a, b), vertex b takes a strict majority over the n
// relay verdicts, bot counting as an ordinary candidate. A pair therefore
// succeeds exactly when more than half the relays deliver the true value
// along both hops, no matter what the faulty ones inject.
class RelayAllPairsProgram {
 public:
  struct State {
    std::vector<VoteCounter> hop1;   // n bags
    std::vector<Message> relay;      // frozen after round L
    std::vector<VoteCounter> hop2;   // n*n bags, index w*n + a
  };
  using Output = std::vector<Message>;  // per source a: decoded value

  RelayAllPairsProgram(const MultiGraph* g, std::vector<Message> inputs, int hop_rounds, int width)
      : g_(g), inputs_(std::move(inputs)), hop_(hop_rounds), width_(width) {
    if (static_cast<int>(inputs_.size()) != g_->vertex_count())
      throw std::invalid_argument("RelayAllPairsProgram: one input per vertex required");
    if (hop_ < 1) throw std::invalid_argument("RelayAllPairsProgram: need at least one round per hop");
  }

  int rounds() const { return 2 * hop_; }
  int hop_rounds() const { return hop_; }

  State init(int) const {
    const int n = static_cast<int>(inputs_.size());
    State s;
    s.hop1.resize(n);
    s.relay.assign(n, Message::bot());
    s.hop2.resize(static_cast<std::size_t>(n) * n);
    return s;
  }

  void emit(const State& s, int t, int v, int /*port*/, std::vector<Message>& out) const {
    const int n = static_cast<int>(inputs_.size());
    if (t <= hop_) {
      out.resize(n);
      for (int a = 0; a < n; ++a)
        out[a] = (a == v) ? inputs_[v] : s.hop1[a].tri_bag_majority();
    } else {
      out.resize(static_cast<std::size_t>(n) * n);
      for (int w = 0; w < n; ++w)
        for (int a = 0; a < n; ++a)
          out[static_cast<std::size_t>(w) * n + a] =
              (w == v) ? s.relay[a] : s.hop2[static_cast<std::size_t>(w) * n + a].tri_bag_majority();
    }
  }

  void absorb(State& s, int t, int v, const std::vector<std::vector<Message>>& recv) const {
    const int n = static_cast<int>(inputs_.size());
    if (t <= hop_) {
      for (const auto& slots : recv) {
        if (static_cast<int>(slots.size()) != n) continue;
        for (int a = 0; a < n; ++a)
          if (!slots[a].is_bot()) s.hop1[a].add(slots[a]);
      }
      if (t == hop_)  // freeze this vertex's relay verdicts
        for (int a = 0; a < n; ++a)
          s.relay[a] = (a == v) ? inputs_[v] : s.hop1[a].tri_bag_majority();
    } else {
      const std::size_t nn = static_cast<std::size_t>(n) * n;
      for (const auto& slots : recv) {
        if (slots.size() != nn) continue;
        for (std::size_t c = 0; c < nn; ++c)
          if (!slots[c].is_bot()) s.hop2[c].add(slots[c]);
      }
    }
  }

  // The verdict vertex v holds about "what relay w says input a was".
  Message via(const State& s, int v, int w, int a) const {
    const int n = static_cast<int>(inputs_.size());
    return (w == v) ? s.relay[a] : s.hop2[static_cast<std::size_t>(w) * n + a].tri_bag_majority();
  }

  Output decode(const State& s, int v) const {
    const int n = static_cast<int>(inputs_.size());
    Output out(n);
    for (int a = 0; a < n; ++a) {
      VoteCounter vc;
      for (int w = 0; w < n; ++w) vc.add(via(s, v, w, a));
      out[a] = vc.tri_strict_majority();
    }
    return out;
  }

 private:
  const MultiGraph* g_;
  std::vector<Message> inputs_;
  int hop_;
  int width_;
};

// Per-pair relay subsets for the sampled decode: pair (a, b) consults
// plan(a, b), a multiset of `relays_per_pair` relay indices drawn uniformly
// with replacement. Majority over a sampled multiset beats the all-relay
// vote when relays fail independently: the miss probability decays
// exponentially in the sample size.
struct RelayPlan {
  int n = 0;
  int relays_per_pair = 0;
  std::vector<int> table;  // (a*n + b) * relays_per_pair + j

  std::span<const int> relays(int a, int b) const {
    const std::size_t base =
        (static_cast<std::size_t>(a) * n + b) * static_cast<std::size_t>(relays_per_pair);
    return {table.data() + base, static_cast<std::size_t>(relays_per_pair)};
  }
};

inline RelayPlan make_relay_plan(int n, int relays_per_pair, std::uint64_t seed) {
  if (n < 1 || relays_per_pair < 1)
    throw std::invalid_argument("make_relay_plan: sizes must be positive");
  RelayPlan plan;
  plan.n = n;
  plan.relays_per_pair = relays_per_pair;
  plan.table.resize(static_cast<std::size_t>(n) * n * relays_per_pair);
  if (relays_per_pair == n) {
    // Degenerate full-relay plan: every pair consults every vertex once.
    for (std::size_t p = 0; p < static_cast<std::size_t>(n) * n; ++p)
      for (int j = 0; j < n; ++j) plan.table[p * n + j] = j;
    return plan;
  }
  // Independent draws with replacement, so each sampled relay is an iid
  // uniform vertex and tail bounds for a bad-relay majority are exactly
  // binomial.
  Rng rng(seed);
  for (auto& r : plan.table) r = static_cast<int>(rng.below(n));
  return plan;
}

// The all-pairs transfer jobs on a graph, one relay program execution
// covering every ordered pair.
class AllPairsSet {
 public:
  AllPairsSet(const MultiGraph* g, int hop_rounds, int width)
      : g_(g), hop_(hop_rounds), width_(width) {
    const int dia = g_->diameter();
    if (dia < 0) throw std::invalid_argument("AllPairsSet: graph is disconnected");
    if (hop_ < dia)
      throw std::invalid_argument("AllPairsSet: " + std::to_string(hop_) +
                                  " rounds per hop cannot reach hop distance " +
                                  std::to_string(dia));
  }

  const MultiGraph& graph() const { return *g_; }
  int hop_rounds() const { return hop_; }
  int rounds() const { return 2 * hop_; }
  int width() const { return width_; }

  RelayAllPairsProgram program(std::vector<Message> inputs) const {
    return RelayAllPairsProgram(g_, std::move(inputs), hop_, width_);
  }

  std::vector<Message> generic_inputs() const {
    std::vector<Message> in(g_->vertex_count());
    for (int v = 0; v < g_->vertex_count(); ++v) in[v] = generic_payload(v, width_);
    return in;
  }

  struct Outcome {
    // table[b][a]: what b decoded for source a (table[a][a] is a's own input).
    std::vector<std::vector<Message>> table;
    std::vector<std::pair<int, int>> failing_pairs;  // ordered (a, b), a != b
    double failing_fraction = 0.0;                   // over the n(n-1) ordered pairs
    Counters counters;
    RunResult<RelayAllPairsProgram> run;  // kept for sampled re-decodes
  };

  Outcome run(const std::vector<Message>& inputs, const Adversary& adv,
              const EngineOptions& opt_in = {}) const {
    EngineOptions opt = opt_in;
    opt.payload_width = width_;
    RelayAllPairsProgram prog = program(inputs);
    auto res = execute(*g_, prog, adv, opt);
    Outcome oc;
    oc.counters = res.counters;
    const int n = g_->vertex_count();
    oc.table.resize(n);
    for (int b = 0; b < n; ++b) oc.table[b] = res.outputs[b];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && oc.table[b][a] != inputs[a]) oc.failing_pairs.emplace_back(a, b);
    oc.failing_fraction =
        n > 1 ? static_cast<double>(oc.failing_pairs.size()) / (static_cast<double>(n) * (n - 1))
              : 0.0;
    oc.run = std::move(res);
    return oc;
  }

  // Re-decode the same execution, pair (a, b) consulting only its sampled
  // relay multiset instead of all n relays.
  struct SampledOutcome {
    std::vector<std::pair<int, int>> failing_pairs;
    double failing_fraction = 0.0;
  };

  SampledOutcome sampled_decode(const Outcome& oc, const std::vector<Message>& inputs,
                                const RelayPlan& plan) const {
    const int n = g_->vertex_count();
    if (plan.n != n) throw std::invalid_argument("sampled_decode: plan size mismatch");
    RelayAllPairsProgram prog = program(inputs);
    SampledOutcome so;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        VoteCounter vc;
        for (int w : plan.relays(a, b)) vc.add(prog.via(oc.run.states[b], b, w, a));
        if (vc.tri_strict_majority() != inputs[a]) so.failing_pairs.emplace_back(a, b);
      }
    so.failing_fraction =
        n > 1 ? static_cast<double>(so.failing_pairs.size()) / (static_cast<double>(n) * (n - 1))
              : 0.0;
    return so;
  }

 private:
  const MultiGraph* g_;
  int hop_;
  int width_;
};

inline AllPairsSet relay_all_pairs(const MultiGraph& g, int hop_rounds, int width = 32) {
  return AllPairsSet(&g, hop_rounds, width);
}

// ---------------------------------------------------------------------------
// Discard-set estimation from a failing-pair list.

namespace detail {

// Exact minimum vertex cover by iterative deepening on the standard two-way
// branching (any cover contains an endpoint of every edge). The search visits
// at most 2^k nodes for target size k; `node_budget` caps pathological dense
// inputs, falling back to the trivially valid cover of all touched vertices.
struct CoverSearch {
  const std::vector<std::pair<int, int>>* edges;
  std::vector<char> chosen;
  std::vector<int> out;
  long long nodes = 0;
  long long node_budget;

  bool covered(const std::pair<int, int>& e) const { return chosen[e.first] || chosen[e.second]; }

  bool try_size(std::size_t edge_from, int remaining) {
    if (++nodes > node_budget) return false;
    std::size_t i = edge_from;
    while (i < edges->size() && covered((*edges)[i])) ++i;
    if (i == edges->size()) return true;
    if (remaining == 0) return false;
    for (int end : {(*edges)[i].first, (*edges)[i].second}) {
      chosen[end] = 1;
      if (try_size(i + 1, remaining - 1)) {
        out.push_back(end);
        return true;
      }
      chosen[end] = 0;
    }
    return false;
  }
};

}  // namespace detail

struct CoverResult {
  std::vector<int> vertices;  // sorted
  bool exact = true;          // false only if the node budget ran out
};

// Smallest vertex set touching every edge; edges on n vertices, loops and
// duplicates tolerated. Branching prefers the lower-numbered endpoint, so the
// result is deterministic.
inline CoverResult minimum_vertex_cover(int n, std::vector<std::pair<int, int>> edges,
                                        long long node_budget = 4'000'000) {
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("minimum_vertex_cover: endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  detail::CoverSearch cs;
  cs.edges = &edges;
  cs.node_budget = node_budget;
  for (int k = 0; k <= n; ++k) {
    cs.chosen.assign(n, 0);
    cs.out.clear();
    cs.nodes = 0;
    if (cs.try_size(0, k)) {
      CoverResult r;
      r.vertices = cs.out;
      std::sort(r.vertices.begin(), r.vertices.end());
      return r;
    }
    if (cs.nodes > cs.node_budget) break;
  }
  // Budget exhausted: every touched vertex is a cover.
  CoverResult r;
  r.exact = false;
  std::vector<char> seen(n, 0);
  for (const auto& [u, v] : edges) seen[u] = seen[v] = 1;
  for (int v = 0; v < n; ++v)
    if (seen[v]) r.vertices.push_back(v);
  return r;
}

// What to discard so that the surviving vertices miss none of their pairs.
//
// The incidence-threshold set (every vertex touching at least a sqrt(nu)
// fraction of its pairs, where nu is the overall failing fraction) is cheap
// and bounds well, but it does not always cover every failing pair: two
// vertices can split a single failure evenly and both duck the threshold. It
// is kept as a diagnostic. The discard set actually used is a minimum vertex
// cover of the failing pairs, which covers by construction and is never
// larger than any other valid discard set.
struct DoomedEstimate {
  std::vector<std::pair<int, int>> failing_pairs;
  double nu = 0.0;                 // failing fraction over ordered pairs
  std::vector<int> threshold_set;  // diagnostic only
  std::vector<int> discard;        // minimum vertex cover, sorted
  bool exact = true;
};

// `threshold` is the incidence-fraction cutoff for the cheap threshold set;
// negative means the default sqrt(nu). The discard set is always the exact
// minimum vertex cover of the failing pairs: the smallest set whose removal
// leaves no failing pair, which is the property every survivor guarantee
// rests on. (The threshold set can miss pairs whose two endpoints each sit
// below the cutoff; it is kept as a diagnostic.)
inline DoomedEstimate doomed_set_estimate(int n, std::vector<std::pair<int, int>> failing_pairs,
                                          double threshold = -1.0) {
  DoomedEstimate est;
  est.failing_pairs = std::move(failing_pairs);
  if (n < 2 || est.failing_pairs.empty()) return est;
  est.nu = static_cast<double>(est.failing_pairs.size()) / (static_cast<double>(n) * (n - 1));

  std::vector<int> incident(n, 0);
  for (const auto& [a, b] : est.failing_pairs) {
    ++incident[a];
    if (b != a) ++incident[b];
  }
  const double frac = threshold < 0.0 ? std::sqrt(est.nu) : threshold;
  const double cutoff = frac * 2.0 * (n - 1);
  for (int v = 0; v < n; ++v)
    if (incident[v] >= cutoff && incident[v] > 0) est.threshold_set.push_back(v);

  CoverResult cover = minimum_vertex_cover(n, est.failing_pairs);
  est.discard = std::move(cover.vertices);
  est.exact = cover.exact;
  return est;
}

// ---------------------------------------------------------------------------
// All-pairs from a permutation-protocol family, by the literal two-hop relay
// construction: round-robin matchings schedule every ordered pair (u, w) onto
// some matching; hop 1 moves each source's value to every relay, hop 2 moves
// every relay's whole estimate vector onward, and each destination takes a
// majority over the n relay verdicts per source.
//
// `factory(perm)` must return a permutation set with
//   run(inputs, adv)        -> { delivered[u], counters, ... }
//   run_vector(inputs, adv) -> { delivered[u][coord], counters }
// (FloodPermSet satisfies this.) The glue adds no protocol rounds of its own:
// total work stays within bookkeeping noise of the constituent runs.
struct LiteralAllPairsOutcome {
  std::vector<std::vector<Message>> table;  // [v][u]: v's verdict for source u
  std::vector<std::pair<int, int>> failing_pairs;
  double failing_fraction = 0.0;
  Counters total;                      // summed over every constituent run
  std::vector<Counters> run_counters;  // one entry per constituent run
  int runs_per_hop = 0;                // = number of round-robin matchings
};

template <class Factory>
LiteralAllPairsOutcome all_pairs_from_perm(const MultiGraph& g, Factory&& factory,
                                           const std::vector<Message>& inputs,
                                           const Adversary& adv) {
  const int n = g.vertex_count();
  if (static_cast<int>(inputs.size()) != n)
    throw std::invalid_argument("all_pairs_from_perm: one input per vertex required");
  LiteralAllPairsOutcome oc;
  const auto matchings = round_robin_matchings(n);
  oc.runs_per_hop = static_cast<int>(matchings.size());

  // Hop 1: everyone's value to every relay. est[w][u] = w's copy of u's value.
  std::vector<std::vector<Message>> est(n, std::vector<Message>(n, Message::bot()));
  for (int v = 0; v < n; ++v) est[v][v] = inputs[v];
  for (const auto& pi : matchings) {
    auto set = factory(pi);
    auto r = set.run(inputs, adv);
    oc.run_counters.push_back(r.counters);
    oc.total += r.counters;
    for (int u = 0; u < n; ++u)
      if (pi[u] != u) est[pi[u]][u] = r.delivered[u];
  }

  // Hop 2: every relay's estimate vector onward. rec[v][w][u].
  std::vector<std::vector<std::vector<Message>>> rec(
      n, std::vector<std::vector<Message>>(n, std::vector<Message>(n, Message::bot())));
  for (int v = 0; v < n; ++v) rec[v][v] = est[v];
  for (const auto& pi : matchings) {
    auto set = factory(pi);
    auto r = set.run_vector(est, adv);
    oc.run_counters.push_back(r.counters);
    oc.total += r.counters;
    for (int w = 0; w < n; ++w)
      if (pi[w] != w) rec[pi[w]][w] = r.delivered[w];
  }

  oc.table.assign(n, std::vector<Message>(n));
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      if (u == v) {
        oc.table[v][u] = inputs[v];
        continue;
      }
      VoteCounter vc;
      for (int w = 0; w < n; ++w) vc.add(rec[v][w][u]);
      oc.table[v][u] = vc.tri_strict_majority();
      if (oc.table[v][u] != inputs[u]) oc.failing_pairs.emplace_back(u, v);
    }
  oc.failing_fraction =
      n > 1 ? static_cast<double>(oc.failing_pairs.size()) / (static_cast<double>(n) * (n - 1))
            : 0.0;
  return oc;
}

// ---------------------------------------------------------------------------
// Amplified all-pairs: relay through a sampled vertex multiset per ordered
// pair instead of the full vertex set. Both legs ride the base all-pairs set;
// the per-pair relay draws are iid with replacement (seeded), so a bad-relay
// majority is exactly a binomial event. s = |V| degenerates to the full set.
struct AmplifiedOutcome {
  std::vector<std::vector<Message>> table;  // [v][u]
  std::vector<std::pair<int, int>> failing_pairs;
  double failing_fraction = 0.0;
  Counters total;  // summed over the 1 + n base runs
  RelayPlan plan;
};

inline AmplifiedOutcome amplified_all_pairs(const AllPairsSet& base,
                                            const std::vector<Message>& inputs,
                                            const Adversary& adv, int relays_per_pair,
                                            std::uint64_t seed) {
  const int n = base.graph().vertex_count();
  if (static_cast<int>(inputs.size()) != n)
    throw std::invalid_argument("amplified_all_pairs: one input per vertex required");
  AmplifiedOutcome oc;
  oc.plan = make_relay_plan(n, relays_per_pair, seed);

  // Leg 1: everyone's value to every relay.
  auto leg1 = base.run(inputs, adv);
  oc.total += leg1.counters;

  // Leg 2, one base run per source coordinate: relay w forwards its copy of
  // u's value to everyone. t2[u][v][w] = v's verdict for relay w's forward.
  std::vector<std::vector<std::vector<Message>>> t2(n);
  for (int u = 0; u < n; ++u) {
    std::vector<Message> fwd(n);
    for (int w = 0; w < n; ++w) fwd[w] = leg1.table[w][u];
    auto leg2 = base.run(fwd, adv);
    oc.total += leg2.counters;
    t2[u] = std::move(leg2.table);
  }

  oc.table.assign(n, std::vector<Message>(n));
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      if (u == v) {
        oc.table[v][u] = inputs[v];
        continue;
      }
      VoteCounter vc;
      for (int w : oc.plan.relays(u, v)) vc.add(t2[u][v][w]);
      oc.table[v][u] = vc.tri_strict_majority();
      if (oc.table[v][u] != inputs[u]) oc.failing_pairs.emplace_back(u, v);
    }
  oc.failing_fraction =
      n > 1 ? static_cast<double>(oc.failing_pairs.size()) / (static_cast<double>(n) * (n - 1))
            : 0.0;
  return oc;
}

// Runs the all-pairs set once per behavior in the menu over the same
// corrupted wires; a pair is failing if any behavior breaks it. The returned
// discard set is therefore sound against every behavior the menu models.
inline DoomedEstimate menu_doomed_estimate(const AllPairsSet& set, const CorruptionSet& cs,
                                           const std::vector<Behavior>& menu,
                                           double threshold = -1.0) {
  const int n = set.graph().vertex_count();
  std::set<std::pair<int, int>> failing;
  const auto inputs = set.generic_inputs();
  for (const Behavior& b : menu) {
    auto oc = set.run(inputs, Adversary::uniform_behavior(cs, b));
    failing.insert(oc.failing_pairs.begin(), oc.failing_pairs.end());
  }
  return doomed_set_estimate(
      n, std::vector<std::pair<int, int>>(failing.begin(), failing.end()), threshold);
}

}  // namespace aenet
