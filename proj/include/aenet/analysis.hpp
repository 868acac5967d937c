#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aenet/adversary.hpp"
#include "aenet/all_pairs.hpp"
#include "aenet/compose.hpp"
#include "aenet/erased.hpp"
#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/replacement.hpp"

namespace aenet {

// ---------------------------------------------------------------------------
// Classification of a corruption set on a product graph.
//
// With eps the corrupted fraction of all wires and thr = sqrt(2 eps):
//  - a cloud is "bad" when at least a thr fraction of its inner wires is
//    corrupted (Markov: at most a thr fraction of clouds can be bad), or when
//    its discard set would have to swallow half the cloud;
//  - a good cloud's "doomed" locals are a minimum vertex cover of the pairs
//    its in-cloud relay can no longer guarantee — transfers touching them
//    are written off, everyone else keeps working;
//  - a super-edge is corrupted when an endpoint cloud is bad, an endpoint
//    port is doomed, or at least a thr fraction of its own bundle copies is
//    corrupted. Outer traffic treats corrupted super-edges as erased.

struct CloudReport {
  int corrupted_inner = 0;      // corrupted inner wire copies in this cloud
  double inner_fraction = 0.0;  // over the cloud's inner copy count
  bool bad = false;
  bool upgraded = false;           // bad via the discard-size valve, not the fraction
  std::vector<int> doomed;         // sorted locals; empty for bad clouds
  std::vector<int> threshold_doomed;  // incidence-threshold diagnostic set
};

struct CorruptionAnalysis {
  double eps = 0.0;
  double threshold = 0.0;  // sqrt(2 eps)
  bool menu_relative = false;  // true when failing pairs came from menu runs

  std::vector<CloudReport> clouds;
  std::vector<char> cloud_bad;                 // per cloud
  std::vector<std::vector<char>> doomed_mask;  // [cloud][local]
  std::vector<char> super_edge_bad;            // per G wire
  std::vector<int> corrupted_super_edges;      // sorted G wire ids

  double bad_cloud_fraction = 0.0;
  double super_edge_fraction = 0.0;
  double doomed_fraction = 0.0;  // doomed locals of good clouds / |V(Z)|

  bool is_doomed(int cloud, int local) const { return doomed_mask[cloud][local] != 0; }
  // A product vertex whose transfers the analysis has written off entirely.
  bool excluded(int cloud, int local) const {
    return cloud_bad[cloud] != 0 || doomed_mask[cloud][local] != 0;
  }
};

namespace detail {

struct SplitCorruption {
  std::vector<std::vector<int>> cloud_h_wires;  // per cloud, as H wire ids, sorted
  std::vector<int> bundle_corrupted;            // per super edge (G wire id)
};

// Distributes corrupted Z wires onto the clouds (as wires of H, via the
// positional cloud-edge <-> H-edge correspondence) and the super-edges.
inline SplitCorruption split_corruption(const ProductGraph& pr, const CorruptionSet& cs) {
  if (cs.total_copies != pr.z.copy_count())
    throw std::invalid_argument("split_corruption: corruption set sized for a different graph");

  std::vector<int> cloud_pos(pr.z.edge_count(), -1);
  for (int c = 0; c < pr.n_g; ++c) {
    if (pr.cloud_edges[c].size() != pr.h.edges().size())
      throw std::logic_error("split_corruption: cloud edge list out of step with H");
    for (std::size_t j = 0; j < pr.cloud_edges[c].size(); ++j) {
      const int ze = pr.cloud_edges[c][j];
      if (pr.z.edges()[ze].mult != pr.h.edges()[j].mult)
        throw std::logic_error("split_corruption: cloud copy counts out of step with H");
      cloud_pos[ze] = static_cast<int>(j);
    }
  }

  SplitCorruption out;
  out.cloud_h_wires.resize(pr.n_g);
  out.bundle_corrupted.assign(pr.super_edges.size(), 0);
  for (int wid : cs.wires) {
    const auto wr = pr.z.wire(wid);
    const int cloud = pr.z_edge_cloud[wr.edge];
    if (cloud >= 0) {
      out.cloud_h_wires[cloud].push_back(pr.h.wire_id(cloud_pos[wr.edge], wr.copy));
    } else {
      ++out.bundle_corrupted[pr.z_edge_super[wr.edge]];
    }
  }
  for (auto& w : out.cloud_h_wires) std::sort(w.begin(), w.end());
  return out;
}

template <class FailingPairsFn>
CorruptionAnalysis classify_core(const ProductGraph& pr, const CorruptionSet& cs,
                                 double doomed_threshold, FailingPairsFn&& failing_pairs_of) {
  CorruptionAnalysis an;
  an.eps = cs.fraction();
  an.threshold = std::sqrt(2.0 * an.eps);

  const SplitCorruption split = split_corruption(pr, cs);
  const long long cloud_copies = pr.h.copy_count();

  an.clouds.resize(pr.n_g);
  an.cloud_bad.assign(pr.n_g, 0);
  an.doomed_mask.assign(pr.n_g, std::vector<char>(pr.n_h, 0));
  int bad_count = 0;
  long long doomed_total = 0;
  for (int c = 0; c < pr.n_g; ++c) {
    CloudReport& rep = an.clouds[c];
    rep.corrupted_inner = static_cast<int>(split.cloud_h_wires[c].size());
    rep.inner_fraction =
        cloud_copies > 0 ? static_cast<double>(rep.corrupted_inner) / cloud_copies : 0.0;
    if (rep.corrupted_inner == 0) continue;
    rep.bad = rep.inner_fraction + 1e-12 >= an.threshold;
    if (!rep.bad) {
      DoomedEstimate est = doomed_set_estimate(
          pr.n_h, failing_pairs_of(split.cloud_h_wires[c]), doomed_threshold);
      rep.doomed = std::move(est.discard);
      rep.threshold_doomed = std::move(est.threshold_set);
      if (2 * static_cast<int>(rep.doomed.size()) >= pr.n_h) {
        // The cloud would have to write off half of itself; its in-cloud
        // majorities are no longer trustworthy, so the whole cloud is.
        rep.bad = true;
        rep.upgraded = true;
        rep.doomed.clear();
      }
    }
    if (rep.bad) {
      an.cloud_bad[c] = 1;
      ++bad_count;
    } else {
      for (int b : rep.doomed) an.doomed_mask[c][b] = 1;
      doomed_total += static_cast<long long>(rep.doomed.size());
    }
  }

  an.super_edge_bad.assign(pr.super_edges.size(), 0);
  for (std::size_t w = 0; w < pr.super_edges.size(); ++w) {
    const auto& se = pr.super_edges[w];
    const double bundle_fraction =
        pr.k_h > 0 ? static_cast<double>(split.bundle_corrupted[w]) / pr.k_h : 0.0;
    const bool corrupted = an.cloud_bad[se.u] || an.cloud_bad[se.v] ||
                           an.doomed_mask[se.u][se.port_u] || an.doomed_mask[se.v][se.port_v] ||
                           (split.bundle_corrupted[w] > 0 &&
                            bundle_fraction + 1e-12 >= an.threshold);
    if (corrupted) {
      an.super_edge_bad[w] = 1;
      an.corrupted_super_edges.push_back(static_cast<int>(w));
    }
  }

  an.bad_cloud_fraction = pr.n_g > 0 ? static_cast<double>(bad_count) / pr.n_g : 0.0;
  an.super_edge_fraction =
      !pr.super_edges.empty()
          ? static_cast<double>(an.corrupted_super_edges.size()) / pr.super_edges.size()
          : 0.0;
  an.doomed_fraction = static_cast<double>(doomed_total) /
                       (static_cast<double>(pr.n_g) * static_cast<double>(pr.n_h));
  return an;
}

}  // namespace detail

// Literal flavor: a good cloud's failing pairs are measured by running the
// in-cloud relay protocol on H once per menu behavior and pooling the failing
// pairs. Sound against adversaries drawing behaviors from the same menu.
inline CorruptionAnalysis classify(const ProductGraph& pr, const CorruptionSet& cs,
                                   const std::vector<Behavior>& menu, int inner_hop_rounds,
                                   int width, double doomed_threshold = -1.0) {
  AllPairsSet aps(&pr.h, inner_hop_rounds, width);
  const auto inputs = aps.generic_inputs();
  auto an = detail::classify_core(
      pr, cs, doomed_threshold, [&](const std::vector<int>& h_wires) {
        CorruptionSet hcs;
        hcs.wires = h_wires;
        hcs.total_copies = pr.h.copy_count();
        std::set<std::pair<int, int>> failing;
        for (const Behavior& b : menu) {
          auto oc = aps.run(inputs, Adversary::uniform_behavior(hcs, b));
          failing.insert(oc.failing_pairs.begin(), oc.failing_pairs.end());
        }
        return std::vector<std::pair<int, int>>(failing.begin(), failing.end());
      });
  an.menu_relative = true;
  return an;
}

// Erased flavor: failing pairs come from one tri-state pass per cloud with
// the corrupted wires erased, covering every wire behavior at once. Used
// when the corruption is itself an abstraction (lower pipeline levels).
inline CorruptionAnalysis classify_erased(const ProductGraph& pr, const CorruptionSet& cs,
                                          int inner_hop_rounds,
                                          double doomed_threshold = -1.0) {
  return detail::classify_core(pr, cs, doomed_threshold, [&](const std::vector<int>& h_wires) {
    std::vector<char> starred(pr.h.copy_count(), 0);
    for (int w : h_wires) starred[w] = 1;
    return erased_relay_failing_pairs(pr.h, inner_hop_rounds, starred);
  });
}

// ---------------------------------------------------------------------------
// Replica-level verification of one composed unit against the erased outer
// oracle. The oracle floods the outer graph with the corrupted super-edges
// erased and the unreliable sources (bad cloud, or doomed source local)
// erased too; every receipt and decode entry it marks definite must then
// appear verbatim at every surviving replica — a non-doomed vertex of a good
// cloud — in the literal composed execution.

struct SimViolation {
  int z_vertex = -1;
  int outer_round = 0;  // 1..R1 for receipts; R1 + 1 flags a decode entry
  int position = 0;     // port * n_g + channel for receipts; channel for decodes
  Message expected, got;
};

struct SimCheck {
  long long checked = 0;
  std::vector<SimViolation> violations;
  bool ok() const { return violations.empty(); }
};

inline SimCheck verify_simulation(const ComposedSet& cset, int unit,
                                  const ComposedSet::UnitOutcome& oc,
                                  const std::vector<Message>& inputs_z,
                                  const CorruptionAnalysis& an) {
  const ProductGraph& pr = cset.product();
  const auto& m = cset.decomposition().sets.at(unit);
  const int r1 = cset.outer(unit).rounds();
  if (oc.histories.empty())
    throw std::invalid_argument("verify_simulation: unit was run without history recording");

  std::vector<char> starred(pr.super_edges.size(), 0);
  for (std::size_t w = 0; w < pr.super_edges.size(); ++w) starred[w] = an.super_edge_bad[w];

  std::vector<Message> cloud_inputs(pr.n_g);
  for (int c = 0; c < pr.n_g; ++c) {
    const int src_local = pr.local_of(m.source[c]);
    cloud_inputs[c] = an.excluded(c, src_local) ? Message::star() : inputs_z[m.source[c]];
  }

  const auto oracle = erased_flood(pr.g, cloud_inputs, r1, starred, /*record_receipts=*/true);

  SimCheck check;
  for (int c = 0; c < pr.n_g; ++c) {
    if (an.cloud_bad[c]) continue;
    for (int b = 0; b < pr.n_h; ++b) {
      if (an.doomed_mask[c][b]) continue;
      const int zv = pr.z_vertex(c, b);
      const auto& hist = oc.histories[zv];
      if (static_cast<int>(hist.size()) != r1)
        throw std::logic_error("verify_simulation: replica history has the wrong length");
      for (int t = 1; t <= r1; ++t)
        for (int p = 0; p < pr.d_g; ++p)
          for (int ch = 0; ch < pr.n_g; ++ch) {
            const Message expect = oracle.receipts[t - 1][c][p][ch];
            if (expect.is_star()) continue;
            ++check.checked;
            const Message got = hist[t - 1][static_cast<std::size_t>(p) * pr.n_g + ch];
            if (got != expect)
              check.violations.push_back({zv, t, p * pr.n_g + ch, expect, got});
          }
      for (int ch = 0; ch < pr.n_g; ++ch) {
        const Message expect = oracle.outputs[c][ch];
        if (expect.is_star()) continue;
        ++check.checked;
        if (oc.outputs[zv][ch] != expect)
          check.violations.push_back({zv, r1 + 1, ch, expect, oc.outputs[zv][ch]});
      }
    }
  }
  return check;
}

// ---------------------------------------------------------------------------
// The per-transfer failure bound. Every failing pair of a composed run must
// be explained by one of: excluded source vertex, excluded destination
// vertex, or the outer transfer between their clouds failing in the erased
// oracle. Holding with zero exceptions, it turns the bad-cloud, doomed and
// super-edge fractions into a bound on the failing fraction.

struct UnionBoundCheck {
  long long failing = 0;
  std::vector<std::pair<int, int>> unexplained;  // failing (src, dst) with no clause
  double fail_fraction = 0.0;     // measured
  double explained_fraction = 0.0;  // pairs with at least one clause, over all sources
  bool ok() const { return unexplained.empty(); }
};

inline UnionBoundCheck check_union_bound(const ComposedSet& cset,
                                         const ComposedSet::Outcome& oc,
                                         const std::vector<Message>& inputs_z,
                                         const CorruptionAnalysis& an) {
  const ProductGraph& pr = cset.product();
  std::vector<char> starred(pr.super_edges.size(), 0);
  for (std::size_t w = 0; w < pr.super_edges.size(); ++w) starred[w] = an.super_edge_bad[w];

  UnionBoundCheck ub;
  ub.fail_fraction = oc.failing_fraction;
  long long explained_count = 0;
  for (int unit = 0; unit < cset.units(); ++unit) {
    const auto& m = cset.decomposition().sets[unit];
    std::vector<Message> cloud_inputs(pr.n_g);
    for (int c = 0; c < pr.n_g; ++c) cloud_inputs[c] = inputs_z[m.source[c]];
    const auto outer_failing = erased_flood_failing_pairs(
        pr.g, m.perm, cloud_inputs, cset.outer(unit).rounds(), starred);
    std::set<std::pair<int, int>> outer_bad(outer_failing.begin(), outer_failing.end());

    for (int c = 0; c < pr.n_g; ++c) {
      const int src = m.source[c];
      const int dst = cset.pi()[src];
      const bool clause = an.excluded(c, pr.local_of(src)) ||
                          an.excluded(pr.cloud_of(dst), pr.local_of(dst)) ||
                          outer_bad.count({c, m.perm[c]}) > 0;
      if (clause) ++explained_count;
      if (!oc.ok[src]) {
        ++ub.failing;
        if (!clause) ub.unexplained.emplace_back(src, dst);
      }
    }
  }
  ub.explained_fraction =
      pr.z.vertex_count() > 0
          ? static_cast<double>(explained_count) / pr.z.vertex_count()
          : 0.0;
  return ub;
}

}  // namespace aenet
