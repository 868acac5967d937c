#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "aenet/adversary.hpp"
#include "aenet/all_pairs.hpp"
#include "aenet/analysis.hpp"
#include "aenet/compose.hpp"
#include "aenet/erased.hpp"
#include "aenet/flooding.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/replacement.hpp"
#include "aenet/rng.hpp"

using namespace aenet;

namespace {

std::vector<int> shift_perm(int n, int k) {
  std::vector<int> pi(n);
  for (int i = 0; i < n; ++i) pi[i] = (i + k) % n;
  return pi;
}

std::vector<Message> distinct_inputs(int n, int width) {
  std::vector<Message> in(n);
  for (int v = 0; v < n; ++v) in[v] = generic_payload(v, width);
  return in;
}

CorruptionSet wires_of(const MultiGraph& g, std::vector<int> wires) {
  CorruptionSet cs;
  std::sort(wires.begin(), wires.end());
  cs.wires = std::move(wires);
  cs.total_copies = g.copy_count();
  return cs;
}

}  // namespace

// ===========================================================================
// Erased flooding, pinned against a hand trace on the 4-cycle with the wire
// {0,1} erased, two rounds, distinct inputs.

TEST_CASE("erased flooding on a 4-cycle matches the hand trace") {
  MultiGraph g = cycle_graph(4);  // edges {0,1} {1,2} {2,3} {3,0}
  const auto inputs = distinct_inputs(4, 8);
  std::vector<char> starred(g.copy_count(), 0);
  starred[g.wire_id(0, 0)] = 1;  // erase {0,1}

  auto res = erased_flood(g, inputs, 2, starred);

  // Both directions across the erased wire are uncertain.
  REQUIRE(res.outputs[1][0].is_star());
  REQUIRE(res.outputs[0][1].is_star());
  // The far pair is uncertain too: a forged value via vertex 1 can tie the
  // genuine one via vertex 3.
  REQUIRE(res.outputs[2][0].is_star());
  REQUIRE(res.outputs[0][2].is_star());
  // Clean short paths decode definitely.
  REQUIRE(res.outputs[3][0] == inputs[0]);
  REQUIRE(res.outputs[2][1] == inputs[1]);
  // One star among two genuine votes is outvoted: still definite.
  REQUIRE(res.outputs[2][3] == inputs[3]);
  // But two stars tie two genuine votes: at two rounds, vertex 0 hears its
  // honest neighbor twice and the erased wire twice on every channel.
  REQUIRE(res.outputs[0][3].is_star());

  // Receipts: in round 1, vertex 1 sees a star from vertex 0 and silence on
  // channel 0 from vertex 2.
  REQUIRE(res.receipts[0][1][0][0].is_star());
  REQUIRE(res.receipts[0][1][1][0].is_bot());

  // Under the shift-by-one jobs, the transfer riding the erased wire and the
  // one decoded beside it are unprovable; the two on the far side survive.
  auto failing = erased_flood_failing_pairs(g, shift_perm(4, 1), inputs, 2, starred);
  REQUIRE(failing == std::vector<std::pair<int, int>>{{0, 1}, {3, 0}});
}

TEST_CASE("erased flooding with nothing erased is plain flooding") {
  MultiGraph g = petersen_graph();
  const auto inputs = distinct_inputs(10, 8);
  std::vector<char> starred(g.copy_count(), 0);

  auto res = erased_flood(g, inputs, g.diameter(), starred, /*record_receipts=*/false);
  for (int v = 0; v < 10; ++v)
    for (int u = 0; u < 10; ++u) REQUIRE(res.outputs[v][u] == inputs[u]);
}

// ===========================================================================
// The erased relay analysis dominates every menu behavior: whatever pairs a
// live adversary on the same wires can break are already in the erased set.

TEST_CASE("erased relay failing pairs cover every menu behavior") {
  for (const MultiGraph& h : {complete_graph(4), cycle_graph(4), complete_graph(7)}) {
    const int hop = h.diameter();
    AllPairsSet aps(&h, hop, 8);
    const auto inputs = aps.generic_inputs();
    Rng rng(99 + h.vertex_count());
    for (int trial = 0; trial < 4; ++trial) {
      const int k = 1 + static_cast<int>(rng.below(3));
      std::vector<char> starred(h.copy_count(), 0);
      std::vector<int> wires;
      for (auto w : rng.sample_without_replacement(h.copy_count(), k)) {
        starred[w] = 1;
        wires.push_back(static_cast<int>(w));
      }
      auto erased = erased_relay_failing_pairs(h, hop, starred);
      std::set<std::pair<int, int>> erased_set(erased.begin(), erased.end());

      for (const Behavior& b : default_menu(8)) {
        auto oc = aps.run(inputs, Adversary::uniform_behavior(wires_of(h, wires), b));
        for (auto pr : oc.failing_pairs) REQUIRE(erased_set.count(pr) == 1);
      }
    }
  }
}

TEST_CASE("erasing more wires never shrinks the relay failing set") {
  MultiGraph h = complete_graph(5);
  std::vector<char> one(h.copy_count(), 0), two(h.copy_count(), 0);
  one[h.wire_id(0, 0)] = 1;
  two[h.wire_id(0, 0)] = 1;
  two[h.wire_id(4, 0)] = 1;

  auto f1 = erased_relay_failing_pairs(h, 1, one);
  auto f2 = erased_relay_failing_pairs(h, 1, two);
  std::set<std::pair<int, int>> big(f2.begin(), f2.end());
  for (auto pr : f1) REQUIRE(big.count(pr) == 1);
}

// ===========================================================================
// Classification.

TEST_CASE("no corruption classifies to a clean product") {
  auto pr = replacement_product(complete_graph(4), cycle_graph(3));
  CorruptionSet cs;
  cs.total_copies = pr.z.copy_count();
  auto an = classify(pr, cs, default_menu(8), 1, 8);

  REQUIRE(an.eps == 0.0);
  REQUIRE(an.bad_cloud_fraction == 0.0);
  REQUIRE(an.doomed_fraction == 0.0);
  REQUIRE(an.corrupted_super_edges.empty());
}

TEST_CASE("a saturated cloud turns bad and poisons its super-edges") {
  auto pr = replacement_product(complete_graph(4), cycle_graph(3));
  // Two of cloud 3's three inner copies: way past sqrt(2 eps).
  std::vector<int> wires;
  for (int j = 0; j < 2; ++j) wires.push_back(pr.z.wire_id(pr.cloud_edges[3][j], 0));
  auto an = classify(pr, wires_of(pr.z, wires), default_menu(8), 1, 8);

  REQUIRE(an.clouds[3].bad);
  REQUIRE(an.bad_cloud_fraction == 0.25);
  for (std::size_t w = 0; w < pr.super_edges.size(); ++w) {
    const auto& se = pr.super_edges[w];
    const bool touches = se.u == 3 || se.v == 3;
    REQUIRE(static_cast<bool>(an.super_edge_bad[w]) == touches);
  }
}

TEST_CASE("a lone corrupted wire in a robust cloud dooms nobody at two hop rounds") {
  auto pr = replacement_product(complete_graph(8), complete_graph(7));
  // Cloud 0's copy of H edge 0 = the wire {0, 1} of that cloud's relay graph.
  std::vector<int> wires{pr.z.wire_id(pr.cloud_edges[0][0], 0)};

  // At two rounds per hop the receipt bags are deep enough to outvote
  // whatever one wire injects: nobody is doomed.
  auto an = classify(pr, wires_of(pr.z, wires), default_menu(8), 2, 8);
  REQUIRE_FALSE(an.clouds[0].bad);
  REQUIRE(an.clouds[0].doomed.empty());
  REQUIRE(an.corrupted_super_edges.empty());
  REQUIRE(an.doomed_fraction == 0.0);

  // At the bare diameter the bags hold two entries each, and a forging wire
  // can tie every bag it touches: both its endpoints are rightly written off.
  auto tight = classify(pr, wires_of(pr.z, wires), default_menu(8), 1, 8);
  REQUIRE_FALSE(tight.clouds[0].bad);
  REQUIRE(tight.clouds[0].doomed == std::vector<int>{0, 1});
}

TEST_CASE("concentrated damage dooms one local and flags exactly its super-edge") {
  auto pr = replacement_product(complete_graph(8), complete_graph(7));

  // Cut four of the six in-cloud wires at local 2 of cloud 0. Alone that
  // pushes the cloud over sqrt(2 eps), so pad eps with three lightly-touched
  // bundles elsewhere (one copy of six: below every bundle threshold).
  std::vector<int> wires;
  int cut = 0;
  for (std::size_t j = 0; j < pr.h.edges().size() && cut < 4; ++j) {
    const auto& he = pr.h.edges()[j];
    if (he.u == 2 || he.v == 2) {
      wires.push_back(pr.z.wire_id(pr.cloud_edges[0][j], 0));
      ++cut;
    }
  }
  REQUIRE(cut == 4);
  int padded = 0;
  for (std::size_t w = 0; w < pr.super_edges.size() && padded < 3; ++w) {
    const auto& se = pr.super_edges[w];
    if (se.u != 0 && se.v != 0) {
      wires.push_back(pr.z.wire_id(se.z_edge, 0));
      ++padded;
    }
  }
  REQUIRE(padded == 3);

  auto an = classify(pr, wires_of(pr.z, wires), default_menu(8), 2, 8);

  REQUIRE_FALSE(an.clouds[0].bad);
  REQUIRE(an.clouds[0].doomed == std::vector<int>{2});
  REQUIRE(an.doomed_fraction == Catch::Approx(1.0 / 56).margin(1e-12));

  // Exactly the super-edge at cloud 0's port 2 is written off: the doomed
  // local is its port, and no sampled bundle crossed its own threshold.
  for (std::size_t w = 0; w < pr.super_edges.size(); ++w) {
    const auto& se = pr.super_edges[w];
    const bool port_hit = (se.u == 0 && se.port_u == 2) || (se.v == 0 && se.port_v == 2);
    REQUIRE(static_cast<bool>(an.super_edge_bad[w]) == port_hit);
  }
}

TEST_CASE("erased classification agrees on cloud badness and covers the literal set") {
  auto pr = replacement_product(complete_graph(8), complete_graph(7));
  Rng rng(7);
  std::vector<int> wires;
  for (auto w : rng.sample_without_replacement(pr.z.copy_count(), 7))
    wires.push_back(static_cast<int>(w));
  const auto cs = wires_of(pr.z, wires);

  auto lit = classify(pr, cs, default_menu(8), 1, 8);
  auto era = classify_erased(pr, cs, 1);

  REQUIRE(era.eps == lit.eps);
  for (int c = 0; c < pr.n_g; ++c) {
    REQUIRE(era.clouds[c].bad == lit.clouds[c].bad);
    REQUIRE(era.clouds[c].corrupted_inner == lit.clouds[c].corrupted_inner);
  }
  REQUIRE(lit.menu_relative);
  REQUIRE_FALSE(era.menu_relative);
}

// ===========================================================================
// Replica verification and the per-transfer bound on live composed runs.

TEST_CASE("verified simulation: replica histories match the erased oracle") {
  auto pr = replacement_product(complete_graph(8), complete_graph(7));
  Rng rng(123);
  std::vector<int> pi(pr.z.vertex_count());
  for (int i = 0; i < pr.z.vertex_count(); ++i) pi[i] = i;
  rng.shuffle(pi);
  ComposedSet cset(&pr, pi, 1, 1, 8);
  const auto inputs = distinct_inputs(pr.z.vertex_count(), 8);

  // A mixed corruption: one whole bundle plus a few scattered wires.
  std::vector<int> wires;
  for (int c = 0; c < pr.k_h; ++c) wires.push_back(pr.z.wire_id(pr.super_edges[4].z_edge, c));
  for (auto w : rng.sample_without_replacement(pr.z.copy_count(), 4)) {
    const int wi = static_cast<int>(w);
    if (std::find(wires.begin(), wires.end(), wi) == wires.end()) wires.push_back(wi);
  }
  const auto cs = wires_of(pr.z, wires);
  auto adv = Adversary::uniform_behavior(cs, Behavior::drop());
  auto an = classify(pr, cs, default_menu(8), 1, 8);

  long long checked = 0;
  for (int unit = 0; unit < cset.units(); ++unit) {
    auto oc = cset.run_unit(unit, inputs, adv, /*record_history=*/true);
    auto check = verify_simulation(cset, unit, oc, inputs, an);
    REQUIRE(check.ok());
    checked += check.checked;
  }
  REQUIRE(checked > 0);

  // Mutation control: pretending the bundle is fine must surface violations,
  // otherwise the comparison is vacuous.
  auto blind = an;
  std::fill(blind.super_edge_bad.begin(), blind.super_edge_bad.end(), 0);
  blind.corrupted_super_edges.clear();
  auto oc0 = cset.run_unit(0, inputs, adv, true);
  auto bad_check = verify_simulation(cset, 0, oc0, inputs, blind);
  REQUIRE_FALSE(bad_check.ok());
}

TEST_CASE("every failing composed transfer is explained by the bound") {
  auto pr = replacement_product(complete_graph(8), complete_graph(7));
  Rng rng(321);
  std::vector<int> pi(pr.z.vertex_count());
  for (int i = 0; i < pr.z.vertex_count(); ++i) pi[i] = i;
  rng.shuffle(pi);
  ComposedSet cset(&pr, pi, 1, 1, 8);
  const auto inputs = distinct_inputs(pr.z.vertex_count(), 8);

  for (const Behavior& b : default_menu(8)) {
    std::vector<int> wires;
    for (auto w : rng.sample_without_replacement(pr.z.copy_count(), 8))
      wires.push_back(static_cast<int>(w));
    const auto cs = wires_of(pr.z, wires);
    auto adv = Adversary::uniform_behavior(cs, b);
    auto an = classify(pr, cs, default_menu(8), 1, 8);

    auto oc = cset.run_all(inputs, adv);
    auto ub = check_union_bound(cset, oc, inputs, an);
    REQUIRE(ub.ok());
    REQUIRE(ub.fail_fraction <= ub.explained_fraction + 1e-12);
  }
}
