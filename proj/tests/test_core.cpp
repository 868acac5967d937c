#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "aenet/matching.hpp"
#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/random_regular.hpp"
#include "aenet/replacement.hpp"
#include "aenet/rng.hpp"
#include "aenet/spectral.hpp"

using namespace aenet;

namespace aenet {
// Ordering so test-local std::map can key on messages.
inline bool operator<(const Message& a, const Message& b) {
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind());
  if (a.width() != b.width()) return a.width() < b.width();
  return a.bits() < b.bits();
}
}  // namespace aenet

// ===========================================================================
// Rng

TEST_CASE("rng streams are deterministic and salt-independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.below(1000) == b.below(1000));

  // Deriving with different salts from the same seed gives streams that do
  // not track each other, and deriving twice with the same salt agrees.
  Rng base(7);
  Rng s1 = base.derive(1), s2 = base.derive(2), s1b = Rng(7).derive(1);
  int same = 0;
  for (int i = 0; i < 200; ++i) {
    auto x = s1.below(1 << 30), y = s2.below(1 << 30);
    if (x == y) ++same;
    REQUIRE(x == s1b.below(1 << 30));
  }
  REQUIRE(same < 3);
}

TEST_CASE("rng below stays in range and covers small ranges") {
  Rng r(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 300; ++i) {
    auto x = r.below(7);
    REQUIRE(x < 7);
    seen.insert(x);
  }
  REQUIRE(seen.size() == 7);
}

TEST_CASE("rng shuffle permutes and sampling is sorted without repeats") {
  Rng r(11);
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  r.shuffle(w);
  auto ws = w;
  std::sort(ws.begin(), ws.end());
  REQUIRE(ws == v);

  for (int trial = 0; trial < 20; ++trial) {
    auto s = r.sample_without_replacement(30, 7);
    REQUIRE(s.size() == 7);
    REQUIRE(std::is_sorted(s.begin(), s.end()));
    REQUIRE(std::adjacent_find(s.begin(), s.end()) == s.end());
    for (std::size_t x : s) REQUIRE(x < 30);
  }
}

// ===========================================================================
// Message and the majority rules.
//
// The two erasure-aware rules are checked against a brute-force oracle that
// enumerates every completion of the star entries and collapses the set of
// achievable strict-majority outcomes: a unique achievable outcome is
// reported as itself, anything ambiguous as star.

namespace {

const Message V1 = Message::value(1, 8);
const Message V2 = Message::value(2, 8);
const Message V3 = Message::value(3, 8);
const Message F1 = Message::value(101, 8);  // fresh values no fixed entry uses
const Message F2 = Message::value(102, 8);

// Strict majority over `total` slots given the per-value counts. Bot slots
// participate in the total but a bot "win" and no winner at all are the same
// observable outcome, so bots never need their own entry.
Message plain_majority_of_counts(const std::map<Message, int>& counts, int total) {
  for (const auto& [val, n] : counts)
    if (2 * n > total) return val;
  return Message::bot();
}

// Oracle for tri_strict_majority: bag size is fixed; each star slot holds
// some unknown symbol (bot or any value, fresh ones included).
Message oracle_tri_strict(const std::vector<Message>& fixed, int stars) {
  const std::vector<Message> choices = {Message::bot(), V1, V2, V3, F1, F2};
  std::set<std::uint64_t> outcomes;
  std::vector<int> pick(stars, 0);
  Message witness;
  while (true) {
    std::map<Message, int> counts;
    auto key = [](const Message& m) {
      return (static_cast<std::uint64_t>(m.kind()) << 32) | m.bits();
    };
    for (const Message& m : fixed)
      if (!m.is_bot()) ++counts[m];
    for (int i = 0; i < stars; ++i) {
      const Message& c = choices[pick[i]];
      if (!c.is_bot()) ++counts[c];
    }
    const int total = static_cast<int>(fixed.size()) + stars;
    Message out = plain_majority_of_counts(counts, total);
    outcomes.insert(key(out));
    witness = out;
    int i = 0;
    for (; i < stars; ++i) {
      if (++pick[i] < static_cast<int>(choices.size())) break;
      pick[i] = 0;
    }
    if (stars == 0 || i == stars) break;
  }
  if (outcomes.size() == 1) return witness;
  return Message::star();
}

// Oracle for tri_bag_majority: each star entry may be absent entirely or hold
// any non-bot value; bot never sits in a receipt bag.
Message oracle_tri_bag(const std::vector<Message>& fixed, int stars) {
  const std::vector<Message> choices = {Message::bot() /* = absent */, V1, V2, V3, F1, F2};
  std::set<std::uint64_t> outcomes;
  std::vector<int> pick(stars, 0);
  Message witness;
  while (true) {
    std::map<Message, int> counts;
    auto key = [](const Message& m) {
      return (static_cast<std::uint64_t>(m.kind()) << 32) | m.bits();
    };
    int total = 0;
    for (const Message& m : fixed) {
      ++counts[m];
      ++total;
    }
    for (int i = 0; i < stars; ++i) {
      const Message& c = choices[pick[i]];
      if (c.is_bot()) continue;  // absent
      ++counts[c];
      ++total;
    }
    Message out = plain_majority_of_counts(counts, total);
    outcomes.insert(key(out));
    witness = out;
    int i = 0;
    for (; i < stars; ++i) {
      if (++pick[i] < static_cast<int>(choices.size())) break;
      pick[i] = 0;
    }
    if (stars == 0 || i == stars) break;
  }
  if (outcomes.size() == 1) return witness;
  return Message::star();
}

}  // namespace

TEST_CASE("message values mask to width and sentinels compare correctly") {
  auto m = Message::value(0x1FF, 8);
  REQUIRE(m.bits() == 0xFF);
  REQUIRE(m.width() == 8);
  REQUIRE(m.bit_size() == 8);
  REQUIRE(Message::bot().bit_size() == 1);
  REQUIRE(Message::star().bit_size() == 1);
  REQUIRE(Message::bot() != Message::star());
  REQUIRE(Message::value(0, 8) != Message::bot());
  REQUIRE(Message::value(5, 8) == Message::value(5, 8));
  REQUIRE(Message::value(5, 8) != Message::value(5, 16));
}

TEST_CASE("strict majority: ties and empty decode to bot, bot can outvote") {
  REQUIRE(majority(std::vector<Message>{}) == Message::bot());
  REQUIRE(majority({V1, V1, V2}) == V1);
  REQUIRE(majority({V1, V2}) == Message::bot());
  // Two bots against one value: bot wins the count, which reads as failure.
  REQUIRE(majority({Message::bot(), Message::bot(), V1}) == Message::bot());
  REQUIRE(majority({Message::bot(), V1, V1}) == V1);
}

TEST_CASE("tri-state majorities match the completion oracle exhaustively") {
  // All multisets of fixed entries over {bot, V1, V2, V3} with up to 6 fixed
  // entries plus up to 4 stars. Oracles enumerate every star completion.
  for (int nb = 0; nb <= 6; ++nb)
    for (int n1 = 0; nb + n1 <= 6; ++n1)
      for (int n2 = 0; nb + n1 + n2 <= 6; ++n2)
        for (int n3 = 0; nb + n1 + n2 + n3 <= 6; ++n3)
          for (int stars = 0; stars <= 4; ++stars) {
            std::vector<Message> fixed;
            fixed.insert(fixed.end(), nb, Message::bot());
            fixed.insert(fixed.end(), n1, V1);
            fixed.insert(fixed.end(), n2, V2);
            fixed.insert(fixed.end(), n3, V3);

            VoteCounter strict_vc;
            for (const auto& m : fixed) strict_vc.add(m);
            for (int i = 0; i < stars; ++i) strict_vc.add(Message::star());
            INFO("bot=" << nb << " v1=" << n1 << " v2=" << n2 << " v3=" << n3
                        << " stars=" << stars);
            REQUIRE(strict_vc.tri_strict_majority() == oracle_tri_strict(fixed, stars));

            // Bags never contain bot; reuse the value entries only.
            VoteCounter bag_vc;
            std::vector<Message> bag_fixed;
            bag_fixed.insert(bag_fixed.end(), n1, V1);
            bag_fixed.insert(bag_fixed.end(), n2, V2);
            bag_fixed.insert(bag_fixed.end(), n3, V3);
            for (const auto& m : bag_fixed) bag_vc.add(m);
            for (int i = 0; i < stars; ++i) bag_vc.add(Message::star());
            REQUIRE(bag_vc.tri_bag_majority() == oracle_tri_bag(bag_fixed, stars));
          }
}

TEST_CASE("tri-state majorities without stars reduce to the strict rule") {
  Rng r(5);
  for (int trial = 0; trial < 200; ++trial) {
    VoteCounter vc;
    std::vector<Message> all;
    const int len = 1 + static_cast<int>(r.below(9));
    for (int i = 0; i < len; ++i) {
      auto roll = r.below(4);
      Message m = roll == 0 ? Message::bot() : Message::value(roll, 8);
      vc.add(m);
      all.push_back(m);
    }
    REQUIRE(vc.tri_strict_majority() == vc.strict_majority());
  }
}

// ===========================================================================
// MultiGraph

TEST_CASE("multigraph merges duplicate edges and rejects bad input") {
  MultiGraph g(4);
  g.add_edge(0, 1, 2);
  g.add_edge(1, 0, 1);  // merges with the above
  g.add_edge(2, 3);
  REQUIRE(g.edge_count() == 2);
  REQUIRE(g.copy_count() == 4);
  REQUIRE(g.degree(0) == 3);
  REQUIRE(g.degree(3) == 1);
  REQUIRE_THROWS_AS(g.add_edge(1, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_edge(0, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(g.add_edge(0, 2, 0), std::invalid_argument);
}

TEST_CASE("ports enumerate incident wire copies in canonical order") {
  MultiGraph g(3);
  g.add_edge(1, 2, 2);
  g.add_edge(0, 1);
  // Edges sort to (0,1) then (1,2); vertex 1's ports list (0,1) copy 0, then
  // (1,2) copies 0 and 1.
  auto ports = g.ports(1);
  REQUIRE(ports.size() == 3);
  REQUIRE(g.edges()[ports[0].edge].u == 0);
  REQUIRE(ports[0].copy == 0);
  REQUIRE(ports[0].peer == 0);
  REQUIRE(g.edges()[ports[1].edge].u == 1);
  REQUIRE(g.edges()[ports[1].edge].v == 2);
  REQUIRE(ports[1].copy == 0);
  REQUIRE(ports[2].copy == 1);
  // Port back-references agree: the peer's port index points back here.
  for (int v = 0; v < 3; ++v)
    for (int p = 0; p < g.degree(v); ++p) {
      const auto& pr = g.ports(v)[p];
      const auto& back = g.ports(pr.peer)[pr.peer_port];
      REQUIRE(back.peer == v);
      REQUIRE(back.peer_port == p);
      REQUIRE(back.edge == pr.edge);
      REQUIRE(back.copy == pr.copy);
    }
}

TEST_CASE("named graphs have their textbook shape") {
  auto k4 = complete_graph(4);
  REQUIRE(k4.vertex_count() == 4);
  REQUIRE(k4.edge_count() == 6);
  REQUIRE(k4.is_regular());
  REQUIRE(k4.degree(0) == 3);
  REQUIRE(k4.diameter() == 1);

  auto c6 = cycle_graph(6);
  REQUIRE(c6.edge_count() == 6);
  REQUIRE(c6.is_regular());
  REQUIRE(c6.degree(0) == 2);
  REQUIRE(c6.diameter() == 3);

  auto c2 = cycle_graph(2);  // doubled edge, still 2-regular
  REQUIRE(c2.edge_count() == 1);
  REQUIRE(c2.copy_count() == 2);
  REQUIRE(c2.is_regular());

  auto pet = petersen_graph();
  REQUIRE(pet.vertex_count() == 10);
  REQUIRE(pet.edge_count() == 15);
  REQUIRE(pet.is_regular());
  REQUIRE(pet.degree(0) == 3);
  REQUIRE(pet.diameter() == 2);
  REQUIRE(pet.is_connected());
  // Petersen is triangle-free: no two neighbors of any vertex are adjacent.
  for (int v = 0; v < 10; ++v) {
    const auto& ps = pet.ports(v);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        int a = ps[i].peer, b = ps[j].peer;
        for (const auto& pr : pet.ports(a)) REQUIRE(pr.peer != b);
      }
  }
}

TEST_CASE("bfs distances and connectivity") {
  MultiGraph g(5);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(3, 4);
  REQUIRE_FALSE(g.is_connected());
  REQUIRE(g.diameter() == -1);
  auto d = g.bfs_distances(0);
  REQUIRE(d[2] == 2);
  REQUIRE(d[3] == -1);
}

TEST_CASE("text round-trip preserves the graph exactly") {
  auto pet = petersen_graph();
  auto back = MultiGraph::from_string(pet.to_string());
  REQUIRE(back == pet);

  MultiGraph g(3);
  g.add_edge(0, 2, 3);
  g.add_edge(0, 1);
  REQUIRE(MultiGraph::from_string(g.to_string()) == g);

  REQUIRE_THROWS_AS(MultiGraph::from_string("not a graph"), std::invalid_argument);
  REQUIRE_THROWS_AS(MultiGraph::from_string("3 2\n0 3 1\n"), std::invalid_argument);
}

// ===========================================================================
// Random regular graphs

TEST_CASE("random regular graphs are simple, regular, and usually connected") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto g = random_regular_graph(16, 4, seed);
    REQUIRE(g.vertex_count() == 16);
    REQUIRE(g.is_regular());
    REQUIRE(g.degree(0) == 4);
    for (int e = 0; e < g.edge_count(); ++e) REQUIRE(g.edges()[e].mult == 1);
  }
  // Odd vertex count requires even degree and works via cycle unions.
  auto g9 = random_regular_graph(9, 4, 7);
  REQUIRE(g9.is_regular());
  REQUIRE(g9.degree(0) == 4);

  REQUIRE_THROWS_AS(random_regular_graph(9, 3, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_regular_graph(4, 4, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_regular_graph(0, 2, 1), std::invalid_argument);
}

TEST_CASE("random regular graphs are seed-deterministic") {
  auto a = random_regular_graph(20, 3, 99);
  auto b = random_regular_graph(20, 3, 99);
  auto c = random_regular_graph(20, 3, 100);
  REQUIRE(a == b);
  REQUIRE_FALSE(a == c);
}

// ===========================================================================
// Spectral estimate, checked against a dense eigensolver.

namespace {

double dense_second_eigenvalue_ratio(const MultiGraph& g) {
  const int n = g.vertex_count();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edges()[e];
    A(ed.u, ed.v) += ed.mult;
    A(ed.v, ed.u) += ed.mult;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  // Second-largest by value; the largest is the degree (connected regular).
  double second = ev(n - 2);
  return std::abs(second) / g.degree(0);
}

}  // namespace

TEST_CASE("spectral estimate matches closed forms on small graphs") {
  REQUIRE(spectral_gap_estimate(complete_graph(4)) ==
          Catch::Approx(1.0 / 3.0).margin(1e-9));
  REQUIRE(spectral_gap_estimate(cycle_graph(6)) == Catch::Approx(0.5).margin(1e-9));
  // Petersen: eigenvalues 3, 1, -2, so the second-largest gives 1/3.
  REQUIRE(spectral_gap_estimate(petersen_graph()) ==
          Catch::Approx(1.0 / 3.0).margin(1e-9));
}

TEST_CASE("spectral estimate tracks the dense solver on random graphs") {
  for (std::uint64_t seed : {11, 12, 13}) {
    auto g = random_regular_graph(64, 6, seed);
    if (!g.is_connected()) continue;
    double expect = dense_second_eigenvalue_ratio(g);
    double got = spectral_gap_estimate(g, 4000, 1);
    INFO("seed " << seed << " expect " << expect << " got " << got);
    REQUIRE(got == Catch::Approx(expect).margin(2e-3));
  }
  MultiGraph disc(4);
  disc.add_edge(0, 1, 2);
  disc.add_edge(2, 3, 2);
  REQUIRE(spectral_gap_estimate(disc) == 1.0);
}

// ===========================================================================
// Replacement product

TEST_CASE("balanced product of K4 and C3 has the textbook shape") {
  auto g = complete_graph(4);
  auto h = cycle_graph(3);
  auto pr = replacement_product(g, h);

  REQUIRE(pr.balanced());
  REQUIRE(pr.z.vertex_count() == 12);
  REQUIRE(pr.z.is_regular());
  REQUIRE(pr.z.degree(0) == 4);  // twice the inner degree
  REQUIRE(pr.inner_copy_count() == 12);
  REQUIRE(pr.cross_copy_count() == 12);
  REQUIRE(static_cast<int>(pr.super_edges.size()) == 6);

  for (const auto& se : pr.super_edges) {
    REQUIRE(se.u != se.v);
    // Endpoints are ports: in the balanced case every cloud vertex is one.
    REQUIRE(pr.is_port(se.port_u));
    REQUIRE(pr.is_port(se.port_v));
    // The super-edge lives on the cross Z-edge between its two ports.
    const auto& ze = pr.z.edges()[se.z_edge];
    int zu = pr.z_vertex(se.u, se.port_u), zv = pr.z_vertex(se.v, se.port_v);
    REQUIRE(std::minmax(zu, zv) == std::minmax(ze.u, ze.v));
    REQUIRE(ze.mult == 2);  // one parallel copy per inner degree
    // Port numbering is inherited from the outer graph's own port order.
    REQUIRE(pr.g.ports(se.u)[se.port_u].edge == se.g_edge);
    REQUIRE(pr.g.ports(se.v)[se.port_v].edge == se.g_edge);
  }

  // Inner and cross wires partition the copies of Z.
  int inner = 0, cross = 0;
  for (int e = 0; e < pr.z.edge_count(); ++e) {
    if (pr.z_edge_super[e] >= 0)
      cross += pr.z.edges()[e].mult;
    else
      inner += pr.z.edges()[e].mult;
  }
  REQUIRE(inner == 12);
  REQUIRE(cross == 12);

  // Every cloud holds one full copy of the inner graph.
  for (int c = 0; c < 4; ++c) REQUIRE(static_cast<int>(pr.cloud_edges[c].size()) == 3);
}

TEST_CASE("extended product allows extra non-port inner vertices") {
  auto g = petersen_graph();
  auto h = cycle_graph(4);
  auto pr = replacement_product(g, h);

  REQUIRE_FALSE(pr.balanced());
  REQUIRE(pr.z.vertex_count() == 40);
  REQUIRE_FALSE(pr.z.is_regular());
  REQUIRE(pr.cross_copy_count() == 30);
  REQUIRE(pr.inner_copy_count() == 40);

  for (int c = 0; c < 10; ++c)
    for (int a = 0; a < 4; ++a) {
      int deg = pr.z.degree(pr.z_vertex(c, a));
      REQUIRE(deg == (a < 3 ? 4 : 2));  // ports carry the cross copies
      REQUIRE(pr.is_port(a) == (a < 3));
    }

  REQUIRE(pr.cloud_of(17) == 4);
  REQUIRE(pr.local_of(17) == 1);
  REQUIRE(pr.z_vertex(4, 1) == 17);
}

TEST_CASE("product construction rejects mismatched shapes") {
  auto g = complete_graph(4);  // 3-regular
  REQUIRE_THROWS_AS(replacement_product(g, cycle_graph(2)), std::invalid_argument);
  REQUIRE_THROWS_AS(replacement_product(g, cycle_graph(13)), std::invalid_argument);
  MultiGraph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  REQUIRE_THROWS_AS(replacement_product(path, cycle_graph(3)),
                    std::invalid_argument);
}

// ===========================================================================
// Matching decomposition

namespace {

void check_decomposition(const ProductGraph& pr, const std::vector<int>& pi) {
  auto dec = permutation_to_matchings(pr, pi);
  REQUIRE(static_cast<int>(dec.sets.size()) == pr.n_h);

  // Each set is a permutation of clouds; sources partition the product
  // vertices; and following matching t from cloud_of(u) must land on
  // cloud_of(pi(u)) for the u assigned to t.
  std::vector<int> assigned(pr.z.vertex_count(), -1);
  for (std::size_t t = 0; t < dec.sets.size(); ++t) {
    const auto& m = dec.sets[t];
    REQUIRE(static_cast<int>(m.perm.size()) == pr.n_g);
    std::vector<char> hit(pr.n_g, 0);
    for (int c = 0; c < pr.n_g; ++c) {
      REQUIRE((m.perm[c] >= 0 && m.perm[c] < pr.n_g));
      hit[m.perm[c]] = 1;
    }
    for (int c = 0; c < pr.n_g; ++c) REQUIRE(hit[c] == 1);
    for (int c = 0; c < pr.n_g; ++c) {
      int u = m.source[c];
      REQUIRE(pr.cloud_of(u) == c);
      REQUIRE(pr.cloud_of(pi[u]) == m.perm[c]);
      REQUIRE(assigned[u] == -1);
      assigned[u] = static_cast<int>(t);
    }
  }
  for (int u = 0; u < pr.z.vertex_count(); ++u) REQUIRE(assigned[u] >= 0);
}

}  // namespace

TEST_CASE("permutations decompose into one cloud matching per inner vertex") {
  auto pr = replacement_product(complete_graph(4), cycle_graph(3));
  Rng rng(17);

  std::vector<int> ident(12);
  std::iota(ident.begin(), ident.end(), 0);
  check_decomposition(pr, ident);

  for (int trial = 0; trial < 25; ++trial) {
    auto pi = ident;
    rng.shuffle(pi);
    check_decomposition(pr, pi);
  }

  // The extended product decomposes too (4 matchings for 4 inner vertices).
  auto prx = replacement_product(petersen_graph(), cycle_graph(4));
  std::vector<int> identx(40);
  std::iota(identx.begin(), identx.end(), 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto pi = identx;
    rng.shuffle(pi);
    check_decomposition(prx, pi);
  }
}

TEST_CASE("non-permutations are rejected") {
  auto pr = replacement_product(complete_graph(4), cycle_graph(3));
  std::vector<int> bad(12, 0);
  REQUIRE_THROWS_AS(permutation_to_matchings(pr, bad), std::invalid_argument);
  std::vector<int> wrong_size(5);
  std::iota(wrong_size.begin(), wrong_size.end(), 0);
  REQUIRE_THROWS_AS(permutation_to_matchings(pr, wrong_size), std::invalid_argument);
}

TEST_CASE("round-robin matchings pair everyone with everyone") {
  for (int m : {2, 4, 6, 5, 7}) {
    auto rounds = round_robin_matchings(m);
    REQUIRE(static_cast<int>(rounds.size()) == (m % 2 == 0 ? m - 1 : m));
    std::set<std::pair<int, int>> pairs;
    for (const auto& perm : rounds) {
      REQUIRE(static_cast<int>(perm.size()) == m);
      for (int i = 0; i < m; ++i) {
        REQUIRE(perm[perm[i]] == i);  // involution
        if (i < perm[i]) pairs.insert({i, perm[i]});
      }
    }
    REQUIRE(static_cast<int>(pairs.size()) == m * (m - 1) / 2);
  }
}
