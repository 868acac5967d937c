#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/replacement.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// The set of wires (edge copies) an adversary controls for a whole run.
struct CorruptionSet {
  std::vector<int> wires;  // sorted, unique wire ids
  int total_copies = 0;

  double fraction() const {
    return total_copies > 0 ? static_cast<double>(wires.size()) / total_copies : 0.0;
  }

  bool contains(int wire) const {
    return std::binary_search(wires.begin(), wires.end(), wire);
  }

  // One "edge copy" pair per line.
  void write(std::ostream& os, const MultiGraph& g) const {
    for (int w : wires) {
      auto wr = g.wire(w);
      os << wr.edge << ' ' << wr.copy << '\n';
    }
  }

  static CorruptionSet read(std::istream& is, const MultiGraph& g) {
    CorruptionSet cs;
    cs.total_copies = g.copy_count();
    int e, c;
    while (is >> e >> c) {
      if (e < 0 || e >= g.edge_count() || c < 0 || c >= g.edges()[e].mult)
        throw std::runtime_error("CorruptionSet::read: edge copy out of range");
      cs.wires.push_back(g.wire_id(e, c));
    }
    std::sort(cs.wires.begin(), cs.wires.end());
    cs.wires.erase(std::unique(cs.wires.begin(), cs.wires.end()), cs.wires.end());
    return cs;
  }
};

// What a corrupted wire does to each symbol crossing it. Deterministic rules
// come from the finite menu below; kAdaptive wires a user callback that may
// inspect anything captured in its closure (the engine invokes it only after
// every honest send of the round is fixed, i.e. adversaries are rushing).
struct Behavior {
  enum class Kind : std::uint8_t { kDrop, kBitflip, kForge, kAdaptive };

  Kind kind = Kind::kDrop;
  std::uint64_t forge_bits = 0;
  // round, wire id, slot index, sent symbol -> delivered symbol
  std::function<Message(int, int, int, const Message&)> fn;

  static Behavior drop() { return Behavior{Kind::kDrop, 0, nullptr}; }
  static Behavior bitflip() { return Behavior{Kind::kBitflip, 0, nullptr}; }
  static Behavior forge(std::uint64_t bits) { return Behavior{Kind::kForge, bits, nullptr}; }
  static Behavior adaptive(std::function<Message(int, int, int, const Message&)> f) {
    return Behavior{Kind::kAdaptive, 0, std::move(f)};
  }

  Message apply(int round, int wire, int slot, const Message& sent, int width) const {
    switch (kind) {
      case Kind::kDrop:
        return Message::bot();
      case Kind::kBitflip:
        return sent.is_value() ? Message::value(sent.bits() ^ 1ULL, sent.width()) : sent;
      case Kind::kForge:
        return Message::value(forge_bits, width);
      case Kind::kAdaptive:
        return fn(round, wire, slot, sent);
    }
    return Message::bot();
  }

  std::string name() const {
    switch (kind) {
      case Kind::kDrop: return "drop";
      case Kind::kBitflip: return "bitflip";
      case Kind::kForge: return forge_bits == 0 ? "forge0" : "forge1";
      case Kind::kAdaptive: return "adaptive";
    }
    return "?";
  }
};

// The finite behavior menu used by exhaustive enumeration and by the doomed
// set analysis: drop, low-bit flip, and two constant forgeries. A menu is a
// (crude) under-approximation of arbitrary adversarial behavior; results
// derived from it are labeled menu-relative by the reporting layer.
inline std::vector<Behavior> default_menu(int width) {
  const std::uint64_t ones = (width >= 64) ? ~0ULL : ((1ULL << width) - 1);
  return {Behavior::drop(), Behavior::bitflip(), Behavior::forge(0), Behavior::forge(ones)};
}

// A corruption set with one behavior per corrupted wire. `on_round` (rarely
// used) lets adaptive behaviors observe the complete honest send buffer of a
// round before any of their per-slot callbacks fire.
struct Adversary {
  CorruptionSet set;
  std::vector<Behavior> behaviors;  // parallel to set.wires
  std::function<void(int, const std::vector<std::vector<std::vector<Message>>>&)> on_round;

  static Adversary uniform_behavior(CorruptionSet cs, const Behavior& b) {
    Adversary a;
    a.behaviors.assign(cs.wires.size(), b);
    a.set = std::move(cs);
    return a;
  }

  static Adversary honest(int total_copies) {
    Adversary a;
    a.set.total_copies = total_copies;
    return a;
  }
};

enum class Strategy { kUniform, kVertexStar, kCloudConcentrated, kSuperEdgeConcentrated };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kUniform: return "uniform";
    case Strategy::kVertexStar: return "vertex-star";
    case Strategy::kCloudConcentrated: return "cloud";
    case Strategy::kSuperEdgeConcentrated: return "super-edge";
  }
  return "?";
}

inline Strategy strategy_from_name(const std::string& s) {
  if (s == "uniform") return Strategy::kUniform;
  if (s == "vertex-star") return Strategy::kVertexStar;
  if (s == "cloud") return Strategy::kCloudConcentrated;
  if (s == "super-edge") return Strategy::kSuperEdgeConcentrated;
  throw std::invalid_argument("unknown corruption strategy: " + s);
}

namespace detail {

// Greedy block filler shared by the concentrated strategies: walk candidate
// wire blocks in a seeded random order, take each block that still fits the
// budget whole, stop at the first that does not.
inline CorruptionSet fill_blocks(int total_copies, long long budget,
                                 std::vector<std::vector<int>> blocks, Rng& rng) {
  CorruptionSet cs;
  cs.total_copies = total_copies;
  std::vector<std::size_t> order(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::set<int> chosen;
  for (std::size_t bi : order) {
    const auto& blk = blocks[bi];
    long long fresh = 0;
    for (int w : blk)
      if (!chosen.count(w)) ++fresh;
    if (fresh == 0) continue;
    if (static_cast<long long>(chosen.size()) + fresh > budget) break;
    for (int w : blk) chosen.insert(w);
  }
  cs.wires.assign(chosen.begin(), chosen.end());
  return cs;
}

}  // namespace detail

// Draws a corruption set of at most floor(eps * #copies) wires. kUniform hits
// the budget exactly; the concentrated strategies fill whole vertex stars /
// cloud interiors / bundle majorities and never exceed it.
inline CorruptionSet sample_corruption(const MultiGraph& g, double eps, Strategy strategy,
                                       std::uint64_t seed, const ProductGraph* product = nullptr) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("sample_corruption: epsilon must lie in [0, 1]");
  const int copies = g.copy_count();
  // floor(eps * copies), with a hair of slack so that grid points meant to
  // land exactly on an integer are not knocked down by FP rounding.
  const long long budget = static_cast<long long>(eps * copies + 1e-9);
  Rng rng(seed);

  switch (strategy) {
    case Strategy::kUniform: {
      CorruptionSet cs;
      cs.total_copies = copies;
      auto picked = rng.sample_without_replacement(copies, static_cast<std::size_t>(budget));
      cs.wires.assign(picked.begin(), picked.end());
      return cs;
    }
    case Strategy::kVertexStar: {
      std::vector<std::vector<int>> stars(g.vertex_count());
      for (int v = 0; v < g.vertex_count(); ++v)
        for (const auto& p : g.ports(v)) stars[v].push_back(g.wire_id(p.edge, p.copy));
      return detail::fill_blocks(copies, budget, std::move(stars), rng);
    }
    case Strategy::kCloudConcentrated: {
      if (!product)
        throw std::invalid_argument("sample_corruption: cloud strategy needs the product graph");
      std::vector<std::vector<int>> blocks(product->n_g);
      for (int u = 0; u < product->n_g; ++u)
        for (int e : product->cloud_edges[u])
          for (int c = 0; c < product->z.edges()[e].mult; ++c)
            blocks[u].push_back(product->z.wire_id(e, c));
      return detail::fill_blocks(copies, budget, std::move(blocks), rng);
    }
    case Strategy::kSuperEdgeConcentrated: {
      if (!product)
        throw std::invalid_argument("sample_corruption: super-edge strategy needs the product graph");
      std::vector<std::vector<int>> blocks;
      blocks.reserve(product->super_edges.size());
      for (const auto& se : product->super_edges) {
        const int mult = product->z.edges()[se.z_edge].mult;
        std::vector<int> blk;
        for (int c = 0; c < mult / 2 + 1; ++c)  // strict majority of the bundle
          blk.push_back(product->z.wire_id(se.z_edge, c));
        blocks.push_back(std::move(blk));
      }
      return detail::fill_blocks(copies, budget, std::move(blocks), rng);
    }
  }
  throw std::logic_error("sample_corruption: unreachable");
}

// Deterministic enumeration of every adversary that corrupts at most k wires
// with every assignment of menu behaviors: subsets ordered by size then
// lexicographically, behavior assignments in mixed-radix order.
class ExhaustiveAdversary {
 public:
  ExhaustiveAdversary(const MultiGraph& g, int k, std::vector<Behavior> menu,
                      long long enumeration_budget = 2'000'000)
      : copies_(g.copy_count()), k_(k), menu_(std::move(menu)) {
    if (k_ < 0 || k_ > copies_)
      throw std::invalid_argument("ExhaustiveAdversary: k out of range");
    if (menu_.empty()) throw std::invalid_argument("ExhaustiveAdversary: empty behavior menu");
    const long long total = count(copies_, k_, static_cast<int>(menu_.size()));
    if (total < 0 || total > enumeration_budget)
      throw std::invalid_argument(
          "ExhaustiveAdversary: enumeration of " + std::to_string(total) +
          " adversaries exceeds the budget of " + std::to_string(enumeration_budget) +
          "; refusing");
    total_ = total;
  }

  static long long count(int copies, int k, int menu) {
    long long total = 0;
    long long subsets = 1;  // C(copies, j)
    long long menu_pow = 1;
    for (int j = 0; j <= k; ++j) {
      if (j > 0) {
        subsets = subsets * (copies - j + 1) / j;
        menu_pow *= menu;
      }
      long long term = subsets * menu_pow;
      total += term;
      if (total < 0) return -1;  // overflow sentinel
    }
    return total;
  }

  long long total() const { return total_; }

  // Fills the next adversary; false when exhausted. The first yield is the
  // honest adversary (empty corruption set).
  bool next(Adversary& out) {
    if (done_) return false;
    out.set.total_copies = copies_;
    out.set.wires.clear();
    out.behaviors.clear();
    for (std::size_t i = 0; i < subset_.size(); ++i) {
      out.set.wires.push_back(subset_[i]);
      out.behaviors.push_back(menu_[digits_[i]]);
    }
    advance();
    return true;
  }

 private:
  void advance() {
    // Bump behavior digits first (mixed radix, last digit fastest).
    for (int i = static_cast<int>(digits_.size()) - 1; i >= 0; --i) {
      if (++digits_[i] < static_cast<int>(menu_.size())) return;
      digits_[i] = 0;
    }
    // Then the subset, lexicographically within the current size.
    const int j = static_cast<int>(subset_.size());
    for (int i = j - 1; i >= 0; --i) {
      if (subset_[i] < copies_ - (j - i)) {
        ++subset_[i];
        for (int t = i + 1; t < j; ++t) subset_[t] = subset_[t - 1] + 1;
        return;
      }
    }
    // Then grow the subset size.
    if (j < k_) {
      subset_.resize(j + 1);
      for (int t = 0; t <= j; ++t) subset_[t] = t;
      digits_.assign(j + 1, 0);
      return;
    }
    done_ = true;
  }

  int copies_;
  int k_;
  std::vector<Behavior> menu_;
  long long total_ = 0;
  std::vector<int> subset_;
  std::vector<int> digits_;
  bool done_ = false;
};

}  // namespace aenet
