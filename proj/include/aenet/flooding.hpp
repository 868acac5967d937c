#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aenet/engine.hpp"
#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"

namespace aenet {

// Generic test payload for source index i: a mixed pattern with the low bits
// forced to 01 so it never collides with the all-zero / all-one forgery
// constants of the default behavior menu (a collision could only make a
// corrupted wire accidentally honest and mask a failure).
inline Message generic_payload(int i, int width) {
  std::uint64_t x = static_cast<std::uint64_t>(i) + 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  x = (x & ~3ULL) | 1ULL;
  return Message::value(x, width);
}

// Multi-source flooding. Every wire carries one slot per source vertex; each
// vertex keeps, per source, the bag of non-bot symbols received on that
// source's slot and forwards the bag's strict majority on every port (its own
// slot always carries its own input). Receivers decode a source's value as
// the bag majority after the last round. All |V| transfers ride one
// execution.
//
// The bag decode uses the erasure-aware majority rule, which coincides with
// the plain strict majority whenever no star symbols are present, so live
// runs and erased re-evaluations share this exact code path.
class FloodProgram {
 public:
  struct State {
    std::vector<VoteCounter> bags;  // one per source channel
  };
  using Output = std::vector<Message>;  // per source: decoded value

  FloodProgram(const MultiGraph* g, std::vector<Message> inputs, int rounds, int width)
      : g_(g), inputs_(std::move(inputs)), rounds_(rounds), width_(width) {
    if (static_cast<int>(inputs_.size()) != g_->vertex_count())
      throw std::invalid_argument("FloodProgram: one input per vertex required");
    if (rounds_ < 1) throw std::invalid_argument("FloodProgram: need at least one round");
  }

  int rounds() const { return rounds_; }
  int width() const { return width_; }
  const std::vector<Message>& inputs() const { return inputs_; }

  State init(int) const {
    State s;
    s.bags.resize(inputs_.size());
    return s;
  }

  void emit(const State& s, int /*t*/, int v, int /*port*/, std::vector<Message>& out) const {
    const int n = static_cast<int>(inputs_.size());
    out.resize(n);
    for (int u = 0; u < n; ++u)
      out[u] = (u == v) ? inputs_[v] : s.bags[u].tri_bag_majority();
  }

  void absorb(State& s, int /*t*/, int /*v*/, const std::vector<std::vector<Message>>& recv) const {
    const int n = static_cast<int>(inputs_.size());
    for (const auto& slots : recv) {
      if (static_cast<int>(slots.size()) != n) continue;  // idle or foreign traffic
      for (int u = 0; u < n; ++u)
        if (!slots[u].is_bot()) s.bags[u].add(slots[u]);
    }
  }

  Output decode(const State& s, int v) const {
    const int n = static_cast<int>(inputs_.size());
    Output out(n);
    for (int u = 0; u < n; ++u)
      out[u] = (u == v) ? inputs_[v] : s.bags[u].tri_bag_majority();
    return out;
  }

 private:
  const MultiGraph* g_;
  std::vector<Message> inputs_;
  int rounds_;
  int width_;
};

// Flooding with a fixed number of coordinates per source: channel (u, j)
// carries coordinate j of u's payload vector. The degenerate case C = 1 is
// FloodProgram with a different slot layout.
class VectorFloodProgram {
 public:
  struct State {
    std::vector<VoteCounter> bags;  // one per (source, coordinate) channel
  };
  using Output = std::vector<std::vector<Message>>;  // [source][coordinate]

  VectorFloodProgram(const MultiGraph* g, std::vector<std::vector<Message>> inputs, int rounds,
                     int width)
      : g_(g), inputs_(std::move(inputs)), rounds_(rounds), width_(width) {
    const int n = g_->vertex_count();
    if (static_cast<int>(inputs_.size()) != n)
      throw std::invalid_argument("VectorFloodProgram: one payload vector per vertex required");
    coords_ = inputs_.empty() ? 0 : static_cast<int>(inputs_[0].size());
    for (const auto& row : inputs_)
      if (static_cast<int>(row.size()) != coords_)
        throw std::invalid_argument("VectorFloodProgram: ragged payload vectors");
    if (coords_ < 1) throw std::invalid_argument("VectorFloodProgram: need at least one coordinate");
    if (rounds_ < 1) throw std::invalid_argument("VectorFloodProgram: need at least one round");
  }

  int rounds() const { return rounds_; }
  int width() const { return width_; }
  int coords() const { return coords_; }

  State init(int) const {
    State s;
    s.bags.resize(static_cast<std::size_t>(inputs_.size()) * coords_);
    return s;
  }

  void emit(const State& s, int /*t*/, int v, int /*port*/, std::vector<Message>& out) const {
    const int n = static_cast<int>(inputs_.size());
    out.resize(static_cast<std::size_t>(n) * coords_);
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < coords_; ++j) {
        const std::size_t k = static_cast<std::size_t>(u) * coords_ + j;
        out[k] = (u == v) ? inputs_[v][j] : s.bags[k].tri_bag_majority();
      }
  }

  void absorb(State& s, int /*t*/, int /*v*/, const std::vector<std::vector<Message>>& recv) const {
    const std::size_t total = static_cast<std::size_t>(inputs_.size()) * coords_;
    for (const auto& slots : recv) {
      if (slots.size() != total) continue;  // idle or foreign traffic
      for (std::size_t k = 0; k < total; ++k)
        if (!slots[k].is_bot()) s.bags[k].add(slots[k]);
    }
  }

  Output decode(const State& s, int v) const {
    const int n = static_cast<int>(inputs_.size());
    Output out(n, std::vector<Message>(coords_));
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < coords_; ++j) {
        const std::size_t k = static_cast<std::size_t>(u) * coords_ + j;
        out[u][j] = (u == v) ? inputs_[v][j] : s.bags[k].tri_bag_majority();
      }
    return out;
  }

 private:
  const MultiGraph* g_;
  std::vector<std::vector<Message>> inputs_;
  int rounds_;
  int width_;
  int coords_ = 0;
};

// The transfer jobs {u -> perm[u]} realized by flooding for a fixed number of
// rounds. One protocol per source; a transfer succeeds when the destination
// decodes exactly the injected value.
class FloodPermSet {
 public:
  FloodPermSet(const MultiGraph* g, std::vector<int> perm, int rounds, int width)
      : g_(g), perm_(std::move(perm)), rounds_(rounds), width_(width) {
    if (static_cast<int>(perm_.size()) != g_->vertex_count())
      throw std::invalid_argument("FloodPermSet: permutation size mismatch");
    const int dia = g_->diameter();
    if (dia < 0)
      throw std::invalid_argument("FloodPermSet: graph is disconnected, flooding cannot cover it");
    if (rounds_ < dia)
      throw std::invalid_argument("FloodPermSet: " + std::to_string(rounds_) +
                                  " rounds cannot reach hop distance " + std::to_string(dia) +
                                  "; some transfers would fail with no faults at all");
  }

  const MultiGraph& graph() const { return *g_; }
  const std::vector<int>& perm() const { return perm_; }
  int rounds() const { return rounds_; }
  int width() const { return width_; }

  FloodProgram program(std::vector<Message> inputs) const {
    return FloodProgram(g_, std::move(inputs), rounds_, width_);
  }

  std::vector<Message> generic_inputs() const {
    std::vector<Message> in(g_->vertex_count());
    for (int v = 0; v < g_->vertex_count(); ++v) in[v] = generic_payload(v, width_);
    return in;
  }

  struct Outcome {
    std::vector<Message> delivered;  // per source u: what perm[u] decoded for u
    std::vector<bool> ok;            // delivered == injected
    double failing_fraction = 0.0;
    Counters counters;
  };

  Outcome run(const std::vector<Message>& inputs, const Adversary& adv,
              const EngineOptions& opt_in = {}) const {
    EngineOptions opt = opt_in;
    opt.payload_width = width_;
    auto res = execute(*g_, program(inputs), adv, opt);
    Outcome oc;
    oc.counters = res.counters;
    const int n = g_->vertex_count();
    oc.delivered.resize(n);
    oc.ok.resize(n);
    int bad = 0;
    for (int u = 0; u < n; ++u) {
      oc.delivered[u] = res.outputs[perm_[u]][u];
      oc.ok[u] = (oc.delivered[u] == inputs[u]);
      if (!oc.ok[u]) ++bad;
    }
    oc.failing_fraction = n > 0 ? static_cast<double>(bad) / n : 0.0;
    return oc;
  }

  struct VectorOutcome {
    std::vector<std::vector<Message>> delivered;  // per source u: payload vector at perm[u]
    Counters counters;
  };

  // Same transfer jobs, each source carrying a payload vector instead of a
  // single value (the channel space multiplies by the coordinate count).
  VectorOutcome run_vector(std::vector<std::vector<Message>> inputs, const Adversary& adv,
                           const EngineOptions& opt_in = {}) const {
    EngineOptions opt = opt_in;
    opt.payload_width = width_;
    VectorFloodProgram prog(g_, std::move(inputs), rounds_, width_);
    auto res = execute(*g_, prog, adv, opt);
    VectorOutcome oc;
    oc.counters = res.counters;
    const int n = g_->vertex_count();
    oc.delivered.resize(n);
    for (int u = 0; u < n; ++u) oc.delivered[u] = res.outputs[perm_[u]][u];
    return oc;
  }

 private:
  const MultiGraph* g_;
  std::vector<int> perm_;
  int rounds_;
  int width_;
};

// Flooding-based realization of a permutation's transfer jobs.
inline FloodPermSet flood_majority_perm(const MultiGraph& g, std::vector<int> perm, int rounds,
                                        int width = 32) {
  return FloodPermSet(&g, std::move(perm), rounds, width);
}

}  // namespace aenet
