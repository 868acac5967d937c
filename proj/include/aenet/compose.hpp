#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aenet/all_pairs.hpp"
#include "aenet/engine.hpp"
#include "aenet/flooding.hpp"
#include "aenet/matching.hpp"
#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/replacement.hpp"

namespace aenet {

namespace detail {

// In-cloud relay machinery: two flooding hops over the cloud's own wires,
// with C payload coordinates per source. Mirrors RelayAllPairsProgram, but
// runs as a sub-schedule of a larger program and reads its payloads from the
// enclosing phase instead of fixed inputs.
struct RelayScratch {
  std::vector<VoteCounter> hop1;  // (b, j): source b, coordinate j
  std::vector<Message> relay;     // frozen own estimate per (b, j)
  std::vector<VoteCounter> hop2;  // (w, b, j): relay w's forward of (b, j)

  void setup(int n_h, int coords) {
    hop1.assign(static_cast<std::size_t>(n_h) * coords, {});
    relay.assign(static_cast<std::size_t>(n_h) * coords, Message::bot());
    hop2.assign(static_cast<std::size_t>(n_h) * n_h * coords, {});
  }

  void reset(int n_h, int coords) {
    for (auto& b : hop1) b.clear();
    for (auto& b : hop2) b.clear();
    relay.assign(static_cast<std::size_t>(n_h) * coords, Message::bot());
  }
};

// The flood-forward slot vector for one hop-1 round: (b, j) carries my own
// payload on my source row and my bag majority elsewhere.
template <class Payload>
void relay_hop1_emit(const RelayScratch& s, int n_h, int coords, int me, Payload&& payload,
                     std::vector<Message>& out) {
  out.resize(static_cast<std::size_t>(n_h) * coords);
  for (int b = 0; b < n_h; ++b)
    for (int j = 0; j < coords; ++j) {
      const std::size_t k = static_cast<std::size_t>(b) * coords + j;
      out[k] = (b == me) ? payload(j) : s.hop1[k].tri_bag_majority();
    }
}

inline void relay_hop2_emit(const RelayScratch& s, int n_h, int coords, int me,
                            std::vector<Message>& out) {
  out.resize(static_cast<std::size_t>(n_h) * n_h * coords);
  for (int w = 0; w < n_h; ++w)
    for (int b = 0; b < n_h; ++b)
      for (int j = 0; j < coords; ++j) {
        const std::size_t bj = static_cast<std::size_t>(b) * coords + j;
        const std::size_t k = (static_cast<std::size_t>(w) * n_h + b) * coords + j;
        out[k] = (w == me) ? s.relay[bj] : s.hop2[k].tri_bag_majority();
      }
}

inline void relay_hop1_absorb(RelayScratch& s, int n_h, int coords,
                              const std::vector<Message>& slots) {
  const std::size_t total = static_cast<std::size_t>(n_h) * coords;
  if (slots.size() != total) return;  // idle or foreign traffic
  for (std::size_t k = 0; k < total; ++k)
    if (!slots[k].is_bot()) s.hop1[k].add(slots[k]);
}

inline void relay_hop2_absorb(RelayScratch& s, int n_h, int coords,
                              const std::vector<Message>& slots) {
  const std::size_t total = static_cast<std::size_t>(n_h) * n_h * coords;
  if (slots.size() != total) return;
  for (std::size_t k = 0; k < total; ++k)
    if (!slots[k].is_bot()) s.hop2[k].add(slots[k]);
}

template <class Payload>
void relay_freeze(RelayScratch& s, int n_h, int coords, int me, Payload&& payload) {
  for (int b = 0; b < n_h; ++b)
    for (int j = 0; j < coords; ++j) {
      const std::size_t k = static_cast<std::size_t>(b) * coords + j;
      s.relay[k] = (b == me) ? payload(j) : s.hop1[k].tri_bag_majority();
    }
}

// Pair decode (a -> me) for coordinate j: majority over the n_h relay
// verdicts, my own frozen estimate standing in for myself.
inline Message relay_pair_decode(const RelayScratch& s, int n_h, int coords, int me, int a,
                                 int j) {
  const std::size_t aj = static_cast<std::size_t>(a) * coords + j;
  VoteCounter vc;
  for (int w = 0; w < n_h; ++w)
    vc.add(w == me ? s.relay[aj]
                   : s.hop2[(static_cast<std::size_t>(w) * n_h + a) * coords + j]
                         .tri_bag_majority());
  return vc.tri_strict_majority();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// One composed transmission program on the product graph, serving the sources
// of a single cloud-level matching.
//
// Schedule: an in-cloud broadcast (each source spreads its message through
// its own cloud), then one block per outer round: gather each cloud vertex's
// outer emissions to the ports, push each port's majority across its parallel
// wire bundle, scatter the received value back through the destination cloud,
// and advance a per-vertex replica of the outer program with the scattered
// values as its receipts. After the last block every replica decodes its
// outer table; the destination of a transfer reads its own source's channel.
//
// The outer protocol family enters through `OuterSet::program(inputs)`. The
// replicas rely on one locality property of the returned program: vertex v's
// emissions, absorption, and decoding must read no input entry but inputs[v]
// (flooding satisfies this: every other channel is served from receipt bags).
template <class OuterSet = FloodPermSet>
class ComposedProgram {
 public:
  using OuterProgram = decltype(std::declval<const OuterSet&>().program(
      std::declval<std::vector<Message>>()));
  using Output = typename OuterProgram::Output;

  struct State {
    detail::RelayScratch bc;  // broadcast scratch, one coordinate
    detail::RelayScratch gs;  // gather/scatter scratch, d_g * n_g coordinates

    std::optional<OuterProgram> outer;       // this vertex's outer replica
    typename OuterProgram::State outer_state;

    std::vector<Message> gather_payload;   // [(p, c)]: my outer emissions, current outer round
    std::vector<Message> scatter_payload;  // [(p, c)]: my bundle result if I am port p
    std::vector<Message> port_gathered;    // [c]: gather majority at my port (ports only)
    std::vector<Message> bundle_value;     // [c]: bundle majority at my port (ports only)
    std::vector<Message> scatter_in;       // [(p, c)]: scattered values, all vertices

    // One entry per outer round when history recording is on: the scatter_in
    // snapshot this replica folded into its outer state.
    std::vector<std::vector<Message>> history;
  };

  ComposedProgram(const ProductGraph* pr, const OuterSet* outer_set,
                  const LabeledMatching* matching, std::vector<Message> inputs_z,
                  int inner_hop_rounds, int width, bool record_history)
      : pr_(pr),
        outer_set_(outer_set),
        matching_(matching),
        inputs_z_(std::move(inputs_z)),
        hop_(inner_hop_rounds),
        width_(width),
        record_(record_history) {
    if (static_cast<int>(inputs_z_.size()) != pr_->z.vertex_count())
      throw std::invalid_argument("ComposedProgram: one input per product vertex required");
    if (hop_ < 1) throw std::invalid_argument("ComposedProgram: need at least one inner round");
    r1_ = outer_set_->rounds();
    r2_ = 2 * hop_;
    coords_ = pr_->d_g * pr_->n_g;
    port_kind_.resize(pr_->z.vertex_count());
    for (int zv = 0; zv < pr_->z.vertex_count(); ++zv) {
      const auto& ports = pr_->z.ports(zv);
      auto& kinds = port_kind_[zv];
      kinds.resize(ports.size());
      for (std::size_t p = 0; p < ports.size(); ++p)
        kinds[p] = (pr_->z_edge_cloud[ports[p].edge] >= 0) ? 0 : 1;
    }
  }

  int rounds() const { return r2_ + r1_ * (2 * r2_ + 1); }
  int outer_rounds() const { return r1_; }
  int width() const { return width_; }

  State init(int zv) const {
    State s;
    s.bc.setup(pr_->n_h, 1);
    s.gs.setup(pr_->n_h, coords_);
    s.gather_payload.assign(coords_, Message::bot());
    s.scatter_payload.assign(coords_, Message::bot());
    s.scatter_in.assign(coords_, Message::bot());
    if (pr_->is_port(pr_->local_of(zv))) {
      s.port_gathered.assign(pr_->n_g, Message::bot());
      s.bundle_value.assign(pr_->n_g, Message::bot());
    }
    return s;
  }

  void emit(const State& s, int t, int zv, int port, std::vector<Message>& out) const {
    const Phase ph = phase_of(t);
    const int local = pr_->local_of(zv);
    const bool inner = port_kind_[zv][port] == 0;
    if (ph.kind == Phase::kBundle) {
      if (!inner && !s.port_gathered.empty()) out = s.port_gathered;
      return;  // inner wires carry nothing this round
    }
    if (!inner) return;  // cross wires carry nothing during relay rounds
    const bool broadcast = ph.kind == Phase::kBroadcast;
    const detail::RelayScratch& sc = broadcast ? s.bc : s.gs;
    const int coords = broadcast ? 1 : coords_;
    auto payload = [&](int j) { return phase_payload(s, ph, zv, j); };
    if (ph.sub <= hop_)
      detail::relay_hop1_emit(sc, pr_->n_h, coords, local, payload, out);
    else
      detail::relay_hop2_emit(sc, pr_->n_h, coords, local, out);
  }

  void absorb(State& s, int t, int zv, const std::vector<std::vector<Message>>& recv) const {
    const Phase ph = phase_of(t);
    const int local = pr_->local_of(zv);
    const auto& kinds = port_kind_[zv];

    if (ph.kind == Phase::kBundle) {
      if (!s.bundle_value.empty()) {
        std::vector<VoteCounter> per_channel(pr_->n_g);
        for (std::size_t p = 0; p < recv.size(); ++p) {
          if (kinds[p] != 1) continue;
          const auto& slots = recv[p];
          if (static_cast<int>(slots.size()) != pr_->n_g) continue;
          for (int c = 0; c < pr_->n_g; ++c) per_channel[c].add(slots[c]);
        }
        for (int c = 0; c < pr_->n_g; ++c)
          s.bundle_value[c] = per_channel[c].tri_strict_majority();
        for (int c = 0; c < pr_->n_g; ++c)
          s.scatter_payload[static_cast<std::size_t>(local) * pr_->n_g + c] = s.bundle_value[c];
      }
      s.gs.reset(pr_->n_h, coords_);  // clean slate for the scatter hops
      return;
    }

    const bool broadcast = ph.kind == Phase::kBroadcast;
    detail::RelayScratch& sc = broadcast ? s.bc : s.gs;
    const int coords = broadcast ? 1 : coords_;
    for (std::size_t p = 0; p < recv.size(); ++p) {
      if (kinds[p] != 0) continue;
      if (ph.sub <= hop_)
        detail::relay_hop1_absorb(sc, pr_->n_h, coords, recv[p]);
      else
        detail::relay_hop2_absorb(sc, pr_->n_h, coords, recv[p]);
    }
    if (ph.sub == hop_) {
      auto payload = [&](int j) { return phase_payload(s, ph, zv, j); };
      detail::relay_freeze(sc, pr_->n_h, coords, local, payload);
    }
    if (ph.sub == r2_) finish_phase(s, ph, zv);
  }

  Output decode(const State& s, int zv) const {
    return s.outer->decode(s.outer_state, pr_->cloud_of(zv));
  }

 private:
  struct Phase {
    enum Kind { kBroadcast, kGather, kBundle, kScatter } kind;
    int outer_t = 0;  // 1-based outer round, phases after the broadcast
    int sub = 0;      // 1-based round within a relay phase
  };

  Phase phase_of(int t) const {
    Phase ph;
    if (t <= r2_) {
      ph.kind = Phase::kBroadcast;
      ph.sub = t;
      return ph;
    }
    const int q = t - r2_ - 1;
    const int block = 2 * r2_ + 1;
    ph.outer_t = q / block + 1;
    const int off = q % block;
    if (off < r2_) {
      ph.kind = Phase::kGather;
      ph.sub = off + 1;
    } else if (off == r2_) {
      ph.kind = Phase::kBundle;
    } else {
      ph.kind = Phase::kScatter;
      ph.sub = off - r2_;
    }
    return ph;
  }

  // The value this vertex injects on its own source row during the phase.
  Message phase_payload(const State& s, const Phase& ph, int zv, int j) const {
    switch (ph.kind) {
      case Phase::kBroadcast:
        return inputs_z_[zv];
      case Phase::kGather:
        return s.gather_payload[j];
      case Phase::kScatter:
        return s.scatter_payload[j];
      default:
        return Message::bot();
    }
  }

  // End-of-phase transitions, run after the phase's last receipts landed.
  void finish_phase(State& s, const Phase& ph, int zv) const {
    const int cloud = pr_->cloud_of(zv);
    const int local = pr_->local_of(zv);
    if (ph.kind == Phase::kBroadcast) {
      // Learn my cloud's message and stand up the outer replica with it.
      const int src = pr_->local_of(matching_->source[cloud]);
      const Message mhat = (src == local)
                               ? inputs_z_[zv]
                               : detail::relay_pair_decode(s.bc, pr_->n_h, 1, local, src, 0);
      std::vector<Message> outer_inputs(pr_->n_g, Message::bot());
      outer_inputs[cloud] = mhat.is_value() ? mhat : Message::bot();
      s.outer.emplace(outer_set_->program(std::move(outer_inputs)));
      s.outer_state = s.outer->init(cloud);
      refresh_gather_payload(s, 1, cloud);
      return;
    }
    if (ph.kind == Phase::kGather) {
      if (!s.port_gathered.empty()) {
        for (int c = 0; c < pr_->n_g; ++c) {
          const int j = local * pr_->n_g + c;
          VoteCounter vc;
          for (int b = 0; b < pr_->n_h; ++b)
            vc.add(detail::relay_pair_decode(s.gs, pr_->n_h, coords_, local, b, j));
          s.port_gathered[c] = vc.tri_strict_majority();
        }
      }
      return;
    }
    if (ph.kind == Phase::kScatter) {
      // Collect the scattered per-edge values and fold them into the replica.
      for (int p = 0; p < pr_->d_g; ++p)
        for (int c = 0; c < pr_->n_g; ++c) {
          const int j = p * pr_->n_g + c;
          s.scatter_in[j] = detail::relay_pair_decode(s.gs, pr_->n_h, coords_, local, p, j);
        }
      std::vector<std::vector<Message>> outer_recv(pr_->d_g);
      for (int p = 0; p < pr_->d_g; ++p)
        outer_recv[p].assign(s.scatter_in.begin() + static_cast<std::size_t>(p) * pr_->n_g,
                             s.scatter_in.begin() + static_cast<std::size_t>(p + 1) * pr_->n_g);
      s.outer->absorb(s.outer_state, ph.outer_t, cloud, outer_recv);
      if (record_) s.history.push_back(s.scatter_in);
      s.gs.reset(pr_->n_h, coords_);
      std::fill(s.scatter_payload.begin(), s.scatter_payload.end(), Message::bot());
      if (ph.outer_t < r1_) refresh_gather_payload(s, ph.outer_t + 1, cloud);
    }
  }

  void refresh_gather_payload(State& s, int outer_t, int cloud) const {
    std::vector<Message> tmp;
    for (int p = 0; p < pr_->d_g; ++p) {
      tmp.clear();
      s.outer->emit(s.outer_state, outer_t, cloud, p, tmp);
      if (static_cast<int>(tmp.size()) != pr_->n_g)
        throw std::logic_error("ComposedProgram: outer program emitted a foreign slot layout");
      for (int c = 0; c < pr_->n_g; ++c)
        s.gather_payload[static_cast<std::size_t>(p) * pr_->n_g + c] = tmp[c];
    }
  }

  const ProductGraph* pr_;
  const OuterSet* outer_set_;
  const LabeledMatching* matching_;
  std::vector<Message> inputs_z_;
  int hop_;
  int width_;
  bool record_;
  int r1_ = 0;
  int r2_ = 0;
  int coords_ = 0;
  std::vector<std::vector<char>> port_kind_;  // 0 = cloud wire, 1 = cross wire
};

// ---------------------------------------------------------------------------
// The composed protocol set: one unit per cloud-level matching of the product
// permutation. Every product vertex is the source of exactly one unit.
class ComposedSet {
 public:
  ComposedSet(const ProductGraph* pr, std::vector<int> pi, int outer_rounds,
              int inner_hop_rounds, int width)
      : pr_(pr), pi_(std::move(pi)), hop_(inner_hop_rounds), width_(width) {
    decomposition_ = permutation_to_matchings(*pr_, pi_);
    outer_.reserve(decomposition_.sets.size());
    for (const LabeledMatching& m : decomposition_.sets)
      outer_.emplace_back(&pr_->g, m.perm, outer_rounds, width_);
  }

  const ProductGraph& product() const { return *pr_; }
  const std::vector<int>& pi() const { return pi_; }
  const MatchingDecomposition& decomposition() const { return decomposition_; }
  const FloodPermSet& outer(int unit) const { return outer_.at(unit); }
  int units() const { return static_cast<int>(outer_.size()); }
  int inner_hop_rounds() const { return hop_; }
  int width() const { return width_; }

  int rounds() const {
    const int r2 = 2 * hop_;
    return r2 + outer_.front().rounds() * (2 * r2 + 1);
  }

  std::vector<Message> generic_inputs() const {
    std::vector<Message> in(pr_->z.vertex_count());
    for (int v = 0; v < pr_->z.vertex_count(); ++v) in[v] = generic_payload(v, width_);
    return in;
  }

  ComposedProgram<FloodPermSet> program(int unit, const std::vector<Message>& inputs_z,
                                        bool record_history = false) const {
    if (static_cast<int>(inputs_z.size()) != pr_->z.vertex_count())
      throw std::invalid_argument("ComposedSet: one input per product vertex required");
    const LabeledMatching& m = decomposition_.sets.at(unit);
    // Only this unit's sources inject; everyone else contributes silence.
    std::vector<Message> masked(pr_->z.vertex_count(), Message::bot());
    for (int c = 0; c < pr_->n_g; ++c) masked[m.source[c]] = inputs_z[m.source[c]];
    return ComposedProgram<FloodPermSet>(pr_, &outer_[unit], &m, std::move(masked), hop_,
                                         width_, record_history);
  }

  struct UnitOutcome {
    int unit = 0;
    // Indexed by cloud c: the transfer from this unit's source in cloud c.
    std::vector<Message> delivered;
    std::vector<char> ok;
    Counters counters;
    // outputs[zv] = the outer table replica zv decoded (all n_g channels).
    std::vector<std::vector<Message>> outputs;
    // histories[zv][outer_t - 1][(p, c)] when recording was requested.
    std::vector<std::vector<std::vector<Message>>> histories;
  };

  UnitOutcome run_unit(int unit, const std::vector<Message>& inputs_z, const Adversary& adv,
                       bool record_history = false, const EngineOptions& opt_in = {}) const {
    EngineOptions opt = opt_in;
    opt.payload_width = width_;
    auto prog = program(unit, inputs_z, record_history);
    auto res = execute(pr_->z, prog, adv, opt);
    const LabeledMatching& m = decomposition_.sets.at(unit);
    UnitOutcome oc;
    oc.unit = unit;
    oc.counters = res.counters;
    oc.delivered.resize(pr_->n_g);
    oc.ok.resize(pr_->n_g);
    for (int c = 0; c < pr_->n_g; ++c) {
      const int src = m.source[c];
      const int dst = pi_[src];
      oc.delivered[c] = res.outputs[dst][c];
      oc.ok[c] = (oc.delivered[c] == inputs_z[src]);
    }
    oc.outputs = std::move(res.outputs);
    if (record_history) {
      oc.histories.resize(res.states.size());
      for (std::size_t zv = 0; zv < res.states.size(); ++zv)
        oc.histories[zv] = std::move(res.states[zv].history);
    }
    return oc;
  }

  struct Outcome {
    std::vector<Message> delivered;  // per product vertex, as the source of its unit
    std::vector<char> ok;
    std::vector<std::pair<int, int>> failing_pairs;  // (source, destination)
    double failing_fraction = 0.0;
    Counters counters;  // summed over the units
    std::vector<UnitOutcome> per_unit;
  };

  Outcome run_all(const std::vector<Message>& inputs_z, const Adversary& adv,
                  bool record_history = false) const {
    Outcome oc;
    const int n_z = pr_->z.vertex_count();
    oc.delivered.assign(n_z, Message::bot());
    oc.ok.assign(n_z, 0);
    for (int unit = 0; unit < units(); ++unit) {
      UnitOutcome u = run_unit(unit, inputs_z, adv, record_history);
      const LabeledMatching& m = decomposition_.sets[unit];
      oc.counters += u.counters;
      for (int c = 0; c < pr_->n_g; ++c) {
        const int src = m.source[c];
        oc.delivered[src] = u.delivered[c];
        oc.ok[src] = u.ok[c];
        if (!u.ok[c]) oc.failing_pairs.emplace_back(src, pi_[src]);
      }
      oc.per_unit.push_back(std::move(u));
    }
    oc.failing_fraction =
        n_z > 0 ? static_cast<double>(oc.failing_pairs.size()) / n_z : 0.0;
    return oc;
  }

 private:
  const ProductGraph* pr_;
  std::vector<int> pi_;
  int hop_;
  int width_;
  MatchingDecomposition decomposition_;
  std::vector<FloodPermSet> outer_;
};

// Composes the outer flooding family on G with the in-cloud relay all-pairs
// set on H over the product's wiring. `outer_rounds` is the outer protocol's
// round count; the inner set contributes its hop count and payload width.
inline ComposedSet compose(const ProductGraph& pr, std::vector<int> pi, int outer_rounds,
                           const AllPairsSet& inner) {
  if (!(inner.graph() == pr.h))
    throw std::invalid_argument("compose: inner protocol set runs on a different graph than H");
  return ComposedSet(&pr, std::move(pi), outer_rounds, inner.hop_rounds(), inner.width());
}

// ---------------------------------------------------------------------------
// The standalone cloud-to-cloud transfer across one super-edge: gather the
// source cloud's values to its port, push the port majority across the wire
// bundle, scatter on the far side. The unit of criterion-style claims about
// uncorrupted super-edges.
class CloudTransferProgram {
 public:
  struct State {
    detail::RelayScratch sc;  // one coordinate
    Message gathered = Message::bot();
    Message bundled = Message::bot();
  };
  using Output = Message;  // what this vertex received (destination cloud only)

  CloudTransferProgram(const ProductGraph* pr, int g_wire, int from_cloud,
                       std::vector<Message> values, int inner_hop_rounds, int width)
      : pr_(pr), values_(std::move(values)), hop_(inner_hop_rounds), width_(width) {
    const auto& se = pr_->super_edges.at(g_wire);
    if (from_cloud == se.u) {
      src_cloud_ = se.u;
      dst_cloud_ = se.v;
      src_port_ = se.port_u;
      dst_port_ = se.port_v;
    } else if (from_cloud == se.v) {
      src_cloud_ = se.v;
      dst_cloud_ = se.u;
      src_port_ = se.port_v;
      dst_port_ = se.port_u;
    } else {
      throw std::invalid_argument("CloudTransferProgram: cloud is not an endpoint");
    }
    if (static_cast<int>(values_.size()) != pr_->n_h)
      throw std::invalid_argument("CloudTransferProgram: one value per source-cloud vertex");
    if (hop_ < 1) throw std::invalid_argument("CloudTransferProgram: need at least one round");
    port_kind_.resize(pr_->z.vertex_count());
    for (int zv = 0; zv < pr_->z.vertex_count(); ++zv) {
      const auto& ports = pr_->z.ports(zv);
      auto& kinds = port_kind_[zv];
      kinds.resize(ports.size());
      for (std::size_t p = 0; p < ports.size(); ++p)
        kinds[p] = (pr_->z_edge_cloud[ports[p].edge] >= 0) ? 0 : 1;
    }
  }

  int rounds() const { return 2 * (2 * hop_) + 1; }

  State init(int zv) const {
    State s;
    if (active(zv)) s.sc.setup(pr_->n_h, 1);
    return s;
  }

  void emit(const State& s, int t, int zv, int port, std::vector<Message>& out) const {
    if (!active(zv)) return;
    const int cloud = pr_->cloud_of(zv);
    const int local = pr_->local_of(zv);
    const bool inner = port_kind_[zv][port] == 0;
    const int r2 = 2 * hop_;
    if (t <= r2) {  // gather inside the source cloud
      if (!inner || cloud != src_cloud_) return;
      auto payload = [&](int) { return values_[local]; };
      if (t <= hop_)
        detail::relay_hop1_emit(s.sc, pr_->n_h, 1, local, payload, out);
      else
        detail::relay_hop2_emit(s.sc, pr_->n_h, 1, local, out);
      return;
    }
    if (t == r2 + 1) {  // the bundle round
      if (!inner && cloud == src_cloud_ && local == src_port_) out.assign(1, s.gathered);
      return;
    }
    // scatter inside the destination cloud
    if (!inner || cloud != dst_cloud_) return;
    const int sub = t - r2 - 1;
    auto payload = [&](int) { return local == dst_port_ ? s.bundled : Message::bot(); };
    if (sub <= hop_)
      detail::relay_hop1_emit(s.sc, pr_->n_h, 1, local, payload, out);
    else
      detail::relay_hop2_emit(s.sc, pr_->n_h, 1, local, out);
  }

  void absorb(State& s, int t, int zv, const std::vector<std::vector<Message>>& recv) const {
    if (!active(zv)) return;
    const int cloud = pr_->cloud_of(zv);
    const int local = pr_->local_of(zv);
    const auto& kinds = port_kind_[zv];
    const int r2 = 2 * hop_;
    if (t <= r2) {
      if (cloud != src_cloud_) return;
      relay_phase_absorb(s, t, local, kinds, recv, [&](int) { return values_[local]; });
      if (t == r2 && local == src_port_) {
        VoteCounter vc;
        for (int b = 0; b < pr_->n_h; ++b)
          vc.add(detail::relay_pair_decode(s.sc, pr_->n_h, 1, local, b, 0));
        s.gathered = vc.tri_strict_majority();
      }
      return;
    }
    if (t == r2 + 1) {
      if (cloud == dst_cloud_ && local == dst_port_) {
        VoteCounter vc;
        for (std::size_t p = 0; p < recv.size(); ++p) {
          if (kinds[p] != 1) continue;
          if (recv[p].size() != 1) continue;
          vc.add(recv[p][0]);
        }
        s.bundled = vc.tri_strict_majority();
      }
      if (cloud == dst_cloud_) s.sc.reset(pr_->n_h, 1);
      return;
    }
    if (cloud != dst_cloud_) return;
    const int sub = t - r2 - 1;
    relay_phase_absorb(s, sub, local, kinds, recv,
                       [&](int) { return local == dst_port_ ? s.bundled : Message::bot(); });
  }

  Output decode(const State& s, int zv) const {
    if (pr_->cloud_of(zv) != dst_cloud_) return Message::bot();
    const int local = pr_->local_of(zv);
    if (local == dst_port_) return s.bundled;
    return detail::relay_pair_decode(s.sc, pr_->n_h, 1, local, dst_port_, 0);
  }

  int src_cloud() const { return src_cloud_; }
  int dst_cloud() const { return dst_cloud_; }

 private:
  bool active(int zv) const {
    const int c = pr_->cloud_of(zv);
    return c == src_cloud_ || c == dst_cloud_;
  }

  template <class Payload>
  void relay_phase_absorb(State& s, int sub, int local, const std::vector<char>& kinds,
                          const std::vector<std::vector<Message>>& recv,
                          Payload&& payload) const {
    for (std::size_t p = 0; p < recv.size(); ++p) {
      if (kinds[p] != 0) continue;
      if (sub <= hop_)
        detail::relay_hop1_absorb(s.sc, pr_->n_h, 1, recv[p]);
      else
        detail::relay_hop2_absorb(s.sc, pr_->n_h, 1, recv[p]);
    }
    if (sub == hop_) detail::relay_freeze(s.sc, pr_->n_h, 1, local, payload);
  }

  const ProductGraph* pr_;
  std::vector<Message> values_;
  int hop_;
  int width_;
  int src_cloud_ = -1, dst_cloud_ = -1, src_port_ = -1, dst_port_ = -1;
  std::vector<std::vector<char>> port_kind_;  // 0 = cloud wire, 1 = cross wire
};

struct CloudTransferOutcome {
  std::vector<Message> received;  // per destination-cloud local index
  Counters counters;
};

// Runs the one-super-edge transfer under the given adversary and reports what
// every destination-cloud vertex ended up holding.
inline CloudTransferOutcome cloud_to_cloud(const ProductGraph& pr, int g_wire, int from_cloud,
                                           const std::vector<Message>& values,
                                           const Adversary& adv, int inner_hop_rounds,
                                           int width = 32) {
  CloudTransferProgram prog(&pr, g_wire, from_cloud, values, inner_hop_rounds, width);
  EngineOptions opt;
  opt.payload_width = width;
  auto res = execute(pr.z, prog, adv, opt);
  CloudTransferOutcome oc;
  oc.counters = res.counters;
  oc.received.resize(pr.n_h);
  for (int b = 0; b < pr.n_h; ++b)
    oc.received[b] = res.outputs[pr.z_vertex(prog.dst_cloud(), b)];
  return oc;
}

}  // namespace aenet
