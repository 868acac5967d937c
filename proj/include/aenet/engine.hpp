#pragma once

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aenet/adversary.hpp"
#include "aenet/message.hpp"
#include "aenet/multigraph.hpp"

namespace aenet {

inline std::string format_message(const Message& m) {
  if (m.is_bot()) return "-";
  if (m.is_star()) return "*";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llx/%d", static_cast<unsigned long long>(m.bits()), m.width());
  return buf;
}

struct Counters {
  long long rounds = 0;
  long long emit_calls = 0;
  long long absorb_calls = 0;
  long long decode_calls = 0;
  long long bits_sent = 0;
  long long bits_received = 0;
  long long malformed = 0;  // wrong-width or stray-star payloads coerced to bot

  // One unit per program invocation, weighted by the bits that crossed it.
  long long work() const {
    return emit_calls + absorb_calls + decode_calls + bits_sent + bits_received;
  }

  Counters& operator+=(const Counters& o) {
    rounds += o.rounds;
    emit_calls += o.emit_calls;
    absorb_calls += o.absorb_calls;
    decode_calls += o.decode_calls;
    bits_sent += o.bits_sent;
    bits_received += o.bits_received;
    malformed += o.malformed;
    return *this;
  }
};

// Per-round receipts of every vertex, retained only when asked for:
// received[t-1][v][port] is the slot vector delivered to v on that port.
struct Transcript {
  std::vector<std::vector<std::vector<std::vector<Message>>>> received;
};

struct EngineOptions {
  int payload_width = 32;
  bool record_transcript = false;
  std::ostream* trace = nullptr;  // "round vertex edge copy sent received" lines
};

template <class Program>
struct RunResult {
  std::vector<typename Program::Output> outputs;
  std::vector<typename Program::State> states;
  Counters counters;
  Transcript transcript;
};

// Runs a round-synchronous protocol: every round each vertex emits one slot
// vector per port, corrupted wires transform symbols slot-wise (the adversary
// acts after all honest sends of the round are fixed), then every vertex
// absorbs what arrived. Programs are deterministic automata over their own
// receipts; see flooding.hpp for the canonical example of the contract:
//
//   struct State; using Output = ...;
//   int rounds() const;
//   State init(int vertex) const;
//   void emit(const State&, int round, int vertex, int port,
//             std::vector<Message>& out) const;   // fill `out`, it is cleared
//   void absorb(State&, int round, int vertex,
//               const std::vector<std::vector<Message>>& receipts) const;
//   Output decode(const State&, int vertex) const;
template <class Program>
RunResult<Program> execute(const MultiGraph& g, const Program& prog, const Adversary& adv,
                           const EngineOptions& opt = {}) {
  const int n = g.vertex_count();
  const int T = prog.rounds();

  RunResult<Program> result;
  result.states.reserve(n);
  for (int v = 0; v < n; ++v) result.states.push_back(prog.init(v));
  Counters& ctr = result.counters;
  ctr.rounds = T;

  // behavior index per wire, -1 = honest
  std::vector<int> beh_of(g.copy_count(), -1);
  for (std::size_t i = 0; i < adv.set.wires.size(); ++i) {
    if (adv.set.wires[i] < 0 || adv.set.wires[i] >= g.copy_count())
      throw std::invalid_argument("execute: corrupted wire id out of range");
    beh_of[adv.set.wires[i]] = static_cast<int>(i);
  }

  std::vector<std::vector<std::vector<Message>>> sent(n), recv(n);
  for (int v = 0; v < n; ++v) {
    sent[v].resize(g.degree(v));
    recv[v].resize(g.degree(v));
  }

  for (int t = 1; t <= T; ++t) {
    for (int v = 0; v < n; ++v) {
      for (int p = 0; p < g.degree(v); ++p) {
        auto& slots = sent[v][p];
        slots.clear();
        prog.emit(result.states[v], t, v, p, slots);
        ++ctr.emit_calls;
        for (Message& m : slots) {
          if (m.is_star() || (m.is_value() && m.width() != opt.payload_width)) {
            m = Message::bot();
            ++ctr.malformed;
          }
          ctr.bits_sent += m.bit_size();
        }
      }
    }

    if (adv.on_round) adv.on_round(t, sent);

    for (int v = 0; v < n; ++v) {
      const auto& ports = g.ports(v);
      for (int p = 0; p < g.degree(v); ++p) {
        const MultiGraph::PortRef& pr = ports[p];
        const auto& peer_slots = sent[pr.peer][pr.peer_port];
        auto& slots = recv[v][p];
        slots.assign(peer_slots.begin(), peer_slots.end());
        const int wire = g.wire_id(pr.edge, pr.copy);
        const int bi = beh_of[wire];
        if (bi >= 0) {
          const Behavior& b = adv.behaviors[bi];
          for (int s = 0; s < static_cast<int>(slots.size()); ++s) {
            slots[s] = b.apply(t, wire, s, slots[s], opt.payload_width);
            if (slots[s].is_star() ||
                (slots[s].is_value() && slots[s].width() != opt.payload_width)) {
              slots[s] = Message::bot();
              ++ctr.malformed;
            }
          }
        }
        for (const Message& m : slots) ctr.bits_received += m.bit_size();
        if (opt.trace) {
          *opt.trace << t << ' ' << pr.peer << ' ' << pr.edge << ' ' << pr.copy;
          *opt.trace << " [";
          for (std::size_t s = 0; s < peer_slots.size(); ++s)
            *opt.trace << (s ? "|" : "") << format_message(peer_slots[s]);
          *opt.trace << "] [";
          for (std::size_t s = 0; s < slots.size(); ++s)
            *opt.trace << (s ? "|" : "") << format_message(slots[s]);
          *opt.trace << "]\n";
        }
      }
    }

    for (int v = 0; v < n; ++v) {
      prog.absorb(result.states[v], t, v, recv[v]);
      ++ctr.absorb_calls;
    }

    if (opt.record_transcript) result.transcript.received.push_back(recv);
  }

  result.outputs.reserve(n);
  for (int v = 0; v < n; ++v) {
    result.outputs.push_back(prog.decode(result.states[v], v));
    ++ctr.decode_calls;
  }
  return result;
}

}  // namespace aenet
