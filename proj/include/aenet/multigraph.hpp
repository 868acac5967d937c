#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aenet {

// Undirected multigraph. Edges are kept canonically sorted by endpoint pair
// (u < v) and carry a multiplicity; individual parallel copies ("wires") and
// per-vertex ports are numbered by one fixed rule so that every component in
// this library agrees on which copy is which:
//
//   wire id          = copy_offset(edge) + copy index
//   ports of v       = incident edges in ascending edge order, each
//                      contributing mult consecutive ports (copy 0 first)
//
// Self-loops are rejected; vertices are 0..n-1.
class MultiGraph {
 public:
  struct Edge {
    int u = 0;
    int v = 0;
    int mult = 1;
  };

  // A single parallel copy of an edge.
  struct Wire {
    int edge = -1;
    int copy = 0;
  };

  // What a port connects to: the wire plus the vertex on the far side.
  struct PortRef {
    int edge = -1;
    int copy = 0;
    int peer = -1;       // vertex at the other end
    int peer_port = -1;  // port index of this wire at the peer
  };

  MultiGraph() = default;

  explicit MultiGraph(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("MultiGraph: vertex count must be positive");
  }

  void add_edge(int u, int v, int mult = 1) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw std::invalid_argument("MultiGraph: self-loops are not allowed");
    if (mult < 1) throw std::invalid_argument("MultiGraph: multiplicity must be >= 1");
    if (u > v) std::swap(u, v);
    staged_[{u, v}] += mult;
    dirty_ = true;
  }

  int vertex_count() const { return n_; }

  const std::vector<Edge>& edges() const {
    finalize();
    return edges_;
  }

  int edge_count() const { return static_cast<int>(edges().size()); }

  // Total number of wires (edge copies).
  int copy_count() const {
    finalize();
    return total_copies_;
  }

  int copy_offset(int edge) const {
    finalize();
    return copy_offsets_[edge];
  }

  int wire_id(int edge, int copy) const { return copy_offset(edge) + copy; }

  Wire wire(int wire_id) const {
    finalize();
    auto it = std::upper_bound(copy_offsets_.begin(), copy_offsets_.end(), wire_id);
    int e = static_cast<int>(it - copy_offsets_.begin()) - 1;
    return Wire{e, wire_id - copy_offsets_[e]};
  }

  int degree(int v) const {
    finalize();
    return static_cast<int>(ports_[v].size());
  }

  const std::vector<PortRef>& ports(int v) const {
    finalize();
    return ports_[v];
  }

  // Port index of (edge, copy) at endpoint v.
  int port_index(int v, int edge, int copy) const {
    finalize();
    const auto& ps = ports_[v];
    for (int i = 0; i < static_cast<int>(ps.size()); ++i)
      if (ps[i].edge == edge && ps[i].copy == copy) return i;
    throw std::invalid_argument("MultiGraph: wire not incident to vertex");
  }

  bool is_regular() const {
    finalize();
    for (int v = 1; v < n_; ++v)
      if (degree(v) != degree(0)) return false;
    return true;
  }

  int max_degree() const {
    finalize();
    int d = 0;
    for (int v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  void require_regular(const std::string& who) const {
    if (!is_regular())
      throw std::invalid_argument(who + ": graph must be regular (every vertex the same degree)");
  }

  // Hop distances on the support graph (multiplicity ignored); -1 unreachable.
  std::vector<int> bfs_distances(int src) const {
    finalize();
    std::vector<int> dist(n_, -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const PortRef& p : ports_[v]) {
        if (p.copy != 0) continue;  // one probe per support edge is enough
        if (dist[p.peer] < 0) {
          dist[p.peer] = dist[v] + 1;
          q.push(p.peer);
        }
      }
    }
    return dist;
  }

  bool is_connected() const {
    auto d = bfs_distances(0);
    return std::all_of(d.begin(), d.end(), [](int x) { return x >= 0; });
  }

  // Largest hop distance; -1 if disconnected.
  int diameter() const {
    int dia = 0;
    for (int v = 0; v < n_; ++v) {
      auto d = bfs_distances(v);
      for (int x : d) {
        if (x < 0) return -1;
        dia = std::max(dia, x);
      }
    }
    return dia;
  }

  // ---- plain-text serialization ----------------------------------------
  //
  //   <n> <max-degree>
  //   <u> <v> <mult>        (one line per distinct edge, canonical order)

  void write(std::ostream& os) const {
    finalize();
    os << n_ << ' ' << max_degree() << '\n';
    for (const Edge& e : edges_) os << e.u << ' ' << e.v << ' ' << e.mult << '\n';
  }

  std::string to_string() const {
    std::ostringstream oss;
    write(oss);
    return oss.str();
  }

  static MultiGraph read(std::istream& is) {
    int n = 0, d = 0;
    if (!(is >> n >> d)) throw std::invalid_argument("MultiGraph::read: bad header");
    MultiGraph g(n);
    int u, v, m;
    while (is >> u >> v >> m) g.add_edge(u, v, m);
    g.finalize();
    return g;
  }

  static MultiGraph from_string(const std::string& text) {
    std::istringstream iss(text);
    return read(iss);
  }

  friend bool operator==(const MultiGraph& a, const MultiGraph& b) {
    a.finalize();
    b.finalize();
    if (a.n_ != b.n_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const Edge& x = a.edges_[i];
      const Edge& y = b.edges_[i];
      if (x.u != y.u || x.v != y.v || x.mult != y.mult) return false;
    }
    return true;
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= n_) throw std::invalid_argument("MultiGraph: vertex out of range");
  }

  void finalize() const {
    if (!dirty_) return;
    dirty_ = false;
    edges_.clear();
    edges_.reserve(staged_.size());
    for (const auto& [key, mult] : staged_) edges_.push_back(Edge{key.first, key.second, mult});
    copy_offsets_.assign(edges_.size() + 1, 0);
    for (std::size_t i = 0; i < edges_.size(); ++i)
      copy_offsets_[i + 1] = copy_offsets_[i] + edges_[i].mult;
    total_copies_ = copy_offsets_.empty() ? 0 : copy_offsets_.back();
    ports_.assign(n_, {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      for (int c = 0; c < edges_[e].mult; ++c) {
        ports_[edges_[e].u].push_back(PortRef{e, c, edges_[e].v, -1});
        ports_[edges_[e].v].push_back(PortRef{e, c, edges_[e].u, -1});
      }
    }
    // Resolve peer port indices. Ports are already in canonical order because
    // edges were visited in ascending order.
    std::vector<std::vector<std::pair<int, int>>> port_at(edges_.size());
    for (auto& pa : port_at) pa.clear();
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e)
      port_at[e].assign(edges_[e].mult, {-1, -1});
    for (int v = 0; v < n_; ++v) {
      for (int i = 0; i < static_cast<int>(ports_[v].size()); ++i) {
        const PortRef& p = ports_[v][i];
        auto& slot = port_at[p.edge][p.copy];
        if (edges_[p.edge].u == v)
          slot.first = i;
        else
          slot.second = i;
      }
    }
    for (int v = 0; v < n_; ++v) {
      for (auto& p : ports_[v]) {
        const auto& slot = port_at[p.edge][p.copy];
        p.peer_port = (edges_[p.edge].u == v) ? slot.second : slot.first;
      }
    }
  }

  int n_ = 0;
  std::map<std::pair<int, int>, int> staged_;
  mutable bool dirty_ = true;
  mutable std::vector<Edge> edges_;
  mutable std::vector<int> copy_offsets_;
  mutable int total_copies_ = 0;
  mutable std::vector<std::vector<PortRef>> ports_;
};

// ---- named constructions used throughout the tests and CLI ---------------

inline MultiGraph complete_graph(int n) {
  MultiGraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

inline MultiGraph cycle_graph(int n) {
  if (n < 2) throw std::invalid_argument("cycle_graph: need at least 2 vertices");
  MultiGraph g(n);
  if (n == 2) {
    g.add_edge(0, 1, 2);  // the 2-cycle degenerates to a doubled edge
    return g;
  }
  for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

inline MultiGraph petersen_graph() {
  MultiGraph g(10);
  for (int v = 0; v < 5; ++v) {
    g.add_edge(v, (v + 1) % 5);          // outer pentagon
    g.add_edge(5 + v, 5 + (v + 2) % 5);  // inner pentagram
    g.add_edge(v, 5 + v);                // spokes
  }
  return g;
}

}  // namespace aenet
