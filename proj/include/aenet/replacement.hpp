#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aenet/multigraph.hpp"

namespace aenet {

// Replacement-style product of an outer graph G and a small inner graph H.
//
// Every vertex u of G is replaced by a "cloud": a fresh copy of H. Each wire
// of G (parallel copies counted separately) becomes a "super-edge": a bundle
// of deg(H) parallel wires joining one designated port vertex in each of the
// two endpoint clouds. The port assignment is forced by the canonical port
// numbering of G: the wire sitting at port p of u attaches to cloud vertex p
// of u's cloud. The deg(H)-fold bundle keeps inner and cross wire counts
// equal when |V(H)| = deg(G).
//
// |V(H)| may exceed deg(G) (up to ratio_bound * deg(G)); surplus cloud
// vertices own no super-edge port and touch only inner wires, which makes Z
// non-regular (ports have degree 2*deg(H), the rest deg(H)).
struct ProductGraph {
  struct SuperEdge {
    int g_edge = -1;  // edge index in G
    int g_copy = 0;   // copy index within that edge
    int u = -1;       // endpoint clouds in G (u < v as stored by G)
    int v = -1;
    int port_u = -1;  // cloud-local port vertex in u's cloud
    int port_v = -1;  // cloud-local port vertex in v's cloud
    int z_edge = -1;  // edge index in Z carrying the bundle
  };

  MultiGraph g;
  MultiGraph h;
  MultiGraph z;

  int n_g = 0;  // |V(G)|
  int n_h = 0;  // |V(H)| = cloud size
  int d_g = 0;  // deg(G) = ports per cloud
  int k_h = 0;  // deg(H) = super-edge bundle width

  std::vector<SuperEdge> super_edges;         // indexed by G wire id
  std::vector<std::vector<int>> cloud_edges;  // per cloud: inner Z edge indices
  std::vector<int> z_edge_super;              // Z edge -> super edge index, or -1
  std::vector<int> z_edge_cloud;              // Z edge -> owning cloud, or -1

  int z_vertex(int cloud, int local) const { return cloud * n_h + local; }
  int cloud_of(int zv) const { return zv / n_h; }
  int local_of(int zv) const { return zv % n_h; }
  bool is_port(int local) const { return local < d_g; }
  bool balanced() const { return n_h == d_g; }

  long long inner_copy_count() const {
    long long c = 0;
    for (int e = 0; e < z.edge_count(); ++e)
      if (z_edge_cloud[e] >= 0) c += z.edges()[e].mult;
    return c;
  }

  long long cross_copy_count() const {
    long long c = 0;
    for (int e = 0; e < z.edge_count(); ++e)
      if (z_edge_super[e] >= 0) c += z.edges()[e].mult;
    return c;
  }
};

inline ProductGraph replacement_product(const MultiGraph& g, const MultiGraph& h,
                                        int ratio_bound = 4) {
  g.require_regular("replacement_product (outer)");
  h.require_regular("replacement_product (inner)");
  ProductGraph p;
  p.g = g;
  p.h = h;
  p.n_g = g.vertex_count();
  p.n_h = h.vertex_count();
  p.d_g = g.degree(0);
  p.k_h = h.degree(0);
  if (p.n_h < p.d_g)
    throw std::invalid_argument("replacement_product: |V(H)| < deg(G); every G-port needs its "
                                "own cloud vertex");
  if (p.n_h > ratio_bound * p.d_g)
    throw std::invalid_argument("replacement_product: |V(H)| > " + std::to_string(ratio_bound) +
                                "*deg(G); cloud padding bound exceeded");

  // Where each G wire attaches: endpoint clouds and their port indices.
  p.super_edges.resize(g.copy_count());
  for (int u = 0; u < p.n_g; ++u) {
    const auto& ports = g.ports(u);
    for (int pi = 0; pi < static_cast<int>(ports.size()); ++pi) {
      const MultiGraph::PortRef& pr = ports[pi];
      ProductGraph::SuperEdge& se = p.super_edges[g.wire_id(pr.edge, pr.copy)];
      se.g_edge = pr.edge;
      se.g_copy = pr.copy;
      if (g.edges()[pr.edge].u == u) {
        se.u = u;
        se.port_u = pi;
      } else {
        se.v = u;
        se.port_v = pi;
      }
    }
  }

  MultiGraph z(p.n_g * p.n_h);
  for (int u = 0; u < p.n_g; ++u)
    for (const MultiGraph::Edge& e : h.edges())
      z.add_edge(p.z_vertex(u, e.u), p.z_vertex(u, e.v), e.mult);
  for (const ProductGraph::SuperEdge& se : p.super_edges)
    z.add_edge(p.z_vertex(se.u, se.port_u), p.z_vertex(se.v, se.port_v), p.k_h);
  p.z = z;

  // Classify Z edges; map endpoint pairs back to super-edges.
  p.z_edge_super.assign(p.z.edge_count(), -1);
  p.z_edge_cloud.assign(p.z.edge_count(), -1);
  p.cloud_edges.assign(p.n_g, {});
  std::map<std::pair<int, int>, int> cross_at;
  for (int e = 0; e < p.z.edge_count(); ++e) {
    const MultiGraph::Edge& ze = p.z.edges()[e];
    if (p.cloud_of(ze.u) == p.cloud_of(ze.v)) {
      p.z_edge_cloud[e] = p.cloud_of(ze.u);
      p.cloud_edges[p.z_edge_cloud[e]].push_back(e);
    } else {
      cross_at[{ze.u, ze.v}] = e;
    }
  }
  for (int w = 0; w < g.copy_count(); ++w) {
    ProductGraph::SuperEdge& se = p.super_edges[w];
    int zu = p.z_vertex(se.u, se.port_u);
    int zv = p.z_vertex(se.v, se.port_v);
    if (zu > zv) std::swap(zu, zv);
    auto it = cross_at.find({zu, zv});
    if (it == cross_at.end())
      throw std::runtime_error("replacement_product: internal error, super-edge bundle missing");
    se.z_edge = it->second;
    p.z_edge_super[it->second] = w;
  }
  return p;
}

}  // namespace aenet
