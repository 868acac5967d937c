#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aenet/multigraph.hpp"
#include "aenet/rng.hpp"

namespace aenet {

// Power-iteration estimate of |lambda_2| / d for a connected d-regular
// multigraph, where lambda_2 is the second-largest (signed) adjacency
// eigenvalue. Disconnected graphs report 1.0 (no expansion).
//
// The iteration runs on A + d*I, whose spectrum is the adjacency spectrum
// shifted into [0, 2d]; that keeps the signed order and stops the most
// negative eigenvalue (e.g. -d on bipartite graphs) from hijacking the
// iteration. The all-ones principal direction is projected out every step.
inline double spectral_gap_estimate(const MultiGraph& g, int iterations = 1000,
                                    std::uint64_t seed = 1) {
  g.require_regular("spectral_gap_estimate");
  if (!g.is_connected()) return 1.0;

  const int n = g.vertex_count();
  const double d = static_cast<double>(g.degree(0));
  if (n == 1) return 0.0;

  Rng rng(seed);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) x[i] = rng.unit() - 0.5;

  auto deflate = [&](std::vector<double>& v) {
    double mean = 0;
    for (double t : v) mean += t;
    mean /= n;
    for (double& t : v) t -= mean;
  };
  auto norm = [&](const std::vector<double>& v) {
    double s = 0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
  };

  deflate(x);
  double nx = norm(x);
  if (nx < 1e-12) {  // degenerate draw; any non-uniform vector will do
    x.assign(n, 0.0);
    x[0] = 1.0;
    deflate(x);
    nx = norm(x);
  }
  for (double& t : x) t /= nx;

  double rho = 0.0;
  for (int it = 0; it < iterations; ++it) {
    // y = (A + d*I) x
    for (int v = 0; v < n; ++v) y[v] = d * x[v];
    for (const MultiGraph::Edge& e : g.edges()) {
      y[e.u] += e.mult * x[e.v];
      y[e.v] += e.mult * x[e.u];
    }
    deflate(y);
    double ny = norm(y);
    if (ny < 1e-280) return 0.0;  // x annihilated: residual spectrum is all zero
    rho = 0.0;
    for (int v = 0; v < n; ++v) rho += x[v] * y[v];  // Rayleigh quotient of shifted matrix
    for (int v = 0; v < n; ++v) x[v] = y[v] / ny;
  }
  return std::abs(rho - d) / d;
}

}  // namespace aenet
