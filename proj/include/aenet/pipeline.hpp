#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aenet/adversary.hpp"
#include "aenet/analysis.hpp"
#include "aenet/erased.hpp"
#include "aenet/matching.hpp"
#include "aenet/multigraph.hpp"
#include "aenet/replacement.hpp"

namespace aenet {

// ---------------------------------------------------------------------------
// An iterated product: Z_0 = G, Z_i = Z_{i-1} composed with the small graph
// H_i. Each level multiplies the vertex count by |V(H_i)| while the degree
// stays 2*deg(H_i), so a few levels blow a small base network up to
// thousands of vertices of constant degree.
class Pipeline {
 public:
  // `hops[i]` is the relay hop-round count used inside level i+1's clouds;
  // empty means every level uses its H's diameter. `base_rounds` drives the
  // innermost flooding on G; 0 means G's diameter.
  Pipeline(MultiGraph g, std::vector<MultiGraph> hs, std::vector<int> hops = {},
           int base_rounds = 0, int ratio_bound = 4)
      : base_(std::move(g)), hs_(std::move(hs)) {
    if (hs_.empty()) throw std::invalid_argument("Pipeline: need at least one level");
    if (hops.empty())
      for (const MultiGraph& h : hs_) hops.push_back(h.diameter());
    if (hops.size() != hs_.size())
      throw std::invalid_argument("Pipeline: one hop count per level required");
    hops_ = std::move(hops);
    base_rounds_ = base_rounds > 0 ? base_rounds : base_.diameter();
    if (base_rounds_ < base_.diameter())
      throw std::invalid_argument("Pipeline: base rounds below the base diameter");

    const MultiGraph* below = &base_;
    products_.reserve(hs_.size());
    for (std::size_t i = 0; i < hs_.size(); ++i) {
      products_.push_back(replacement_product(*below, hs_[i], ratio_bound));
      below = &products_.back().z;
    }
  }

  int levels() const { return static_cast<int>(products_.size()); }
  const MultiGraph& base() const { return base_; }
  const MultiGraph& top() const { return products_.back().z; }
  // level is 1-based: product(i) built Z_i on top of Z_{i-1}.
  const ProductGraph& product(int level) const { return products_.at(level - 1); }
  int hop_rounds(int level) const { return hops_.at(level - 1); }
  int base_rounds() const { return base_rounds_; }

  // Total synchronous rounds of the fully nested protocol: each level wraps
  // the one below in a broadcast plus one gather/bundle/scatter block per
  // inner round.
  long long rounds() const {
    long long t = base_rounds_;
    for (int i = 1; i <= levels(); ++i) {
      const long long r2 = 2LL * hop_rounds(i);
      t = r2 + t * (2 * r2 + 1);
    }
    return t;
  }

 private:
  MultiGraph base_;
  std::vector<MultiGraph> hs_;
  std::vector<int> hops_;
  int base_rounds_ = 0;
  std::vector<ProductGraph> products_;
};

// ---------------------------------------------------------------------------
// Closed-form evaluation of a pipeline trial.
//
// A literal execution of a deep pipeline is out of reach (every level
// multiplies the round count and the per-round traffic), so levels are
// evaluated through their analyses instead: classify the top corruption,
// write off excluded vertices, project the corrupted super-edges one level
// down as erasures, and recurse; the base level floods the original graph
// with the surviving erasure set. The per-transfer clause structure is the
// same one `check_union_bound` verifies against literal runs where those are
// affordable.

struct PipelineLevelStats {
  int level = 0;  // matches Pipeline::product's 1-based numbering
  int visits = 0;  // evaluations at this level (one per matching above)
  // Averages over the visits.
  double eps = 0.0;
  double bad_cloud_fraction = 0.0;
  double doomed_fraction = 0.0;
  double super_edge_fraction = 0.0;
};

struct PipelineEval {
  std::vector<char> fail_by_source;  // per top-level vertex
  long long failed = 0;
  double fail_fraction = 0.0;
  std::vector<PipelineLevelStats> levels;  // index 0 = level 1
  long long base_floods = 0;
};

namespace detail {

struct PipelineEvaluator {
  const Pipeline* pl;
  const std::vector<Behavior>* menu;
  int width;
  PipelineEval* out;

  std::vector<char> eval(int level, const std::vector<int>& pi,
                         const CorruptionSet& cs) const {
    if (level == 0) {
      std::vector<char> starred(pl->base().copy_count(), 0);
      for (int w : cs.wires) starred[w] = 1;
      std::vector<Message> inputs(pl->base().vertex_count());
      for (int v = 0; v < pl->base().vertex_count(); ++v)
        inputs[v] = generic_payload(v, width);
      const auto failing = erased_flood_failing_pairs(pl->base(), pi, inputs,
                                                      pl->base_rounds(), starred);
      ++out->base_floods;
      std::vector<char> fail(pl->base().vertex_count(), 0);
      for (auto [u, v] : failing) fail[u] = 1;
      return fail;
    }

    const ProductGraph& pr = pl->product(level);
    // The top level classifies its live corruption against the behavior
    // menu; lower levels see erasure masks handed down from above, covered
    // behavior-free by the tri-state pass.
    const CorruptionAnalysis an =
        level == pl->levels()
            ? classify(pr, cs, *menu, pl->hop_rounds(level), width)
            : classify_erased(pr, cs, pl->hop_rounds(level));

    PipelineLevelStats& st = out->levels[level - 1];
    ++st.visits;
    st.eps += an.eps;
    st.bad_cloud_fraction += an.bad_cloud_fraction;
    st.doomed_fraction += an.doomed_fraction;
    st.super_edge_fraction += an.super_edge_fraction;

    CorruptionSet down;
    down.wires = an.corrupted_super_edges;  // super-edge ids ARE lower-graph wire ids
    down.total_copies = pr.g.copy_count();

    const MatchingDecomposition decomp = permutation_to_matchings(pr, pi);
    std::vector<char> fail(pr.z.vertex_count(), 0);
    for (const LabeledMatching& m : decomp.sets) {
      const std::vector<char> outer_fail = eval(level - 1, m.perm, down);
      for (int c = 0; c < pr.n_g; ++c) {
        const int src = m.source[c];
        const int dst = pi[src];
        fail[src] = an.excluded(c, pr.local_of(src)) ||
                    an.excluded(pr.cloud_of(dst), pr.local_of(dst)) || outer_fail[c];
      }
    }
    return fail;
  }
};

}  // namespace detail

inline PipelineEval evaluate_pipeline(const Pipeline& pl, const std::vector<int>& pi,
                                      const CorruptionSet& cs,
                                      const std::vector<Behavior>& menu, int width = 8) {
  require_permutation(pi, pl.top().vertex_count(), "evaluate_pipeline");
  PipelineEval ev;
  ev.levels.resize(pl.levels());
  for (int i = 1; i <= pl.levels(); ++i) ev.levels[i - 1].level = i;

  detail::PipelineEvaluator runner{&pl, &menu, width, &ev};
  ev.fail_by_source = runner.eval(pl.levels(), pi, cs);
  for (char f : ev.fail_by_source) ev.failed += f;
  ev.fail_fraction = ev.fail_by_source.empty()
                         ? 0.0
                         : static_cast<double>(ev.failed) / ev.fail_by_source.size();
  for (PipelineLevelStats& st : ev.levels) {
    if (st.visits == 0) continue;
    st.eps /= st.visits;
    st.bad_cloud_fraction /= st.visits;
    st.doomed_fraction /= st.visits;
    st.super_edge_fraction /= st.visits;
  }
  return ev;
}

}  // namespace aenet
