#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "damf/engine.hpp"
#include "damf/graph.hpp"

namespace damf {

struct EvalReport {
  std::string task;
  std::map<std::string, double> metrics;   // auc, ap, ...
  std::map<Index, double> precision_at;    // K -> value
  double event_mean_ms = 0.0;
  double event_median_ms = 0.0;
  double event_max_ms = 0.0;
  double total_s = 0.0;
  RunConfig config;

  std::string to_text() const;  // key=value lines
  std::string to_csv() const;   // K,precision rows
};

// AUC: probability a random positive outranks a random negative, ties 1/2.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Step-wise AP: mean over positives of precision at the positive's rank,
// ranking by (score desc, index asc).
double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& labels);

struct ScoredPair {
  Index u = 0;
  Index v = 0;
  double score = 0.0;
};

inline std::uint64_t pair_key(Index u, Index v) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

// Fraction of the top-K pairs (score desc, ties by pair index) that are
// edges. Throws KTooLarge when max(ks) exceeds the pair count.
std::map<Index, double> precision_at_k(
    const std::vector<ScoredPair>& scored_pairs,
    const std::unordered_set<std::uint64_t>& edge_set,
    const std::vector<Index>& ks);

// Streams a graph through the engine: seed subgraph of the first
// min(100, ceil(n/10)) nodes, then one AddNode event per remaining node with
// its edges into the already-present prefix. Latencies (ms) per event are
// appended to *latencies when given.
Engine stream_graph(const DynamicGraph& g_target, const RunConfig& cfg,
                    std::vector<double>* latencies = nullptr);

EvalReport run_link_prediction(const DynamicGraph& g, double removal_ratio,
                               const RunConfig& cfg);

EvalReport run_graph_reconstruction(const DynamicGraph& g,
                                    const RunConfig& cfg,
                                    double sample_fraction,
                                    const std::vector<Index>& ks);

// Replays a delta stream applying an exact dense SVD truncation to the
// updated previous product at every step; this is the recursion the engine
// tracks, computed through explicit dense factors (Jacobi SVD, full
// re-orthogonalization). Dense-feasible sizes only.
class OracleTsvd {
 public:
  OracleTsvd(const DynamicGraph& g0, Index d);

  void apply_deltas(const std::vector<DeltaVectors>& deltas);

  const Vector& sigma() const { return sigma_; }
  DenseMatrix product() const;
  // Singular gap condition of the last event: sigma_k - sigma_{k+1} of the
  // widened spectrum stayed above 1e-6 * sigma_1 for every sub-step.
  bool last_gap_ok() const { return gap_ok_; }

  double product_rel_dist(const FactorState& s) const;
  double sigma_rel_dist(const Vector& engine_sigma) const;

 private:
  void step(const SparseVec& b, const std::optional<SparseVec>& c,
            bool swapped);

  DenseMatrix u_, v_;
  Vector sigma_;
  Index d_ = 0;
  bool gap_ok_ = true;
};

struct DriftReport {
  double drift = 0.0;   // |X Y^T - tSVD_d(A)|_F / |A|_F
  double c_diag = 0.0;  // max_u |deg(u) X[u]|_inf
};

DriftReport drift_report(const FactorState& s, const DynamicGraph& g);

EvalReport bench_update_latency(const std::vector<Index>& n_values, Index d,
                                Index events_per_n, std::uint64_t seed);

// Max over rows and columns of |alpha X + (1-alpha) D^-1 A Z - Z| scaled by
// max(deg, 1); the enhancer's post-push bound. Dense check for small graphs.
double dense_defect_bound(const DynamicGraph& g, const FactorState& s,
                          const EnhancerState& e);

// Seeded generators used by tests and benchmarks.
DynamicGraph gen_random_graph(Index n, Index arcs, std::uint64_t seed,
                              bool undirected = false);
DynamicGraph gen_sbm(Index n, double p_in, double p_out, std::uint64_t seed);

struct StreamCase {
  DynamicGraph g0;
  std::vector<GraphEvent> events;
};

// Mixed add-edge / remove-edge / add-node stream growing from n0 to n_total.
StreamCase gen_mixed_stream(Index n_total, Index n0, Index m0, Index n_events,
                            std::uint64_t seed);

}  // namespace damf
