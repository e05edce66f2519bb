#pragma once

#include <cstdint>
#include <vector>

#include "damf/enhancer.hpp"
#include "damf/factor_state.hpp"
#include "damf/graph.hpp"
#include "damf/update_engine.hpp"

namespace damf {

struct RunConfig {
  Index d = 128;
  double alpha = 0.3;
  double eps = 1e-5;
  std::uint64_t seed = 0;
  double rebase_cond = 1e8;
  Index rebase_every = 50000;
  bool undirected = false;
};

// Ties graph, factor state, and enhancer together and runs the per-event
// pipeline: graph deltas -> space-projection updates -> enhancer absorb and
// push -> rebase policy.
class Engine {
 public:
  Engine() = default;
  Engine(DynamicGraph g, const RunConfig& cfg);

  // Resume from persisted pieces.
  Engine(DynamicGraph g, FactorState fs, EnhancerState es,
         const RunConfig& cfg, std::uint64_t events_applied,
         Index events_since_rebase);

  void apply(const GraphEvent& e);

  const DynamicGraph& graph() const { return g_; }
  const FactorState& state() const { return fs_; }
  const EnhancerState& enhancer() const { return es_; }
  const RunConfig& config() const { return cfg_; }
  std::uint64_t events_applied() const { return events_applied_; }
  Index events_since_rebase() const { return events_since_rebase_; }

  Vector context(Index u) const { return fs_.query_context(u); }
  Vector content(Index u) const { return fs_.query_content(u); }
  Vector enhanced(Index u) const { return es_.query_enhanced(fs_, u); }

  // Link score <Z[u], Y[v]> (or <X[u], Y[v]> when enhancement is off).
  double score(Index u, Index v, bool enhanced = true) const;

  void rebase();

 private:
  DynamicGraph g_;
  FactorState fs_;
  EnhancerState es_;
  RunConfig cfg_;
  std::uint64_t events_applied_ = 0;
  Index events_since_rebase_ = 0;
};

}  // namespace damf
