#include "damf/engine.hpp"

namespace damf {

Engine::Engine(DynamicGraph g, const RunConfig& cfg)
    : g_(std::move(g)), cfg_(cfg) {
  fs_ = FactorState::init_from_graph(g_, cfg.d, cfg.seed);
  es_ = EnhancerState::init_propagate(g_, fs_,
                                      EnhancerParams{cfg.alpha, cfg.eps});
}

Engine::Engine(DynamicGraph g, FactorState fs, EnhancerState es,
               const RunConfig& cfg, std::uint64_t events_applied,
               Index events_since_rebase)
    : g_(std::move(g)),
      fs_(std::move(fs)),
      es_(std::move(es)),
      cfg_(cfg),
      events_applied_(events_applied),
      events_since_rebase_(events_since_rebase) {}

void Engine::apply(const GraphEvent& e) {
  std::vector<Index> touched = g_.touched_by(e);
  std::vector<DeltaVectors> deltas = g_.apply_event(e);
  HandledEvent handled = handle_event(fs_, deltas);

  for (const AppliedDelta& ad : handled.applied) {
    if (ad.x_transform) es_.apply_transform(*ad.x_transform);
    if (ad.x_rows_appended > 0) es_.append_rows(ad.x_rows_appended);
    if (ad.x_grow_col) es_.grow_column(*ad.x_grow_col);
    if (ad.x_base_rows.nnz_rows() > 0)
      es_.absorb_signal_delta(ad.x_base_rows);
  }
  es_.absorb_structure_delta(g_, fs_, touched);
  es_.push_to_tolerance(g_, fs_);

  ++events_applied_;
  if (++events_since_rebase_ >= cfg_.rebase_every ||
      fs_.cond_estimate() > cfg_.rebase_cond)
    rebase();
}

void Engine::rebase() {
  DenseMatrix t = fs_.rebase();
  es_.apply_transform(t);
  events_since_rebase_ = 0;
}

double Engine::score(Index u, Index v, bool enhanced) const {
  Vector zu = enhanced ? es_.query_enhanced(fs_, u) : fs_.query_context(u);
  return zu.dot(fs_.query_content(v));
}

}  // namespace damf
