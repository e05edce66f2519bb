#pragma once

#include <cstdint>
#include <deque>
#include <queue>
#include <vector>

#include "damf/factor_state.hpp"
#include "damf/graph.hpp"
#include "damf/types.hpp"

namespace damf {

struct EnhancerParams {
  double alpha = 0.3;
  double eps = 1e-5;
};

// PPR-enhanced context embedding Z = sum_i alpha (1-alpha)^i (D^-1 A)^i X,
// maintained in base feature coordinates (shares PX with the factor state).
// rb is the fixed-point defect rb = alpha Xb + (1-alpha) D^-1 A Zb - Zb;
// push moves a row's defect into Zb and scatters the (1-alpha)-decayed mass
// to in-neighbors. Dangling rows use the zero-operator convention, so
// Z[u] = alpha X[u] there.
//
// With alpha == 1 the series collapses to X; Zb then mirrors Xb bit for bit
// and the residual machinery is bypassed.
class EnhancerState {
 public:
  EnhancerState() = default;
  EnhancerState(EnhancerParams params, DenseMatrix zb, DenseMatrix rb);

  static EnhancerState init_propagate(const DynamicGraph& g,
                                      const FactorState& s,
                                      EnhancerParams params);

  double alpha() const { return params_.alpha; }
  double eps() const { return params_.eps; }
  const DenseMatrix& zb() const { return zb_; }
  const DenseMatrix& rb() const { return rb_; }
  std::uint64_t total_pushes() const { return total_pushes_; }

  // rb[u] += alpha * dxb[u] for each nonzero base-space signal delta row.
  void absorb_signal_delta(const SparseRowMatrix& dxb);

  // Full defect recompute for rows whose out-neighborhood changed; called
  // after the graph mutation. New rows must have been appended first.
  void absorb_structure_delta(const DynamicGraph& g, const FactorState& s,
                              const std::vector<Index>& touched);

  // Drains the queue until every row satisfies
  // |rb[u]|_inf * s_max <= eps * max(deg(u), 1).
  void push_to_tolerance(const DynamicGraph& g, const FactorState& s);

  Vector query_enhanced(const FactorState& s, Index u) const;

  // Structural bookkeeping driven by the factor state's applied deltas.
  void append_rows(Index count);
  void grow_column(const SparseVec& col);
  void apply_transform(const DenseMatrix& t);

 private:
  double row_key(Index u, double deg) const;
  void note_residual(Index u, double key);

  EnhancerParams params_;
  DenseMatrix zb_, rb_;  // n x k

  std::deque<Index> fifo_;
  std::vector<char> in_fifo_;
  // Lazy max-heap over scaled residuals of rows left below threshold; it
  // catches rows that a later, larger s_max pushes over the line.
  std::priority_queue<std::pair<double, Index>> index_;
  std::vector<double> index_key_;
  std::uint64_t total_pushes_ = 0;
};

}  // namespace damf
