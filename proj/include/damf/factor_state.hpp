#pragma once

#include <cstdint>

#include "damf/graph.hpp"
#include "damf/projection_update.hpp"
#include "damf/svd.hpp"
#include "damf/types.hpp"

namespace damf {

// Rank-k factorization X YT of the tracked matrix, held in base-space form:
// current X = Xb PX, current Y = Yb PY, and U = Xb PX Sigma^{-1/2} is
// column-orthonormal (likewise V). Events touch PX/PY and a few base rows;
// full-matrix work happens only on rebase or rank shrink.
class FactorState {
 public:
  FactorState() = default;

  // Direct construction from an existing factorization (X = U sqrt(S), ...).
  // Used by tests and by states built from explicit SVDs.
  FactorState(DenseMatrix xb, DenseMatrix yb, DenseMatrix px, DenseMatrix py,
              Vector sigma, Index d);

  static FactorState init_from_graph(const DynamicGraph& g, Index d,
                                     std::uint64_t seed);

  Index rank() const { return sigma_.size(); }
  Index dim() const { return d_; }
  Index rows_x() const { return xb_.rows(); }
  Index rows_y() const { return yb_.rows(); }
  const Vector& sigma() const { return sigma_; }
  const DenseMatrix& xb() const { return xb_; }
  const DenseMatrix& yb() const { return yb_; }
  const DenseMatrix& px() const { return px_; }
  const DenseMatrix& py() const { return py_; }

  // Folds one ProjectionUpdate into the state (Eq.-style lazy path: compose
  // the projection, solve base rows through PX^T). Returns the base-space
  // effects for the enhancer.
  AppliedDelta apply_update(const ProjectionUpdate& u);

  Vector query_context(Index u) const;
  Vector query_content(Index u) const;
  void query_all(DenseMatrix& x, DenseMatrix& y) const;
  double reconstruct_entry(Index u, Index v) const;

  // Folds PX/PY into the bases and resets them to identity. Returns the
  // transform the enhancer must apply to its own base-space state.
  DenseMatrix rebase();

  // Upper-leaning estimate of cond_2(PX): 10 power iterations on PX^T PX and
  // on its inverse through LU solves.
  double cond_estimate() const;

  // s_max bound for the enhancer's thresholds: at least the largest singular
  // value of PX and at least max_j ||PX[:,j]||_1, so a row r with
  // |r|_inf * s_max <= c satisfies |(r PX)[j]| <= c for every j.
  double proj_row_bound() const;

  // max |U^T U - I| over entries, U = Xb PX Sigma^{-1/2} (or the Y side).
  double ortho_defect_x() const;
  double ortho_defect_y() const;

 private:
  void check_node(Index u, Index n, const char* who) const;

  DenseMatrix xb_, yb_;  // n1 x k, n2 x k
  DenseMatrix px_, py_;  // k x k
  Vector sigma_;         // k, positive nonincreasing
  Index d_ = 0;
};

// Matrix-free adjacency operator for the randomized SVD.
SparseOp adjacency_op(const DynamicGraph& g);

}  // namespace damf
