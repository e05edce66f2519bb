#pragma once

#include <optional>

#include "damf/types.hpp"

namespace damf {

// One event's output: projections F/G, sparse embedding deltas, and the new
// spectrum. Shapes depend on how the active rank moved:
//   - unchanged: F, G are k x k; dX/dY hold current-coordinate row deltas.
//   - grown (k+1): F, G are (k+1) x (k+1) and carry the new base direction in
//     their last row; grow_x/grow_y are the base columns to append; dX/dY are
//     empty (the appended column is the whole delta).
//   - shrunk: F, G are k x k2 and the state folds the projection eagerly.
// A row index equal to append_x/append_y refers to a row the update appends.
struct ProjectionUpdate {
  DenseMatrix F;  // X-side projection
  DenseMatrix G;  // Y-side projection
  SparseRowMatrix dX;
  SparseRowMatrix dY;
  Vector sigma2;
  std::optional<SparseVec> grow_x;
  std::optional<SparseVec> grow_y;
  Index append_x = -1;  // Xb gains a zero row at this index first
  Index append_y = -1;
};

// Base-space effects of one applied update, in application order. This is
// what the PPR enhancer consumes: only the X (context) side matters to it.
struct AppliedDelta {
  std::optional<DenseMatrix> x_transform;  // base changed: right-multiply by t
  Index x_rows_appended = 0;
  std::optional<SparseVec> x_grow_col;  // appended base column (signal delta)
  SparseRowMatrix x_base_rows;          // base-coordinate row deltas
};

}  // namespace damf
