#pragma once

#include "damf/types.hpp"

namespace damf {

// B^T A for B with t nonzero rows: O(t * p * q), independent of n.
DenseMatrix mult_sparseT_dense(const SparseRowMatrix& b, const DenseMatrix& a);

// B C for B with t nonzero rows: output rows are a subset of B's rows.
SparseRowMatrix mult_sparse_dense(const SparseRowMatrix& b,
                                  const DenseMatrix& c);

struct ResidualNorm {
  double r = 0.0;  // norm of b outside span(U)
  Vector w;        // U^T b
};

// W = U^T b and R = sqrt(max(0, |b|^2 - |W|^2)) for the implicit orthonormal
// U = Xb * P * Sigma^{-1/2}. The radicand is clamped at zero: the identity is
// exact in reals only.
ResidualNorm ortho_residual_norm(const DenseMatrix& xb, const DenseMatrix& p,
                                 const Vector& sigma, const SparseVec& b);

}  // namespace damf
