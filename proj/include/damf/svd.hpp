#pragma once

#include <cstdint>
#include <functional>

#include "damf/types.hpp"

namespace damf {

// Truncated SVD factors. U and V are column-orthonormal, sigma is strictly
// positive and nonincreasing.
struct SvdTriple {
  DenseMatrix U;  // n x k
  Vector sigma;   // k
  DenseMatrix V;  // m x k

  Index rank() const { return sigma.size(); }
  DenseMatrix reconstruct() const {
    return U * sigma.asDiagonal() * V.transpose();
  }
};

// Matrix-free view of a sparse operator, enough for the randomized
// range finder: block products with the operator and its transpose.
struct SparseOp {
  Index rows = 0;
  Index cols = 0;
  std::function<DenseMatrix(const DenseMatrix&)> apply;    // A  * X
  std::function<DenseMatrix(const DenseMatrix&)> apply_t;  // A^T * X

  static SparseOp from_dense(const DenseMatrix& a);
};

// Exact SVD of a small dense matrix, truncated to at most `keep` values.
// Deterministic (bidiagonalization-based); exact zeros are dropped so the
// returned sigma stays strictly positive.
SvdTriple dense_svd_small(const DenseMatrix& m, Index keep);

// Randomized range-finder truncated SVD with power iterations. Returns
// rank min(d, numerical rank); throws Error::Kind::ZeroMatrix on all-zero
// input.
SvdTriple randomized_tsvd(const SparseOp& a, Index d, Index oversample = 10,
                          Index power_iters = 4, std::uint64_t seed = 0);

// Thin Q factor of a Householder QR; columns orthonormal.
DenseMatrix qr_orthonormalize(const DenseMatrix& m);

}  // namespace damf
