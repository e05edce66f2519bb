#pragma once

#include <Eigen/QR>
#include <Eigen/SVD>

#include "damf/factor_state.hpp"
#include "damf/projection_update.hpp"
#include "damf/rng.hpp"
#include "damf/types.hpp"

namespace damf::testing {

inline DenseMatrix random_dense(Index rows, Index cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rand_gaussian(rng);
  return m;
}

inline DenseMatrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  DenseMatrix g = random_dense(rows, cols, rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = DenseMatrix::Identity(rows, cols);
  q = qr.householderQ() * q;
  return q;
}

inline SparseRowMatrix random_sparse_rows(Index rows, Index cols, Index t,
                                          Rng& rng) {
  SparseRowMatrix m;
  m.rows = rows;
  m.cols = cols;
  std::vector<Index> picked;
  while (static_cast<Index>(picked.size()) < t) {
    Index r = static_cast<Index>(rand_index(rng, rows));
    bool dup = false;
    for (Index p : picked) dup = dup || p == r;
    if (!dup) picked.push_back(r);
  }
  std::sort(picked.begin(), picked.end());
  m.idx = picked;
  m.vals = random_dense(t, cols, rng);
  return m;
}

inline SparseVec random_sparse_vec(Index size, Index t, Rng& rng) {
  SparseRowMatrix rows = random_sparse_rows(size, 1, t, rng);
  SparseVec b;
  b.size = size;
  for (Index i = 0; i < rows.nnz_rows(); ++i)
    b.nz.emplace_back(rows.idx[i], rows.vals(i, 0));
  return b;
}

// Reference truncated SVD through Eigen's Jacobi path.
inline SvdTriple jacobi_tsvd(const DenseMatrix& m, Index d) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Index k = std::min<Index>(d, svd.singularValues().size());
  while (k > 0 && svd.singularValues()[k - 1] <=
                      1e-13 * svd.singularValues()[0])
    --k;
  SvdTriple out;
  out.U = svd.matrixU().leftCols(k);
  out.sigma = svd.singularValues().head(k);
  out.V = svd.matrixV().leftCols(k);
  return out;
}

// FactorState tracking m exactly (X = U sqrt(S), PX = PY = I).
inline FactorState state_from_dense(const DenseMatrix& m, Index d) {
  SvdTriple svd = jacobi_tsvd(m, d);
  Vector root = svd.sigma.array().sqrt();
  const Index k = svd.rank();
  return FactorState(svd.U * root.asDiagonal(), svd.V * root.asDiagonal(),
                     DenseMatrix::Identity(k, k),
                     DenseMatrix::Identity(k, k), svd.sigma, d);
}

// Maintains current-coordinate X and Y densely from ProjectionUpdates; the
// differential partner of the lazy base-space path.
struct EagerMirror {
  DenseMatrix x, y;

  explicit EagerMirror(const FactorState& s) { s.query_all(x, y); }

  static void append_zero_row(DenseMatrix& m) {
    m.conservativeResize(m.rows() + 1, m.cols());
    if (m.cols() > 0) m.row(m.rows() - 1).setZero();
  }

  void apply(const ProjectionUpdate& u) {
    if (u.append_x >= 0) append_zero_row(x);
    if (u.append_y >= 0) append_zero_row(y);
    const Index kx = x.cols();
    const Index ky = y.cols();
    if (u.grow_x) {
      Vector gx = u.grow_x->to_dense();
      x = (x * u.F.topRows(kx) + gx * u.F.bottomRows(1)).eval();
    } else {
      x = (x * u.F).eval();
      for (Index t = 0; t < u.dX.nnz_rows(); ++t)
        x.row(u.dX.idx[t]) += u.dX.vals.row(t);
    }
    if (u.grow_y) {
      Vector gy = u.grow_y->to_dense();
      y = (y * u.G.topRows(ky) + gy * u.G.bottomRows(1)).eval();
    } else {
      y = (y * u.G).eval();
      for (Index t = 0; t < u.dY.nnz_rows(); ++t)
        y.row(u.dY.idx[t]) += u.dY.vals.row(t);
    }
  }
};

inline double rel_frob_dist(const DenseMatrix& a, const DenseMatrix& b) {
  const double denom = b.norm();
  return denom == 0.0 ? a.norm() : (a - b).norm() / denom;
}

}  // namespace damf::testing
