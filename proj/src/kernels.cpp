#include "damf/kernels.hpp"

#include <cmath>

namespace damf {

DenseMatrix mult_sparseT_dense(const SparseRowMatrix& b, const DenseMatrix& a) {
  if (b.rows != a.rows())
    throw Error(Error::Kind::ShapeMismatch, "mult_sparseT_dense: B is " +
                                                std::to_string(b.rows) +
                                                " rows, A is " +
                                                std::to_string(a.rows()));
  const Index q = b.cols;
  const Index p = a.cols();
  DenseMatrix out = DenseMatrix::Zero(q, p);
  for (Index t = 0; t < b.nnz_rows(); ++t) {
    const Index l = b.idx[t];
    for (Index i = 0; i < q; ++i) {
      const double bv = b.vals(t, i);
      if (bv == 0.0) continue;
      for (Index j = 0; j < p; ++j) out(i, j) += a(l, j) * bv;
    }
  }
  return out;
}

SparseRowMatrix mult_sparse_dense(const SparseRowMatrix& b,
                                  const DenseMatrix& c) {
  if (b.cols != c.rows())
    throw Error(Error::Kind::ShapeMismatch, "mult_sparse_dense: B has " +
                                                std::to_string(b.cols) +
                                                " cols, C has " +
                                                std::to_string(c.rows()) +
                                                " rows");
  SparseRowMatrix out;
  out.rows = b.rows;
  out.cols = c.cols();
  DenseMatrix buf(b.nnz_rows(), c.cols());
  Index kept = 0;
  for (Index t = 0; t < b.nnz_rows(); ++t) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(c.cols());
    for (Index i = 0; i < b.cols; ++i) {
      const double bv = b.vals(t, i);
      if (bv == 0.0) continue;
      for (Index j = 0; j < c.cols(); ++j) row(j) += bv * c(i, j);
    }
    if (row.isZero(0.0)) continue;  // keep the all-nonzero-row invariant
    out.idx.push_back(b.idx[t]);
    buf.row(kept++) = row;
  }
  out.vals = buf.topRows(kept);
  return out;
}

ResidualNorm ortho_residual_norm(const DenseMatrix& xb, const DenseMatrix& p,
                                 const Vector& sigma, const SparseVec& b) {
  // W = Sigma^{-1/2} P^T Xb^T b, built from the sparse side first.
  SparseRowMatrix bcol = SparseRowMatrix::from_column(b);
  DenseMatrix bt_x = mult_sparseT_dense(bcol, xb);  // 1 x k
  ResidualNorm res;
  res.w = (bt_x * p).transpose();
  for (Index i = 0; i < res.w.size(); ++i) res.w[i] /= std::sqrt(sigma[i]);
  res.r = std::sqrt(std::max(0.0, b.norm2sq() - res.w.squaredNorm()));
  return res;
}

}  // namespace damf
