#include "damf/update_engine.hpp"

#include <cmath>

#include "damf/kernels.hpp"
#include "damf/svd.hpp"

namespace damf {

namespace {

constexpr double kSigmaFloor = 1e-12;  // drop sigma2 below this times max
// A new basis direction must stick out of the current span by more than the
// noise floor of the clamped Pythagorean residual (sqrt-of-cancellation plus
// accumulated orthonormality drift); below it the column is treated as
// in-span and the rank is held.
constexpr double kGrowFloor = 1e-6;




// Scaled projection block: out(i,j) = inner(i,j) * sqrt(s2[j] / s1[i]).
// The ratio form keeps F exactly identity when the spectrum is unchanged.
DenseMatrix scale_projection(const DenseMatrix& inner, const Vector& s1,
                             const Vector& s2) {
  DenseMatrix out(inner.rows(), inner.cols());
  for (Index i = 0; i < inner.rows(); ++i)
    for (Index j = 0; j < inner.cols(); ++j)
      out(i, j) = inner(i, j) * std::sqrt(s2[j] / s1[i]);
  return out;
}

struct SmallSvd {
  DenseMatrix e_top, h_top;        // first k rows of E / H
  Eigen::RowVectorXd e_bot, h_bot; // last row of E / H
  Vector sigma2;
};

SmallSvd split_small_svd(const DenseMatrix& m, Index k, Index keep) {
  SvdTriple svd = dense_svd_small(m, keep);
  Index k2 = svd.rank();
  const double floor =
      k2 > 0 ? kSigmaFloor * svd.sigma[0] : 0.0;
  while (k2 > 0 && svd.sigma[k2 - 1] < floor) --k2;
  SmallSvd out;
  out.e_top = svd.U.topRows(k).leftCols(k2);
  out.h_top = svd.V.topRows(k).leftCols(k2);
  out.e_bot = svd.U.row(k).head(k2);
  out.h_bot = svd.V.row(k).head(k2);
  out.sigma2 = svd.sigma.head(k2);
  return out;
}

}  // namespace

ProjectionUpdate update_embedding_n(const FactorState& s, const SparseVec& b,
                                    bool u_is_x) {
  const Index k = s.rank();
  const Index n_u = u_is_x ? s.rows_x() : s.rows_y();
  const Index n_v = u_is_x ? s.rows_y() : s.rows_x();
  if (b.size != n_u)
    throw Error(Error::Kind::ShapeMismatch, "update_embedding_n: column size");

  // Step 1: orthogonalization against the implicit U (or V) basis.
  ResidualNorm res =
      u_is_x ? ortho_residual_norm(s.xb(), s.px(), s.sigma(), b)
             : ortho_residual_norm(s.yb(), s.py(), s.sigma(), b);
  const double bnorm = std::sqrt(b.norm2sq());
  const double delta_r = 1e-12 * std::max(1.0, bnorm);
  const double r_b = std::max(res.r, delta_r);

  // Step 2: rediagonalization of the bordered (k+1)x(k+1) matrix.
  DenseMatrix m = DenseMatrix::Zero(k + 1, k + 1);
  for (Index i = 0; i < k; ++i) m(i, i) = s.sigma()[i];
  m.col(k).head(k) = res.w;
  m(k, k) = r_b;

  // The updated matrix is n_u x (n_v + 1); its rank caps the new rank.
  const Index rank_cap = std::min(n_u, n_v + 1);
  const bool allow_grow = k < s.dim() && k < rank_cap &&
                          res.r >= kGrowFloor * std::max(1.0, bnorm);
  SmallSvd small = split_small_svd(m, k, allow_grow ? k + 1 : k);
  const Index k2 = small.sigma2.size();

  // Step 3: space projection. F carries the in-span correction; the new
  // basis direction lives in b itself (scaled by row ex).
  Vector s2root = small.sigma2.array().sqrt();
  DenseMatrix inner_f = small.e_top - (res.w / r_b) * small.e_bot;
  DenseMatrix f_top = scale_projection(inner_f, s.sigma(), small.sigma2);
  DenseMatrix g_top = scale_projection(small.h_top, s.sigma(), small.sigma2);
  Eigen::RowVectorXd ex =
      (small.e_bot.array() * s2root.transpose().array()) / r_b;
  Eigen::RowVectorXd vrow =
      small.h_bot.array() * s2root.transpose().array();

  ProjectionUpdate pu;
  pu.sigma2 = small.sigma2;
  const bool grown = k2 == k + 1;

  DenseMatrix f_u, g_v;
  SparseRowMatrix d_u = SparseRowMatrix::zero(n_u, k2);
  SparseRowMatrix d_v = SparseRowMatrix::zero(n_v + 1, k2);
  if (grown) {
    f_u.resize(k + 1, k2);
    f_u.topRows(k) = f_top;
    f_u.row(k) = ex;
    g_v.resize(k + 1, k2);
    g_v.topRows(k) = g_top;
    g_v.row(k) = vrow;
  } else {
    f_u = f_top;
    g_v = g_top;
    d_u = SparseRowMatrix::outer(b, ex);
    if (!vrow.isZero(0.0)) {
      d_v.idx.push_back(n_v);
      d_v.vals = vrow;
    }
  }

  if (u_is_x) {
    pu.F = f_u;
    pu.G = g_v;
    pu.dX = d_u;
    pu.dY = d_v;
    pu.append_y = n_v;
    if (grown) {
      pu.grow_x = b;
      pu.grow_y = SparseVec::unit(n_v + 1, n_v);
    }
  } else {
    pu.F = g_v;
    pu.G = f_u;
    pu.dX = d_v;
    pu.dY = d_u;
    pu.append_x = n_v;
    if (grown) {
      pu.grow_x = SparseVec::unit(n_v + 1, n_v);
      pu.grow_y = b;
    }
  }
  return pu;
}

ProjectionUpdate update_embedding_e(const FactorState& s, const SparseVec& b,
                                    const SparseVec& c) {
  const Index k = s.rank();
  if (b.size != s.rows_x() || c.size != s.rows_y())
    throw Error(Error::Kind::ShapeMismatch, "update_embedding_e: column size");

  ResidualNorm res_b = ortho_residual_norm(s.xb(), s.px(), s.sigma(), b);
  ResidualNorm res_c = ortho_residual_norm(s.yb(), s.py(), s.sigma(), c);
  const double bnorm = std::sqrt(b.norm2sq());
  const double cnorm = std::sqrt(c.norm2sq());
  const double r_b = std::max(res_b.r, 1e-12 * std::max(1.0, bnorm));
  const double r_c = std::max(res_c.r, 1e-12 * std::max(1.0, cnorm));

  Vector wb(k + 1), wc(k + 1);
  wb.head(k) = res_b.w;
  wb[k] = r_b;
  wc.head(k) = res_c.w;
  wc[k] = r_c;

  DenseMatrix m = DenseMatrix::Zero(k + 1, k + 1);
  for (Index i = 0; i < k; ++i) m(i, i) = s.sigma()[i];
  m += wb * wc.transpose();

  const bool allow_grow =
      k < s.dim() && k < std::min(s.rows_x(), s.rows_y()) &&
      res_b.r >= kGrowFloor * std::max(1.0, bnorm) &&
      res_c.r >= kGrowFloor * std::max(1.0, cnorm);
  SmallSvd small = split_small_svd(m, k, allow_grow ? k + 1 : k);
  const Index k2 = small.sigma2.size();

  Vector s2root = small.sigma2.array().sqrt();
  DenseMatrix inner_f = small.e_top - (res_b.w / r_b) * small.e_bot;
  DenseMatrix inner_g = small.h_top - (res_c.w / r_c) * small.h_bot;
  DenseMatrix f_top = scale_projection(inner_f, s.sigma(), small.sigma2);
  DenseMatrix g_top = scale_projection(inner_g, s.sigma(), small.sigma2);
  Eigen::RowVectorXd ex =
      (small.e_bot.array() * s2root.transpose().array()) / r_b;
  Eigen::RowVectorXd ey =
      (small.h_bot.array() * s2root.transpose().array()) / r_c;

  ProjectionUpdate pu;
  pu.sigma2 = small.sigma2;
  if (k2 == k + 1) {
    pu.F.resize(k + 1, k2);
    pu.F.topRows(k) = f_top;
    pu.F.row(k) = ex;
    pu.G.resize(k + 1, k2);
    pu.G.topRows(k) = g_top;
    pu.G.row(k) = ey;
    pu.grow_x = b;
    pu.grow_y = c;
    pu.dX = SparseRowMatrix::zero(s.rows_x(), k2);
    pu.dY = SparseRowMatrix::zero(s.rows_y(), k2);
  } else {
    pu.F = f_top;
    pu.G = g_top;
    pu.dX = SparseRowMatrix::outer(b, ex);
    pu.dY = SparseRowMatrix::outer(c, ey);
  }
  return pu;
}

HandledEvent handle_event(FactorState& s,
                          const std::vector<DeltaVectors>& deltas) {
  HandledEvent out;
  for (const DeltaVectors& dv : deltas) {
    ProjectionUpdate pu;
    switch (dv.step) {
      case DeltaVectors::Step::Edge:
        pu = update_embedding_e(s, dv.b, *dv.c);
        break;
      case DeltaVectors::Step::NodeColumn:
        pu = update_embedding_n(s, dv.b, true);
        break;
      case DeltaVectors::Step::NodeRow:
        pu = update_embedding_n(s, dv.b, false);
        break;
    }
    out.applied.push_back(s.apply_update(pu));
    out.updates.push_back(std::move(pu));
  }
  return out;
}

}  // namespace damf
