#include "damf/factor_state.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace damf {

namespace {

// LU of P^T, used to apply P^{-1} to sparse rows. `reliable` reports whether
// the pivots leave enough headroom for the solve to be trusted.
struct ProjSolver {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool reliable = true;
  bool singular = false;
};

ProjSolver lu_of_transpose(const DenseMatrix& p) {
  ProjSolver s{Eigen::PartialPivLU<Eigen::MatrixXd>(
                   Eigen::MatrixXd(p.transpose())),
               true, false};
  const auto diag = s.lu.matrixLU().diagonal();
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < diag.size(); ++i) {
    dmax = std::max(dmax, std::abs(diag[i]));
    dmin = std::min(dmin, std::abs(diag[i]));
  }
  if (diag.size() > 0) {
    s.singular = !(dmin > 0.0) || !std::isfinite(dmax);
    s.reliable = !s.singular && dmin > dmax * 1e-12;
  }
  return s;
}

void append_zero_row(DenseMatrix& m) {
  m.conservativeResize(m.rows() + 1, m.cols());
  if (m.cols() > 0) m.row(m.rows() - 1).setZero();
}

void append_column(DenseMatrix& m, const SparseVec& col) {
  m.conservativeResize(m.rows(), m.cols() + 1);
  m.col(m.cols() - 1).setZero();
  for (const auto& [i, v] : col.nz) m(i, m.cols() - 1) = v;
}

DenseMatrix blkdiag_one(const DenseMatrix& p) {
  DenseMatrix out = DenseMatrix::Zero(p.rows() + 1, p.cols() + 1);
  out.topLeftCorner(p.rows(), p.cols()) = p;
  out(p.rows(), p.cols()) = 1.0;
  return out;
}

}  // namespace

FactorState::FactorState(DenseMatrix xb, DenseMatrix yb, DenseMatrix px,
                         DenseMatrix py, Vector sigma, Index d)
    : xb_(std::move(xb)),
      yb_(std::move(yb)),
      px_(std::move(px)),
      py_(std::move(py)),
      sigma_(std::move(sigma)),
      d_(d) {}

SparseOp adjacency_op(const DynamicGraph& g) {
  SparseOp op;
  op.rows = g.node_count();
  op.cols = g.node_count();
  op.apply = [&g](const DenseMatrix& x) -> DenseMatrix {
    DenseMatrix y = DenseMatrix::Zero(g.node_count(), x.cols());
    for (Index u = 0; u < g.node_count(); ++u)
      for (const auto& [v, w] : g.out_neighbors(u)) y.row(u) += w * x.row(v);
    return y;
  };
  op.apply_t = [&g](const DenseMatrix& x) -> DenseMatrix {
    DenseMatrix y = DenseMatrix::Zero(g.node_count(), x.cols());
    for (Index u = 0; u < g.node_count(); ++u)
      for (const auto& [v, w] : g.out_neighbors(u)) y.row(v) += w * x.row(u);
    return y;
  };
  return op;
}

FactorState FactorState::init_from_graph(const DynamicGraph& g, Index d,
                                         std::uint64_t seed) {
  if (g.node_count() == 0 || g.arc_count() == 0)
    throw Error(Error::Kind::ZeroMatrix,
                "init_from_graph: graph has no edges");
  SvdTriple svd = randomized_tsvd(adjacency_op(g), d, 10, 4, seed);
  const Index k = svd.rank();
  Vector root = svd.sigma.array().sqrt();
  FactorState s;
  s.xb_ = svd.U * root.asDiagonal();
  s.yb_ = svd.V * root.asDiagonal();
  s.px_ = DenseMatrix::Identity(k, k);
  s.py_ = DenseMatrix::Identity(k, k);
  s.sigma_ = svd.sigma;
  s.d_ = d;
  return s;
}

void FactorState::check_node(Index u, Index n, const char* who) const {
  if (u < 0 || u >= n)
    throw Error(Error::Kind::UnknownNode,
                std::string(who) + ": unknown node " + std::to_string(u));
}

Vector FactorState::query_context(Index u) const {
  check_node(u, rows_x(), "query_context");
  return (xb_.row(u) * px_).transpose();
}

Vector FactorState::query_content(Index u) const {
  check_node(u, rows_y(), "query_content");
  return (yb_.row(u) * py_).transpose();
}

void FactorState::query_all(DenseMatrix& x, DenseMatrix& y) const {
  x = xb_ * px_;
  y = yb_ * py_;
}

double FactorState::reconstruct_entry(Index u, Index v) const {
  return query_context(u).dot(query_content(v));
}

AppliedDelta FactorState::apply_update(const ProjectionUpdate& u) {
  const Index k_old = rank();
  const Index k2 = u.sigma2.size();
  const bool grown = u.grow_x.has_value();
  AppliedDelta out;

  if (u.append_x >= 0) {
    if (u.append_x != rows_x())
      throw Error(Error::Kind::ShapeMismatch, "apply_update: bad row append");
    append_zero_row(xb_);
    out.x_rows_appended = 1;
  }
  if (u.append_y >= 0) {
    if (u.append_y != rows_y())
      throw Error(Error::Kind::ShapeMismatch, "apply_update: bad row append");
    append_zero_row(yb_);
  }

  if (grown) {
    if (k2 != k_old + 1 || !u.grow_y.has_value())
      throw Error(Error::Kind::ShapeMismatch,
                  "apply_update: inconsistent rank growth");
    append_column(xb_, *u.grow_x);
    append_column(yb_, *u.grow_y);
    px_ = blkdiag_one(px_);
    py_ = blkdiag_one(py_);
    out.x_grow_col = u.grow_x;
  }

  if (u.F.rows() != px_.cols() || u.G.rows() != py_.cols() ||
      u.F.cols() != k2 || u.G.cols() != k2)
    throw Error(Error::Kind::ShapeMismatch, "apply_update: projection shape");

  DenseMatrix px_new = px_ * u.F;
  DenseMatrix py_new = py_ * u.G;

  // The lazy path needs P^{-T} solves. Rank shrink makes P rectangular, and
  // a single near-degenerate growth can push cond(P) past what a solve can
  // carry; both cases fold eagerly instead (same algebra, new base).
  bool eager = k2 < k_old;
  ProjSolver lux, luy;
  if (!eager && k2 > 0) {
    lux = lu_of_transpose(px_new);
    luy = lu_of_transpose(py_new);
    if (lux.singular || luy.singular)
      throw Error(Error::Kind::SingularProjection,
                  "apply_update: projection matrix is singular");
    eager = !lux.reliable || !luy.reliable;
  }

  if (eager) {
    xb_ = (xb_ * px_new).eval();
    yb_ = (yb_ * py_new).eval();
    for (Index t = 0; t < u.dX.nnz_rows(); ++t)
      xb_.row(u.dX.idx[t]) += u.dX.vals.row(t);
    for (Index t = 0; t < u.dY.nnz_rows(); ++t)
      yb_.row(u.dY.idx[t]) += u.dY.vals.row(t);
    px_ = DenseMatrix::Identity(k2, k2);
    py_ = DenseMatrix::Identity(k2, k2);
    out.x_transform = px_new;
    out.x_base_rows = u.dX;  // base == current after the fold
    sigma_ = u.sigma2;
    return out;
  }

  px_ = px_new;
  py_ = py_new;

  out.x_base_rows = SparseRowMatrix::zero(rows_x(), k2);
  if (u.dX.nnz_rows() > 0) {
    Eigen::MatrixXd z = lux.lu.solve(Eigen::MatrixXd(u.dX.vals.transpose()));
    out.x_base_rows.idx = u.dX.idx;
    out.x_base_rows.vals = z.transpose();
    for (Index t = 0; t < u.dX.nnz_rows(); ++t)
      xb_.row(u.dX.idx[t]) += out.x_base_rows.vals.row(t);
  }
  if (u.dY.nnz_rows() > 0) {
    Eigen::MatrixXd z = luy.lu.solve(Eigen::MatrixXd(u.dY.vals.transpose()));
    for (Index t = 0; t < u.dY.nnz_rows(); ++t)
      yb_.row(u.dY.idx[t]) += z.col(t).transpose();
  }

  sigma_ = u.sigma2;
  return out;
}

DenseMatrix FactorState::rebase() {
  DenseMatrix tx = px_;
  xb_ = (xb_ * px_).eval();
  yb_ = (yb_ * py_).eval();
  px_ = DenseMatrix::Identity(rank(), rank());
  py_ = DenseMatrix::Identity(rank(), rank());
  return tx;
}

double FactorState::cond_estimate() const {
  const Index k = rank();
  if (k == 0) return 1.0;

  Vector v = Vector::Constant(k, 1.0 / std::sqrt(double(k)));
  double smax_sq = 1.0;
  for (int it = 0; it < 10; ++it) {
    Vector w = px_.transpose() * (px_ * v);
    smax_sq = w.norm();
    if (smax_sq == 0.0) return std::numeric_limits<double>::infinity();
    v = w / smax_sq;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu((Eigen::MatrixXd(px_)));
  const auto diag = lu.matrixLU().diagonal();
  for (Index i = 0; i < diag.size(); ++i)
    if (diag[i] == 0.0) return std::numeric_limits<double>::infinity();
  Vector v2 = Vector::Constant(k, 1.0 / std::sqrt(double(k)));
  double inv_smin_sq = 1.0;
  for (int it = 0; it < 10; ++it) {
    Vector w = lu.solve(Eigen::VectorXd(lu.transpose().solve(v2)));
    inv_smin_sq = w.norm();
    v2 = w / inv_smin_sq;
  }
  return std::sqrt(smax_sq) * std::sqrt(inv_smin_sq);
}

double FactorState::proj_row_bound() const {
  const Index k = rank();
  if (k == 0) return 1.0;
  double col1 = 0.0, rowinf = 0.0;
  for (Index j = 0; j < k; ++j) col1 = std::max(col1, px_.col(j).lpNorm<1>());
  for (Index i = 0; i < k; ++i)
    rowinf = std::max(rowinf, px_.row(i).lpNorm<1>());
  return std::max(col1, std::sqrt(col1 * rowinf));
}

namespace {
double ortho_defect(const DenseMatrix& base, const DenseMatrix& p,
                    const Vector& sigma) {
  if (sigma.size() == 0) return 0.0;
  DenseMatrix u = base * p;
  Vector inv_root = sigma.array().rsqrt();
  u = u * inv_root.asDiagonal();
  DenseMatrix g = u.transpose() * u;
  g -= DenseMatrix::Identity(g.rows(), g.cols());
  return g.cwiseAbs().maxCoeff();
}
}  // namespace

double FactorState::ortho_defect_x() const {
  return ortho_defect(xb_, px_, sigma_);
}

double FactorState::ortho_defect_y() const {
  return ortho_defect(yb_, py_, sigma_);
}

}  // namespace damf
