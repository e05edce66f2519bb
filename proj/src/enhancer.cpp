#include "damf/enhancer.hpp"

#include <cmath>

namespace damf {

namespace {
constexpr std::uint64_t kPushGuard = 1000000000ull;
}

EnhancerState::EnhancerState(EnhancerParams params, DenseMatrix zb,
                             DenseMatrix rb)
    : params_(params), zb_(std::move(zb)), rb_(std::move(rb)) {
  in_fifo_.assign(zb_.rows(), 0);
  index_key_.assign(zb_.rows(), 0.0);
  for (Index u = 0; u < rb_.rows(); ++u) {
    const double key = rb_.cols() > 0 ? rb_.row(u).lpNorm<Eigen::Infinity>()
                                      : 0.0;
    if (key > 0.0) {
      index_.emplace(key, u);  // deg rescaling happens lazily on pop
      index_key_[u] = key;
    }
  }
}

EnhancerState EnhancerState::init_propagate(const DynamicGraph& g,
                                            const FactorState& s,
                                            EnhancerParams params) {
  EnhancerState e;
  e.params_ = params;
  const Index n = s.rows_x();
  e.in_fifo_.assign(n, 0);
  e.index_key_.assign(n, 0.0);
  if (params.alpha == 1.0) {
    e.zb_ = s.xb();
    e.rb_ = DenseMatrix::Zero(n, s.rank());
    return e;
  }
  e.zb_ = DenseMatrix::Zero(n, s.rank());
  e.rb_ = params.alpha * s.xb();
  for (Index u = 0; u < n; ++u) {
    e.fifo_.push_back(u);
    e.in_fifo_[u] = 1;
  }
  e.push_to_tolerance(g, s);
  return e;
}

double EnhancerState::row_key(Index u, double deg) const {
  if (rb_.cols() == 0) return 0.0;
  return rb_.row(u).lpNorm<Eigen::Infinity>() / std::max(deg, 1.0);
}

void EnhancerState::note_residual(Index u, double key) {
  if (key > index_key_[u]) {
    index_.emplace(key, u);
    index_key_[u] = key;
  }
}

void EnhancerState::absorb_signal_delta(const SparseRowMatrix& dxb) {
  if (params_.alpha == 1.0) {
    for (Index t = 0; t < dxb.nnz_rows(); ++t)
      zb_.row(dxb.idx[t]) += dxb.vals.row(t);
    return;
  }
  for (Index t = 0; t < dxb.nnz_rows(); ++t) {
    const Index u = dxb.idx[t];
    rb_.row(u) += params_.alpha * dxb.vals.row(t);
    if (!in_fifo_[u]) {
      fifo_.push_back(u);
      in_fifo_[u] = 1;
    }
  }
}

void EnhancerState::absorb_structure_delta(const DynamicGraph& g,
                                           const FactorState& s,
                                           const std::vector<Index>& touched) {
  if (params_.alpha == 1.0) return;
  const double one_minus = 1.0 - params_.alpha;
  for (Index u : touched) {
    const double deg = g.out_degree(u);
    Eigen::RowVectorXd acc = params_.alpha * s.xb().row(u) - zb_.row(u);
    if (deg > 0.0) {
      Eigen::RowVectorXd nb = Eigen::RowVectorXd::Zero(zb_.cols());
      for (const auto& [v, w] : g.out_neighbors(u)) nb += w * zb_.row(v);
      acc += (one_minus / deg) * nb;
    }
    rb_.row(u) = acc;
    if (!in_fifo_[u]) {
      fifo_.push_back(u);
      in_fifo_[u] = 1;
    }
  }
}

void EnhancerState::push_to_tolerance(const DynamicGraph& g,
                                      const FactorState& s) {
  if (params_.alpha == 1.0) return;
  const double smax = s.proj_row_bound();
  // Tightened by alpha: the fixed-point solve amplifies a residual by up to
  // 1/alpha, so pushing to alpha*eps*deg bounds the Z error by eps*deg.
  const double eps = params_.alpha * params_.eps;
  const double one_minus = 1.0 - params_.alpha;

  // Re-queue rows that the current s_max pushes over the threshold.
  while (!index_.empty() && index_.top().first * smax > eps) {
    auto [key, u] = index_.top();
    index_.pop();
    if (index_key_[u] == key) index_key_[u] = 0.0;
    const double cur = row_key(u, g.out_degree(u));
    if (cur * smax > eps) {
      if (!in_fifo_[u]) {
        fifo_.push_back(u);
        in_fifo_[u] = 1;
      }
    } else {
      note_residual(u, cur);
    }
  }

  std::uint64_t pushes = 0;
  Eigen::RowVectorXd delta(rb_.cols());
  while (!fifo_.empty()) {
    const Index u = fifo_.front();
    fifo_.pop_front();
    in_fifo_[u] = 0;
    const double deg_u = g.out_degree(u);
    const double cur = row_key(u, deg_u);
    if (cur * smax <= eps) {
      if (cur > 0.0) note_residual(u, cur);
      continue;
    }
    if (++pushes > kPushGuard)
      throw Error(Error::Kind::NonConvergence,
                  "push_to_tolerance: push budget exceeded; eps too small");

    delta = rb_.row(u);
    rb_.row(u).setZero();
    zb_.row(u) += delta;
    for (const auto& [v, w] : g.in_neighbors(u)) {
      const double deg_v = std::max(g.out_degree(v), 1.0);
      rb_.row(v) += (one_minus * w / deg_v) * delta;
      const double key_v = row_key(v, g.out_degree(v));
      if (key_v * smax > eps) {
        if (!in_fifo_[v]) {
          fifo_.push_back(v);
          in_fifo_[v] = 1;
        }
      } else if (key_v > 0.0) {
        note_residual(v, key_v);
      }
    }
  }
  total_pushes_ += pushes;
}

Vector EnhancerState::query_enhanced(const FactorState& s, Index u) const {
  if (u < 0 || u >= zb_.rows())
    throw Error(Error::Kind::UnknownNode,
                "query_enhanced: unknown node " + std::to_string(u));
  return (zb_.row(u) * s.px()).transpose();
}

void EnhancerState::append_rows(Index count) {
  const Index n = zb_.rows() + count;
  zb_.conservativeResize(n, zb_.cols());
  rb_.conservativeResize(n, rb_.cols());
  for (Index i = n - count; i < n; ++i) {
    if (zb_.cols() > 0) zb_.row(i).setZero();
    if (rb_.cols() > 0) rb_.row(i).setZero();
  }
  in_fifo_.resize(n, 0);
  index_key_.resize(n, 0.0);
}

void EnhancerState::grow_column(const SparseVec& col) {
  zb_.conservativeResize(zb_.rows(), zb_.cols() + 1);
  zb_.col(zb_.cols() - 1).setZero();
  rb_.conservativeResize(rb_.rows(), rb_.cols() + 1);
  rb_.col(rb_.cols() - 1).setZero();
  if (params_.alpha == 1.0) {
    for (const auto& [u, v] : col.nz) zb_(u, zb_.cols() - 1) = v;
    return;
  }
  for (const auto& [u, v] : col.nz) {
    rb_(u, rb_.cols() - 1) += params_.alpha * v;
    if (!in_fifo_[u]) {
      fifo_.push_back(u);
      in_fifo_[u] = 1;
    }
  }
}

void EnhancerState::apply_transform(const DenseMatrix& t) {
  zb_ = (zb_ * t).eval();
  rb_ = (rb_ * t).eval();
  // Keys index the old coordinates; refresh lazily by reinserting live rows.
  if (params_.alpha == 1.0) return;
  for (Index u = 0; u < rb_.rows(); ++u) {
    const double key =
        rb_.cols() > 0 ? rb_.row(u).lpNorm<Eigen::Infinity>() : 0.0;
    note_residual(u, key);
  }
}

}  // namespace damf
