#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace damf {

using Index = Eigen::Index;

// Row-major dense matrix of 64-bit reals. Row-major keeps per-node embedding
// rows contiguous, which is what the update path touches.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
  enum class Kind {
    ParseError,
    UnknownNode,
    DuplicateEdge,
    MissingEdge,
    ShapeMismatch,
    ZeroMatrix,
    NonFinite,
    SingularProjection,
    NonConvergence,
    DegenerateLabels,
    KTooLarge,
    GraphTooSmall,
    TooLarge,
    IoError,
  };

  Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Sparse column vector: sorted (index, value) pairs, values nonzero.
struct SparseVec {
  Index size = 0;
  std::vector<std::pair<Index, double>> nz;

  static SparseVec unit(Index size, Index i, double v = 1.0) {
    SparseVec b;
    b.size = size;
    if (v != 0.0) b.nz.emplace_back(i, v);
    return b;
  }

  double norm2sq() const {
    double s = 0.0;
    for (const auto& [i, v] : nz) s += v * v;
    return s;
  }

  Vector to_dense() const {
    Vector x = Vector::Zero(size);
    for (const auto& [i, v] : nz) x[i] = v;
    return x;
  }
};

// Matrix with few nonzero rows, stored as sorted row indices plus a dense
// payload block (one payload row per stored index).
struct SparseRowMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> idx;  // strictly increasing, < rows
  DenseMatrix vals;        // idx.size() x cols

  Index nnz_rows() const { return static_cast<Index>(idx.size()); }

  static SparseRowMatrix zero(Index rows, Index cols) {
    SparseRowMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.vals.resize(0, cols);
    return m;
  }

  // One sparse column as an n x 1 matrix.
  static SparseRowMatrix from_column(const SparseVec& b) {
    SparseRowMatrix m;
    m.rows = b.size;
    m.cols = 1;
    m.vals.resize(static_cast<Index>(b.nz.size()), 1);
    for (size_t i = 0; i < b.nz.size(); ++i) {
      m.idx.push_back(b.nz[i].first);
      m.vals(static_cast<Index>(i), 0) = b.nz[i].second;
    }
    return m;
  }

  // Rows of b scaled by a common row vector: row u -> b[u] * r.
  // Exact-zero rows are dropped.
  static SparseRowMatrix outer(const SparseVec& b,
                               const Eigen::RowVectorXd& r) {
    SparseRowMatrix m;
    m.rows = b.size;
    m.cols = r.size();
    if (r.isZero(0.0)) {
      m.vals.resize(0, r.size());
      return m;
    }
    m.vals.resize(static_cast<Index>(b.nz.size()), r.size());
    for (size_t i = 0; i < b.nz.size(); ++i) {
      m.idx.push_back(b.nz[i].first);
      m.vals.row(static_cast<Index>(i)) = b.nz[i].second * r;
    }
    return m;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d = DenseMatrix::Zero(rows, cols);
    for (Index i = 0; i < nnz_rows(); ++i) d.row(idx[i]) = vals.row(i);
    return d;
  }
};

inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

}  // namespace damf
