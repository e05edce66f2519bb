#include <doctest.h>

#include <cmath>

#include "damf/eval.hpp"
#include "damf/update_engine.hpp"
#include "helpers.hpp"

using namespace damf;
using namespace damf::testing;

namespace {

DenseMatrix engine_product(const FactorState& s) {
  DenseMatrix x, y;
  s.query_all(x, y);
  return x * y.transpose();
}

}  // namespace

TEST_CASE("appending a column to a 1x1 matrix") {
  FactorState s(DenseMatrix::Ones(1, 1), DenseMatrix::Ones(1, 1),
                DenseMatrix::Identity(1, 1), DenseMatrix::Identity(1, 1),
                Vector::Ones(1), 2);
  SparseVec b = SparseVec::unit(1, 0, 1.0);
  ProjectionUpdate u = update_embedding_n(s, b);
  s.apply_update(u);
  REQUIRE(s.rank() == 1);  // [1 1] is rank one
  CHECK(s.sigma()[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  DenseMatrix prod = engine_product(s);
  REQUIRE(prod.cols() == 2);
  CHECK(prod(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(prod(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("zero column adds an isolated node") {
  Rng rng(41);
  DenseMatrix a = random_dense(6, 4, rng) * random_dense(4, 6, rng);
  FactorState s = state_from_dense(a, 4);
  const Index k = s.rank();
  SparseVec b;
  b.size = 6;
  ProjectionUpdate u = update_embedding_n(s, b);
  CHECK((u.F - DenseMatrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((u.G - DenseMatrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(u.dX.nnz_rows() == 0);
  DenseMatrix before = engine_product(s);
  s.apply_update(u);
  DenseMatrix after = engine_product(s);
  REQUIRE(after.cols() == 7);
  CHECK(after.col(6).norm() < 1e-12);
  CHECK(rel_frob_dist(after.leftCols(6), before) < 1e-12);
}

TEST_CASE("node change matches the dense truncation oracle") {
  Rng rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    DenseMatrix a =
        random_dense(20, 6, rng) * random_dense(6, 20, rng);  // rank 6
    FactorState s = state_from_dense(a, 6);
    SparseVec b = random_sparse_vec(20, 3, rng);

    ProjectionUpdate u = update_embedding_n(s, b);
    for (Index i = 0; i + 1 < u.sigma2.size(); ++i)
      CHECK(u.sigma2[i] >= u.sigma2[i + 1]);
    s.apply_update(u);

    DenseMatrix updated(20, 21);
    updated.leftCols(20) = a;
    updated.col(20) = b.to_dense();
    SvdTriple oracle = jacobi_tsvd(updated, 6);
    CHECK(rel_frob_dist(engine_product(s), oracle.reconstruct()) <= 1e-8);
    CHECK(s.ortho_defect_x() < 1e-6);
    CHECK(s.ortho_defect_y() < 1e-6);
  }
}

TEST_CASE("edge change reproduces the known 2x2 update") {
  DenseMatrix xb(2, 2), yb(2, 2);
  xb << std::sqrt(2.0), 0.0, 0.0, 1.0;
  yb = xb;
  Vector sigma(2);
  sigma << 2.0, 1.0;
  FactorState s(xb, yb, DenseMatrix::Identity(2, 2),
                DenseMatrix::Identity(2, 2), sigma, 2);

  ProjectionUpdate u = update_embedding_e(s, SparseVec::unit(2, 0),
                                          SparseVec::unit(2, 1, 1.0));
  s.apply_update(u);
  CHECK(s.sigma()[0] ==
        doctest::Approx(std::sqrt(3.0 + std::sqrt(5.0))).epsilon(1e-10));
  CHECK(s.sigma()[1] ==
        doctest::Approx(std::sqrt(3.0 - std::sqrt(5.0))).epsilon(1e-10));
  DenseMatrix want(2, 2);
  want << 2.0, 1.0, 0.0, 1.0;
  CHECK(rel_frob_dist(engine_product(s), want) <= 1e-10);
}

TEST_CASE("adding then removing an edge restores the product") {
  Rng rng(43);
  // Rank-5 matrix tracked at d = 6, so the intermediate rank-6 state is
  // held without truncation and the removal undoes the addition exactly.
  DenseMatrix a = random_dense(12, 5, rng) * random_dense(5, 12, rng);
  FactorState s = state_from_dense(a, 6);
  DenseMatrix before = engine_product(s);

  SparseVec b = SparseVec::unit(12, 3);
  SparseVec c_add = SparseVec::unit(12, 7, 1.0);
  SparseVec c_rm = SparseVec::unit(12, 7, -1.0);
  s.apply_update(update_embedding_e(s, b, c_add));
  s.apply_update(update_embedding_e(s, b, c_rm));
  CHECK(rel_frob_dist(engine_product(s), before) <= 1e-8);
}

TEST_CASE("in-subspace edge update stays on the clamped path") {
  Rng rng(44);
  DenseMatrix a = random_dense(15, 6, rng) * random_dense(6, 15, rng);
  FactorState s = state_from_dense(a, 6);
  const Index k = s.rank();

  // b in span(U), c in span(V), built from the state's own basis.
  DenseMatrix x, y;
  s.query_all(x, y);
  Vector inv_root = s.sigma().array().rsqrt();
  DenseMatrix u_basis = x * inv_root.asDiagonal();
  DenseMatrix v_basis = y * inv_root.asDiagonal();
  Vector cu = random_dense(k, 1, rng);
  Vector cv = random_dense(k, 1, rng);
  Vector bd = u_basis * cu;
  Vector cd = v_basis * cv;
  auto densify = [](const Vector& v) {
    SparseVec out;
    out.size = v.size();
    for (Index i = 0; i < v.size(); ++i)
      if (v[i] != 0.0) out.nz.emplace_back(i, v[i]);
    return out;
  };

  ProjectionUpdate u = update_embedding_e(s, densify(bd), densify(cd));
  CHECK(u.sigma2.size() == k);  // no growth on an in-subspace update
  s.apply_update(u);

  DenseMatrix updated = a + bd * cd.transpose();
  SvdTriple oracle = jacobi_tsvd(updated, 6);
  CHECK(rel_frob_dist(engine_product(s), oracle.reconstruct()) <= 1e-8);
}

TEST_CASE("edge update matches the oracle from a random factorization") {
  Rng rng(45);
  for (int rep = 0; rep < 10; ++rep) {
    DenseMatrix a = random_dense(18, 6, rng) * random_dense(6, 18, rng);
    FactorState s = state_from_dense(a, 6);
    const Index u_node = static_cast<Index>(rand_index(rng, 18));
    Index v_node = static_cast<Index>(rand_index(rng, 18));
    if (v_node == u_node) v_node = (v_node + 1) % 18;
    const double w = rand_unit(rng) > 0.5 ? 1.0 : -0.5;

    s.apply_update(update_embedding_e(s, SparseVec::unit(18, u_node),
                                      SparseVec::unit(18, v_node, w)));
    DenseMatrix updated = a;
    updated(u_node, v_node) += w;
    SvdTriple oracle = jacobi_tsvd(updated, 6);
    CHECK(rel_frob_dist(engine_product(s), oracle.reconstruct()) <= 1e-8);
    CHECK(rel_frob_dist(Eigen::MatrixXd(s.sigma()),
                        Eigen::MatrixXd(oracle.sigma)) <= 1e-8);
  }
}

TEST_CASE("handle_event: isolated node leaves old queries untouched") {
  DynamicGraph g(4);
  g.apply_event(GraphEvent::add_edge(0, 1));
  g.apply_event(GraphEvent::add_edge(2, 3));
  g.apply_event(GraphEvent::add_edge(1, 2));
  FactorState s = FactorState::init_from_graph(g, 3, 7);
  DenseMatrix x0, y0;
  s.query_all(x0, y0);

  auto deltas = g.apply_event(GraphEvent::add_node({}, {}));
  handle_event(s, deltas);
  CHECK(s.rows_x() == 5);
  CHECK(s.rows_y() == 5);
  CHECK(s.query_context(4).norm() == 0.0);
  CHECK(s.query_content(4).norm() == 0.0);
  DenseMatrix x1, y1;
  s.query_all(x1, y1);
  CHECK(rel_frob_dist(x1.topRows(4), x0) <= 1e-10);
  CHECK(rel_frob_dist(y1.topRows(4), y0) <= 1e-10);
}

TEST_CASE("handle_event: rank grows on a fresh edge") {
  DynamicGraph g(2);
  g.apply_event(GraphEvent::add_edge(1, 0));
  FactorState s = FactorState::init_from_graph(g, 2, 9);
  REQUIRE(s.rank() == 1);

  auto deltas = g.apply_event(GraphEvent::add_edge(0, 1));
  handle_event(s, deltas);
  CHECK(s.rank() == 2);
  CHECK(s.reconstruct_entry(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.reconstruct_entry(1, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("random stream stays on the oracle recursion") {
  StreamCase sc = gen_mixed_stream(100, 80, 300, 500, 4242);
  DynamicGraph g = sc.g0;
  FactorState s = FactorState::init_from_graph(g, 16, 4242);
  OracleTsvd oracle(sc.g0, 16);

  Index compared = 0;
  for (const GraphEvent& ev : sc.events) {
    auto deltas = g.apply_event(ev);
    HandledEvent he = handle_event(s, deltas);
    oracle.apply_deltas(deltas);

    for (size_t i = 0; i < he.updates.size(); ++i) {
      const ProjectionUpdate& pu = he.updates[i];
      const Index dm = deltas[i].delta_m;
      CHECK(pu.dX.nnz_rows() <= dm);
      CHECK(pu.dY.nnz_rows() <= dm);
      if (pu.grow_x)
        CHECK(static_cast<Index>(pu.grow_x->nz.size()) <= dm);
    }
    if (oracle.last_gap_ok()) {
      CHECK(oracle.product_rel_dist(s) <= 1e-6);
      CHECK(oracle.sigma_rel_dist(s.sigma()) <= 1e-8);
      ++compared;
    }
    CHECK(s.ortho_defect_x() <= 1e-6);
    CHECK(s.ortho_defect_y() <= 1e-6);
  }
  CHECK(compared > 400);  // the gap condition holds almost everywhere
}
