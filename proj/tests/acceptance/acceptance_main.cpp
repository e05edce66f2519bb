// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria (capped at 1 for ctest).
//
// Criteria 5 and the Wiki half of 8 need the Wiki/Cora edge lists under
// data/ (see README); when the files are absent those criteria fail with an
// explicit message rather than being silently skipped.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "damf/eval.hpp"
#include "damf/io.hpp"
#include "damf/kernels.hpp"
#include "damf/rng.hpp"
#include "damf/update_engine.hpp"

using namespace damf;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int criterion, const char* name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

bool file_exists(const std::string& p) {
  std::ifstream is(p);
  return is.good();
}

// --- Criteria 1 + 2: oracle equivalence and sparsity bounds ---------------

void criteria_oracle_and_sparsity() {
  const Index d = 16;
  const int n_streams = 20;
  const int n_events = 1000;
  double worst_prod = 0.0, worst_sigma = 0.0;
  std::uint64_t compared = 0, skipped_gap = 0;
  bool sparsity_ok = true;
  auto t0 = Clock::now();

  for (int stream = 0; stream < n_streams; ++stream) {
    StreamCase sc = gen_mixed_stream(300, 250, 900, n_events, 9000 + stream);
    DynamicGraph g = sc.g0;
    FactorState s = FactorState::init_from_graph(g, d, 9000 + stream);
    OracleTsvd oracle(sc.g0, d);
    Index since_rebase = 0;

    for (const GraphEvent& ev : sc.events) {
      std::vector<DeltaVectors> deltas = g.apply_event(ev);
      HandledEvent he = handle_event(s, deltas);
      oracle.apply_deltas(deltas);

      for (size_t i = 0; i < he.updates.size(); ++i) {
        const ProjectionUpdate& pu = he.updates[i];
        const Index dm = deltas[i].delta_m;
        if (pu.dX.nnz_rows() > dm || pu.dY.nnz_rows() > dm) sparsity_ok = false;
        if (pu.grow_x && static_cast<Index>(pu.grow_x->nz.size()) > dm)
          sparsity_ok = false;
        if (pu.grow_y && deltas[i].step == DeltaVectors::Step::Edge &&
            static_cast<Index>(pu.grow_y->nz.size()) > dm)
          sparsity_ok = false;
      }

      if (oracle.last_gap_ok()) {
        worst_prod = std::max(worst_prod, oracle.product_rel_dist(s));
        worst_sigma = std::max(worst_sigma, oracle.sigma_rel_dist(s.sigma()));
        ++compared;
      } else {
        ++skipped_gap;
      }
      if (++since_rebase >= 300 || s.cond_estimate() > 1e8) {
        s.rebase();
        since_rebase = 0;
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(Clock::now() - t0).count();
  report(1, "oracle equivalence",
         worst_prod <= 1e-6 && worst_sigma <= 1e-8 && secs < 300.0,
         fmt("max product dist %.3g (tol 1e-6), max sigma dist %.3g (tol "
             "1e-8), %llu steps compared, %llu gap-skipped, %.1fs (budget "
             "300s)",
             worst_prod, worst_sigma, (unsigned long long)compared,
             (unsigned long long)skipped_gap, secs));
  report(2, "sparsity bounds", sparsity_ok,
         fmt("every dX/dY kept <= delta_m nonzero rows over %d streams",
             n_streams));
}

// --- Criterion 3: kernel correctness and n-independence -------------------

void criterion_kernels() {
  Rng rng(31415);
  double worst_prod = 0.0, worst_resid = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const Index n = 50 + static_cast<Index>(rand_index(rng, 200));
    const Index t = 1 + static_cast<Index>(rand_index(rng, 6));
    const Index q = 1 + static_cast<Index>(rand_index(rng, 6));
    const Index p = 1 + static_cast<Index>(rand_index(rng, 8));
    SparseRowMatrix b;
    b.rows = n;
    b.cols = q;
    {
      std::vector<Index> rows;
      while (static_cast<Index>(rows.size()) < t) {
        Index r = static_cast<Index>(rand_index(rng, n));
        bool dup = false;
        for (Index x : rows) dup = dup || x == r;
        if (!dup) rows.push_back(r);
      }
      std::sort(rows.begin(), rows.end());
      b.idx = rows;
      b.vals.resize(t, q);
      for (Index i = 0; i < t; ++i)
        for (Index j = 0; j < q; ++j) b.vals(i, j) = rand_gaussian(rng);
    }
    DenseMatrix a(n, p), c(q, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) a(i, j) = rand_gaussian(rng);
    for (Index i = 0; i < q; ++i)
      for (Index j = 0; j < p; ++j) c(i, j) = rand_gaussian(rng);

    DenseMatrix bd = b.to_dense();
    DenseMatrix want_t = bd.transpose() * a;
    DenseMatrix got_t = mult_sparseT_dense(b, a);
    worst_prod = std::max(worst_prod, (got_t - want_t).cwiseAbs().maxCoeff() /
                                          (1.0 + want_t.cwiseAbs().maxCoeff()));
    DenseMatrix want_m = bd * c;
    DenseMatrix got_m = mult_sparse_dense(b, c).to_dense();
    worst_prod = std::max(worst_prod, (got_m - want_m).cwiseAbs().maxCoeff() /
                                          (1.0 + want_m.cwiseAbs().maxCoeff()));
  }
  for (int rep = 0; rep < 500; ++rep) {
    const Index n = 40 + static_cast<Index>(rand_index(rng, 100));
    const Index k = 2 + static_cast<Index>(rand_index(rng, 6));
    DenseMatrix gmat(n, k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) gmat(i, j) = rand_gaussian(rng);
    DenseMatrix q = qr_orthonormalize(gmat);
    Vector sigma(k);
    for (Index i = 0; i < k; ++i) sigma[i] = double(k - i);
    DenseMatrix xb = q * Vector(sigma.array().sqrt()).asDiagonal();
    DenseMatrix p = DenseMatrix::Identity(k, k);
    SparseVec bv;
    bv.size = n;
    for (Index i = 0; i < 5; ++i)
      bv.nz.emplace_back(i, rand_gaussian(rng));
    ResidualNorm res = ortho_residual_norm(xb, p, sigma, bv);
    Vector bd = bv.to_dense();
    const double want = (bd - q * (q.transpose() * bd)).norm();
    worst_resid =
        std::max(worst_resid, std::abs(res.r - want) / (1.0 + want));
  }

  // n-independence: same t, doubled n.
  auto time_kernels = [](Index n) {
    Rng local(7);
    const Index t = 8, q = 8, p = 16;
    SparseRowMatrix b;
    b.rows = n;
    b.cols = q;
    for (Index i = 0; i < t; ++i) b.idx.push_back(i * (n / t));
    b.vals.resize(t, q);
    for (Index i = 0; i < t; ++i)
      for (Index j = 0; j < q; ++j) b.vals(i, j) = rand_gaussian(local);
    DenseMatrix a(n, p), c(q, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) a(i, j) = rand_gaussian(local);
    for (Index i = 0; i < q; ++i)
      for (Index j = 0; j < p; ++j) c(i, j) = rand_gaussian(local);
    volatile double sink = 0.0;
    std::vector<double> ms;
    for (int rep = 0; rep < 400; ++rep) {
      auto t0 = Clock::now();
      DenseMatrix r1 = mult_sparseT_dense(b, a);
      SparseRowMatrix r2 = mult_sparse_dense(b, c);
      sink = sink + r1(0, 0) + r2.vals(0, 0);
      ms.push_back(
          std::chrono::duration<double, std::milli>(Clock::now() - t0)
              .count());
    }
    std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
    return ms[ms.size() / 2];
  };
  time_kernels(1 << 14);  // warm up
  const double t_small = time_kernels(1 << 14);
  const double t_big = time_kernels(1 << 15);
  const double ratio = t_big / std::max(t_small, 1e-9);

  report(3, "kernel correctness",
         worst_prod <= 1e-12 && worst_resid <= 1e-8 && ratio < 1.5,
         fmt("product err %.3g (tol 1e-12), residual err %.3g (tol 1e-8), "
             "time ratio n->2n %.2f (tol 1.5)",
             worst_prod, worst_resid, ratio));
}

// --- Criterion 4: PPR correctness ------------------------------------------

void criterion_ppr() {
  bool ok = true;
  double worst = 0.0;
  std::string why;
  for (int rep = 0; rep < 50; ++rep) {
    Rng rng(500 + rep);
    const Index n = 20 + static_cast<Index>(rand_index(rng, 181));
    DynamicGraph g = gen_random_graph(n, 4 * n, 500 + rep);
    RunConfig cfg;
    cfg.d = 8;
    cfg.alpha = 0.3;
    cfg.eps = 1e-5;
    cfg.seed = 500 + rep;
    Engine eng(std::move(g), cfg);
    const double bound = cfg.eps * (1.0 + 1e-6);
    for (int t = 0; t < 30; ++t) {
      const Index nn = eng.graph().node_count();
      const double roll = rand_unit(rng);
      if (roll < 0.15) {
        std::vector<std::pair<Index, double>> in = {
            {static_cast<Index>(rand_index(rng, nn)), 1.0}};
        std::vector<std::pair<Index, double>> out = {
            {static_cast<Index>(rand_index(rng, nn)), 1.0}};
        eng.apply(GraphEvent::add_node(in, out));
      } else {
        Index u = static_cast<Index>(rand_index(rng, nn));
        Index v = static_cast<Index>(rand_index(rng, nn));
        if (u == v) continue;
        if (eng.graph().has_edge(u, v))
          eng.apply(GraphEvent::remove_edge(u, v));
        else
          eng.apply(GraphEvent::add_edge(u, v));
      }
      const double defect =
          dense_defect_bound(eng.graph(), eng.state(), eng.enhancer());
      worst = std::max(worst, defect);
      if (defect > bound) ok = false;
    }
  }

  // Fixed point of the 2-cycle with signal ((1),(0)).
  for (double eps : {1e-6, 1e-7}) {
    DynamicGraph g(2);
    g.apply_event(GraphEvent::add_edge(0, 1));
    g.apply_event(GraphEvent::add_edge(1, 0));
    DenseMatrix xb(2, 1), yb(2, 1);
    xb << 1.0, 0.0;
    yb << 1.0, 0.0;
    FactorState s(xb, yb, DenseMatrix::Identity(1, 1),
                  DenseMatrix::Identity(1, 1), Vector::Ones(1), 1);
    EnhancerState e = EnhancerState::init_propagate(g, s, {0.5, eps});
    const double d0 = std::abs(e.query_enhanced(s, 0)[0] - 2.0 / 3.0);
    const double d1 = std::abs(e.query_enhanced(s, 1)[0] - 1.0 / 3.0);
    if (d0 > eps || d1 > eps) {
      ok = false;
      why = fmt("; fixed point off by %.3g at eps %.0e", std::max(d0, d1),
                eps);
    }
  }
  report(4, "ppr correctness", ok,
         fmt("max scaled defect %.3g vs bound %.3g over 50 graphs x 30 "
             "events%s",
             worst, 1e-5 * (1.0 + 1e-6), why.c_str()));
}

// --- Criterion 5: paper metric reproduction --------------------------------

void criterion_paper_metrics() {
  const std::string wiki = std::string(DAMF_DATA_DIR) + "/wiki.txt";
  const std::string cora = std::string(DAMF_DATA_DIR) + "/cora.txt";
  if (!file_exists(wiki) || !file_exists(cora)) {
    report(5, "paper metric reproduction (Wiki/Cora)", false,
           "dataset files data/wiki.txt and data/cora.txt not present in "
           "this environment; see README for the download recipe");
    return;
  }
  bool ok = true;
  std::string detail;
  {
    DynamicGraph g = read_edge_list(wiki, false);
    RunConfig cfg;
    cfg.d = 128;
    cfg.alpha = 0.3;
    cfg.eps = 1e-5;
    cfg.seed = 1;
    EvalReport r = run_link_prediction(g, 0.3, cfg);
    const double a = r.metrics["auc"], p = r.metrics["ap"];
    ok = ok && a >= 0.70 && a <= 0.81 && p >= 0.73 && p <= 0.84;
    detail += fmt("wiki auc %.4f (want [0.70,0.81]) ap %.4f (want "
                  "[0.73,0.84]); ",
                  a, p);
    RunConfig cfg1 = cfg;
    cfg1.alpha = 1.0;
    EvalReport r1 = run_link_prediction(g, 0.3, cfg1);
    const double a1 = r1.metrics["auc"];
    ok = ok && a1 >= 0.61 && a1 <= 0.72;
    detail += fmt("wiki(alpha=1) auc %.4f (want [0.61,0.72]); ", a1);
  }
  {
    DynamicGraph g = read_edge_list(cora, true);
    RunConfig cfg;
    cfg.d = 128;
    cfg.alpha = 0.3;
    cfg.eps = 1e-5;
    cfg.seed = 1;
    cfg.undirected = true;
    EvalReport r = run_link_prediction(g, 0.3, cfg);
    ok = ok && r.metrics["auc"] >= 0.85;
    detail += fmt("cora auc %.4f (want >= 0.85)", r.metrics["auc"]);
  }
  report(5, "paper metric reproduction (Wiki/Cora)", ok, detail);
}

// --- Criterion 6: scaling ---------------------------------------------------

void criterion_scaling() {
  EvalReport r32 = bench_update_latency({10000, 100000}, 32, 300, 2024);
  const double ratio = r32.metrics["mean_latency_ratio"];
  EvalReport r128 = bench_update_latency({100000}, 128, 60, 2025);
  const double big = r128.metrics["mean_ms_n100000"];
  report(6, "latency scaling", ratio < 2.0 && big < 50.0,
         fmt("mean ratio n=1e5/1e4 at d=32: %.2f (tol 2.0); per-event at "
             "n=1e5 d=128: %.2f ms (tol 50)",
             ratio, big));
}

// --- Criterion 7: lazy vs eager --------------------------------------------

void criterion_lazy_eager() {
  StreamCase sc = gen_mixed_stream(120, 100, 350, 500, 7777);
  DynamicGraph g = sc.g0;
  FactorState s = FactorState::init_from_graph(g, 16, 7777);

  // Eager mirror maintained straight from Eq.-(2)-style updates.
  DenseMatrix ex, ey;
  s.query_all(ex, ey);
  double worst = 0.0;
  for (const GraphEvent& ev : sc.events) {
    auto deltas = g.apply_event(ev);
    HandledEvent he = handle_event(s, deltas);
    for (const ProjectionUpdate& u : he.updates) {
      auto append_row = [](DenseMatrix& m) {
        m.conservativeResize(m.rows() + 1, m.cols());
        m.row(m.rows() - 1).setZero();
      };
      if (u.append_x >= 0) append_row(ex);
      if (u.append_y >= 0) append_row(ey);
      if (u.grow_x) {
        Vector gx = u.grow_x->to_dense();
        Vector gy = u.grow_y->to_dense();
        ex = (ex * u.F.topRows(ex.cols()) + gx * u.F.bottomRows(1)).eval();
        ey = (ey * u.G.topRows(ey.cols()) + gy * u.G.bottomRows(1)).eval();
      } else {
        ex = (ex * u.F).eval();
        ey = (ey * u.G).eval();
        for (Index t = 0; t < u.dX.nnz_rows(); ++t)
          ex.row(u.dX.idx[t]) += u.dX.vals.row(t);
        for (Index t = 0; t < u.dY.nnz_rows(); ++t)
          ey.row(u.dY.idx[t]) += u.dY.vals.row(t);
      }
    }
    DenseMatrix lx, ly;
    s.query_all(lx, ly);
    worst = std::max(worst, (lx - ex).norm() / std::max(1.0, ex.norm()));
    worst = std::max(worst, (ly - ey).norm() / std::max(1.0, ey.norm()));
  }

  DenseMatrix x0, y0, x1, y1;
  s.query_all(x0, y0);
  s.rebase();
  s.query_all(x1, y1);
  const double rb = std::max((x1 - x0).norm() / std::max(1.0, x0.norm()),
                             (y1 - y0).norm() / std::max(1.0, y0.norm()));
  report(7, "lazy vs eager maintenance", worst <= 1e-8 && rb <= 1e-9,
         fmt("max eager/lazy divergence %.3g (tol 1e-8) over 500 events; "
             "rebase transparency %.3g (tol 1e-9)",
             worst, rb));
}

// --- Criterion 8: graph reconstruction sanity -------------------------------

void criterion_reconstruction() {
  bool ok = true;
  std::string detail;
  {
    DynamicGraph g = gen_random_graph(40, 60, 4242);
    RunConfig cfg;
    cfg.d = 40;  // >= rank(A)
    cfg.alpha = 1.0;
    cfg.seed = 4242;
    std::vector<Index> ks;
    for (Index k = 1; k <= 60; ++k) ks.push_back(k);
    EvalReport r = run_graph_reconstruction(g, cfg, 1.0, ks);
    double mn = 1.0;
    for (Index k = 1; k <= 60; ++k) mn = std::min(mn, r.precision_at[k]);
    ok = ok && mn == 1.0;
    detail += fmt("full-rank toy: min precision@K<=m = %.3f (want 1.0); ", mn);
  }
  const std::string wiki = std::string(DAMF_DATA_DIR) + "/wiki.txt";
  if (!file_exists(wiki)) {
    report(8, "graph reconstruction sanity", false,
           detail + "wiki part blocked: data/wiki.txt not present; see "
                    "README");
    return;
  }
  DynamicGraph g = read_edge_list(wiki, false);
  RunConfig cfg;
  cfg.d = 128;
  cfg.alpha = 0.3;
  cfg.eps = 1e-5;
  cfg.seed = 2;
  EvalReport r = run_graph_reconstruction(g, cfg, 1.0, {1000});
  const double n = double(g.node_count());
  const double m = double(g.arc_count());
  const double baseline = m / (n * (n - 1.0));
  ok = ok && r.precision_at[1000] >= 10.0 * baseline;
  detail += fmt("wiki precision@1e3 %.4f vs random %.6f (want >= 10x)",
                r.precision_at[1000], baseline);
  report(8, "graph reconstruction sanity", ok, detail);
}

}  // namespace

int main() {
  criteria_oracle_and_sparsity();
  criterion_kernels();
  criterion_ppr();
  criterion_paper_metrics();
  criterion_scaling();
  criterion_lazy_eager();
  criterion_reconstruction();
  std::printf("%d criteria failed\n", g_failures);
  return g_failures > 0 ? 1 : 0;
}
