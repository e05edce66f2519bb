#include "damf/eval.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "damf/rng.hpp"

namespace damf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void fill_timing(EvalReport& r, std::vector<double> lat) {
  if (lat.empty()) return;
  r.total_s = std::accumulate(lat.begin(), lat.end(), 0.0) / 1e3;
  r.event_mean_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / lat.size();
  r.event_max_ms = *std::max_element(lat.begin(), lat.end());
  std::nth_element(lat.begin(), lat.begin() + lat.size() / 2, lat.end());
  r.event_median_ms = lat[lat.size() / 2];
}

std::vector<size_t> ranking(const std::vector<double>& scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&scores](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

void check_labels(const std::vector<double>& scores,
                  const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw Error(Error::Kind::DegenerateLabels,
                "metrics: scores/labels size mismatch");
  const long pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<long>(labels.size()))
    throw Error(Error::Kind::DegenerateLabels,
                "metrics: need at least one positive and one negative");
}

}  // namespace

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  os << "task=" << task << "\n";
  os << "d=" << config.d << " alpha=" << config.alpha << " eps=" << config.eps
     << " seed=" << config.seed << " undirected=" << (config.undirected ? 1 : 0)
     << "\n";
  for (const auto& [k, v] : metrics) os << k << "=" << v << "\n";
  for (const auto& [k, v] : precision_at)
    os << "precision@" << k << "=" << v << "\n";
  os << "event_mean_ms=" << event_mean_ms
     << " event_median_ms=" << event_median_ms
     << " event_max_ms=" << event_max_ms << " total_s=" << total_s << "\n";
  return os.str();
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "K,precision\n";
  for (const auto& [k, v] : precision_at) os << k << "," << v << "\n";
  return os.str();
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_labels(scores, labels);
  // Rank-sum with midranks for ties.
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&scores](size_t a, size_t b) {
    return scores[a] < scores[b];
  });
  double pos_ranksum = 0.0;
  size_t pos = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (double(i + 1) + double(j));  // 1-based
    for (size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) {
        pos_ranksum += midrank;
        ++pos;
      }
    i = j;
  }
  const double neg = double(scores.size() - pos);
  return (pos_ranksum - double(pos) * (double(pos) + 1.0) / 2.0) /
         (double(pos) * neg);
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
  check_labels(scores, labels);
  std::vector<size_t> order = ranking(scores);
  double hits = 0.0, ap = 0.0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      hits += 1.0;
      ap += hits / double(rank + 1);
    }
  }
  return ap / hits;
}

std::map<Index, double> precision_at_k(
    const std::vector<ScoredPair>& scored_pairs,
    const std::unordered_set<std::uint64_t>& edge_set,
    const std::vector<Index>& ks) {
  const Index n = static_cast<Index>(scored_pairs.size());
  for (Index k : ks)
    if (k > n)
      throw Error(Error::Kind::KTooLarge,
                  "precision_at_k: K=" + std::to_string(k) + " > " +
                      std::to_string(n) + " pairs");
  std::vector<size_t> order(scored_pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&scored_pairs](size_t a, size_t b) {
    if (scored_pairs[a].score != scored_pairs[b].score)
      return scored_pairs[a].score > scored_pairs[b].score;
    return a < b;
  });
  std::map<Index, double> out;
  Index hits = 0, seen = 0;
  auto next = ks;
  std::sort(next.begin(), next.end());
  size_t ki = 0;
  for (size_t t = 0; t < order.size() && ki < next.size(); ++t) {
    const ScoredPair& p = scored_pairs[order[t]];
    if (edge_set.count(pair_key(p.u, p.v))) ++hits;
    ++seen;
    while (ki < next.size() && next[ki] == seen) {
      out[next[ki]] = double(hits) / double(seen);
      ++ki;
    }
  }
  return out;
}

Engine stream_graph(const DynamicGraph& g_target, const RunConfig& cfg,
                    std::vector<double>* latencies) {
  const Index n = g_target.node_count();
  if (n < 2)
    throw Error(Error::Kind::GraphTooSmall, "stream_graph: graph too small");

  Index seed_n = std::min<Index>(100, (n + 9) / 10);
  seed_n = std::max<Index>(seed_n, 2);
  auto seed_arcs = [&](Index limit) {
    Index arcs = 0;
    for (Index u = 0; u < limit; ++u)
      for (const auto& [v, w] : g_target.out_neighbors(u))
        if (v < limit) ++arcs;
    return arcs;
  };
  while (seed_n < n && seed_arcs(seed_n) == 0) ++seed_n;
  if (seed_arcs(seed_n) == 0)
    throw Error(Error::Kind::GraphTooSmall,
                "stream_graph: no edges in seed subgraph");

  DynamicGraph g0(seed_n, cfg.undirected);
  for (Index u = 0; u < seed_n; ++u)
    for (const auto& [v, w] : g_target.out_neighbors(u))
      if (v < seed_n) g0.add_arc_raw(u, v, w);

  Engine eng(std::move(g0), cfg);
  for (Index u = seed_n; u < n; ++u) {
    GraphEvent ev;
    ev.kind = GraphEvent::Kind::AddNode;
    for (const auto& [s, w] : g_target.in_neighbors(u))
      if (s < u) ev.in_edges.emplace_back(s, w);
    if (!cfg.undirected) {
      for (const auto& [t, w] : g_target.out_neighbors(u))
        if (t < u) ev.out_edges.emplace_back(t, w);
    }
    auto t0 = Clock::now();
    eng.apply(ev);
    if (latencies) latencies->push_back(ms_since(t0));
  }
  return eng;
}

namespace {

// Canonical edge list of g: arcs for directed graphs, u < v pairs for
// undirected ones.
std::vector<std::pair<Index, Index>> edge_list(const DynamicGraph& g) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index u = 0; u < g.node_count(); ++u)
    for (const auto& [v, w] : g.out_neighbors(u)) {
      if (g.undirected() && v < u) continue;
      edges.emplace_back(u, v);
    }
  return edges;
}

double pair_score(const Engine& eng, Index u, Index v, bool enhanced) {
  double s = eng.score(u, v, enhanced);
  if (eng.config().undirected) s = std::max(s, eng.score(v, u, enhanced));
  return s;
}

}  // namespace

EvalReport run_link_prediction(const DynamicGraph& g, double removal_ratio,
                               const RunConfig& cfg) {
  const Index n = g.node_count();
  std::vector<std::pair<Index, Index>> edges = edge_list(g);
  const Index n_remove =
      static_cast<Index>(std::floor(removal_ratio * double(edges.size())));
  if (n < 4 || n_remove == 0 ||
      n_remove >= static_cast<Index>(edges.size()))
    throw Error(Error::Kind::GraphTooSmall,
                "run_link_prediction: graph too small for removal ratio");

  Rng rng(cfg.seed * 0x9e3779b97f4a7c15ull + 1);
  // Partial Fisher-Yates: the first n_remove entries become the test set.
  for (Index i = 0; i < n_remove; ++i) {
    const Index j =
        i + static_cast<Index>(rand_index(rng, edges.size() - i));
    std::swap(edges[i], edges[j]);
  }
  std::unordered_set<std::uint64_t> removed;
  for (Index i = 0; i < n_remove; ++i)
    removed.insert(pair_key(edges[i].first, edges[i].second));

  DynamicGraph gp(n, cfg.undirected);
  for (Index u = 0; u < n; ++u)
    for (const auto& [v, w] : g.out_neighbors(u)) {
      if (g.undirected() && v < u) continue;
      if (removed.count(pair_key(u, v))) continue;
      gp.add_arc_raw(u, v, w);
      if (g.undirected() && u != v) gp.add_arc_raw(v, u, w);
    }

  std::vector<double> latencies;
  Engine eng = stream_graph(gp, cfg, &latencies);

  // Negatives: uniform over unconnected pairs of g, one per removed edge.
  std::vector<std::pair<Index, Index>> negatives;
  std::unordered_set<std::uint64_t> taken;
  while (negatives.size() < static_cast<size_t>(n_remove)) {
    Index u = static_cast<Index>(rand_index(rng, n));
    Index v = static_cast<Index>(rand_index(rng, n));
    if (u == v) continue;
    if (cfg.undirected && u > v) std::swap(u, v);
    const std::uint64_t key = pair_key(u, v);
    if (taken.count(key)) continue;
    if (g.has_edge(u, v) || (cfg.undirected && g.has_edge(v, u))) continue;
    taken.insert(key);
    negatives.emplace_back(u, v);
  }

  const bool enhanced = true;
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(2 * n_remove);
  for (Index i = 0; i < n_remove; ++i) {
    scores.push_back(pair_score(eng, edges[i].first, edges[i].second, enhanced));
    labels.push_back(1);
  }
  for (const auto& [u, v] : negatives) {
    scores.push_back(pair_score(eng, u, v, enhanced));
    labels.push_back(0);
  }

  EvalReport r;
  r.task = "link_prediction";
  r.config = cfg;
  r.metrics["auc"] = auc(scores, labels);
  r.metrics["ap"] = average_precision(scores, labels);
  r.metrics["test_edges"] = double(n_remove);
  fill_timing(r, latencies);
  return r;
}

EvalReport run_graph_reconstruction(const DynamicGraph& g,
                                    const RunConfig& cfg,
                                    double sample_fraction,
                                    const std::vector<Index>& ks) {
  const Index n = g.node_count();
  if (n < 3)
    throw Error(Error::Kind::GraphTooSmall, "run_graph_reconstruction");

  std::vector<double> latencies;
  Engine eng = stream_graph(g, cfg, &latencies);

  std::unordered_set<std::uint64_t> edge_set;
  for (Index u = 0; u < n; ++u)
    for (const auto& [v, w] : g.out_neighbors(u)) {
      if (g.undirected() && v < u) continue;
      edge_set.insert(pair_key(u, v));
    }

  const bool undirected = cfg.undirected;
  const std::uint64_t all_pairs =
      undirected ? std::uint64_t(n) * (n - 1) / 2 : std::uint64_t(n) * (n - 1);
  std::uint64_t s_size = all_pairs;
  std::vector<std::pair<Index, Index>> sampled;
  if (sample_fraction < 1.0) {
    s_size = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(sample_fraction * double(all_pairs)));
    Rng rng(cfg.seed * 0x2545f4914f6cdd1dull + 7);
    std::unordered_set<std::uint64_t> seen;
    while (sampled.size() < s_size) {
      Index u = static_cast<Index>(rand_index(rng, n));
      Index v = static_cast<Index>(rand_index(rng, n));
      if (u == v) continue;
      if (undirected && u > v) std::swap(u, v);
      if (!seen.insert(pair_key(u, v)).second) continue;
      sampled.emplace_back(u, v);
    }
  }

  std::vector<Index> k_clipped;
  for (Index k : ks)
    k_clipped.push_back(
        std::min<Index>(k, static_cast<Index>(s_size)));
  const Index max_k =
      *std::max_element(k_clipped.begin(), k_clipped.end());

  // Keep the top max_k pairs with a min-heap; full materialization of all
  // n^2 scores is avoided. Tie order matches (score desc, pair index asc).
  struct HeapEntry {
    double score;
    std::uint64_t index;
    Index u, v;
  };
  auto worse = [](const HeapEntry& a, const HeapEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  };
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(worse)>
      heap(worse);

  std::uint64_t index = 0;
  auto offer = [&](Index u, Index v) {
    const double s = pair_score(eng, u, v, true);
    if (static_cast<Index>(heap.size()) < max_k) {
      heap.push({s, index, u, v});
    } else if (!heap.empty() &&
               (s > heap.top().score ||
                (s == heap.top().score && index < heap.top().index))) {
      heap.pop();
      heap.push({s, index, u, v});
    }
    ++index;
  };
  if (sample_fraction < 1.0) {
    for (const auto& [u, v] : sampled) offer(u, v);
  } else {
    for (Index u = 0; u < n; ++u)
      for (Index v = undirected ? u + 1 : 0; v < n; ++v)
        if (u != v) offer(u, v);
  }

  std::vector<HeapEntry> top;
  top.reserve(heap.size());
  while (!heap.empty()) {
    top.push_back(heap.top());
    heap.pop();
  }
  std::reverse(top.begin(), top.end());  // best first

  EvalReport r;
  r.task = "graph_reconstruction";
  r.config = cfg;
  Index hits = 0;
  size_t ti = 0;
  std::vector<Index> sorted_ks = k_clipped;
  std::sort(sorted_ks.begin(), sorted_ks.end());
  sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()),
                  sorted_ks.end());
  for (Index kk : sorted_ks) {
    while (ti < top.size() && static_cast<Index>(ti) < kk) {
      if (edge_set.count(pair_key(top[ti].u, top[ti].v))) ++hits;
      ++ti;
    }
    r.precision_at[kk] = double(hits) / double(kk);
  }
  r.metrics["pairs_scored"] = double(s_size);
  r.metrics["edges"] = double(edge_set.size());
  fill_timing(r, latencies);
  return r;
}

// ---------------------------------------------------------------------------
// Oracle recursion
// ---------------------------------------------------------------------------

namespace {

SvdTriple jacobi_svd(const DenseMatrix& m, Index keep) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index k = std::min<Index>(keep, s.size());
  while (k > 0 && s[k - 1] <= 0.0) --k;
  SvdTriple out;
  out.U = svd.matrixU().leftCols(k);
  out.sigma = s.head(k);
  out.V = svd.matrixV().leftCols(k);
  return out;
}

}  // namespace

OracleTsvd::OracleTsvd(const DynamicGraph& g0, Index d) : d_(d) {
  const Index n = g0.node_count();
  if (n > 500)
    throw Error(Error::Kind::TooLarge, "OracleTsvd: graph too large");
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (Index u = 0; u < n; ++u)
    for (const auto& [v, w] : g0.out_neighbors(u)) a(u, v) += w;
  SvdTriple svd = jacobi_svd(a, d);
  Index k = svd.rank();
  const double floor = k > 0 ? 1e-12 * svd.sigma[0] : 0.0;
  while (k > 0 && svd.sigma[k - 1] < floor) --k;
  u_ = svd.U.leftCols(k);
  sigma_ = svd.sigma.head(k);
  v_ = svd.V.leftCols(k);
}

void OracleTsvd::apply_deltas(const std::vector<DeltaVectors>& deltas) {
  gap_ok_ = true;
  for (const DeltaVectors& dv : deltas) {
    switch (dv.step) {
      case DeltaVectors::Step::Edge:
        step(dv.b, dv.c, false);
        break;
      case DeltaVectors::Step::NodeColumn:
        step(dv.b, std::nullopt, false);
        break;
      case DeltaVectors::Step::NodeRow:
        step(dv.b, std::nullopt, true);
        break;
    }
  }
}

void OracleTsvd::step(const SparseVec& b, const std::optional<SparseVec>& c,
                      bool swapped) {
  DenseMatrix& ub = swapped ? v_ : u_;
  DenseMatrix& vb = swapped ? u_ : v_;
  const Index k = sigma_.size();

  // Orthogonalize b against the U side, re-orthogonalizing once. Columns
  // within the recursion's in-span floor keep the rank, matching the
  // truncation rule of the tracked recursion.
  Vector bd = b.to_dense();
  Vector w = ub.transpose() * bd;
  Vector q = bd - ub * w;
  Vector w2 = ub.transpose() * q;
  q -= ub * w2;
  w += w2;
  double r = q.norm();
  const double tiny = 1e-6 * std::max(1.0, bd.norm());
  Vector qn = r > tiny ? Vector(q / r) : Vector(Vector::Zero(q.size()));
  if (r <= tiny) r = 0.0;

  DenseMatrix m;
  Vector cw;
  Vector cq;
  double rc = 0.0;
  if (c) {
    Vector cd = c->to_dense();
    cw = vb.transpose() * cd;
    cq = cd - vb * cw;
    Vector cw2 = vb.transpose() * cq;
    cq -= vb * cw2;
    cw += cw2;
    rc = cq.norm();
    const double tiny_c = 1e-6 * std::max(1.0, cd.norm());
    if (rc > tiny_c)
      cq /= rc;
    else {
      rc = 0.0;
      cq.setZero();
    }
    Vector wb(k + 1), wc(k + 1);
    wb.head(k) = w;
    wb[k] = r;
    wc.head(k) = cw;
    wc[k] = rc;
    m = DenseMatrix::Zero(k + 1, k + 1);
    for (Index i = 0; i < k; ++i) m(i, i) = sigma_[i];
    m += wb * wc.transpose();
  } else {
    m = DenseMatrix::Zero(k + 1, k + 1);
    for (Index i = 0; i < k; ++i) m(i, i) = sigma_[i];
    m.col(k).head(k) = w;
    m(k, k) = r;
  }

  SvdTriple small = jacobi_svd(m, k + 1);
  Index k2 = std::min<Index>(d_, small.rank());
  const double floor = small.rank() > 0 ? 1e-12 * small.sigma[0] : 0.0;
  while (k2 > 0 && small.sigma[k2 - 1] < floor) --k2;

  const double s1 = small.rank() > 0 ? small.sigma[0] : 0.0;
  const double skept = k2 > 0 ? small.sigma[k2 - 1] : 0.0;
  const double snext = k2 < small.rank() ? small.sigma[k2] : 0.0;
  if (!(skept - snext > 1e-6 * s1)) gap_ok_ = false;

  DenseMatrix uaug(ub.rows(), k + 1);
  uaug.leftCols(k) = ub;
  uaug.col(k) = qn;
  DenseMatrix u2 = uaug * small.U.leftCols(k2);

  DenseMatrix v2;
  if (c) {
    DenseMatrix vaug(vb.rows(), k + 1);
    vaug.leftCols(k) = vb;
    vaug.col(k) = cq;
    v2 = vaug * small.V.leftCols(k2);
  } else {
    // Row append: V2 = [Vb H_top; H_bot].
    v2.resize(vb.rows() + 1, k2);
    v2.topRows(vb.rows()) = vb * small.V.topRows(k).leftCols(k2);
    v2.row(vb.rows()) = small.V.row(k).head(k2);
  }

  ub = u2;
  vb = v2;
  sigma_ = small.sigma.head(k2);
}

DenseMatrix OracleTsvd::product() const {
  return u_ * sigma_.asDiagonal() * v_.transpose();
}

double OracleTsvd::product_rel_dist(const FactorState& s) const {
  DenseMatrix x, y;
  s.query_all(x, y);
  const double norm_o_sq = sigma_.squaredNorm();
  DenseMatrix xtx = x.transpose() * x;
  DenseMatrix yty = y.transpose() * y;
  const double norm_e_sq = (xtx * yty).trace();
  DenseMatrix xtu = x.transpose() * u_;   // k_e x k_o
  DenseMatrix vty = v_.transpose() * y;   // k_o x k_e
  const double cross = (xtu * sigma_.asDiagonal() * vty).trace();
  const double dist_sq = std::max(0.0, norm_e_sq - 2.0 * cross + norm_o_sq);
  if (norm_o_sq == 0.0) return std::sqrt(norm_e_sq);
  return std::sqrt(dist_sq / norm_o_sq);
}

double OracleTsvd::sigma_rel_dist(const Vector& engine_sigma) const {
  const Index k = std::max(engine_sigma.size(), sigma_.size());
  Vector a = Vector::Zero(k), b = Vector::Zero(k);
  a.head(engine_sigma.size()) = engine_sigma;
  b.head(sigma_.size()) = sigma_;
  const double denom = b.norm();
  return denom == 0.0 ? a.norm() : (a - b).norm() / denom;
}

DriftReport drift_report(const FactorState& s, const DynamicGraph& g) {
  const Index n = g.node_count();
  if (n > 500) throw Error(Error::Kind::TooLarge, "drift_report");
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (Index u = 0; u < n; ++u)
    for (const auto& [v, w] : g.out_neighbors(u)) a(u, v) += w;
  SvdTriple svd = jacobi_svd(a, s.dim());
  DenseMatrix best = svd.reconstruct();
  DenseMatrix x, y;
  s.query_all(x, y);
  DriftReport r;
  const double an = a.norm();
  r.drift = an == 0.0 ? 0.0 : (x * y.transpose() - best).norm() / an;
  for (Index u = 0; u < n; ++u) {
    const double c =
        g.out_degree(u) * x.row(u).lpNorm<Eigen::Infinity>();
    r.c_diag = std::max(r.c_diag, c);
  }
  return r;
}

double dense_defect_bound(const DynamicGraph& g, const FactorState& s,
                          const EnhancerState& e) {
  const Index n = g.node_count();
  const double alpha = e.alpha();
  DenseMatrix z = e.zb() * s.px();
  DenseMatrix x = s.xb() * s.px();
  double worst = 0.0;
  for (Index u = 0; u < n; ++u) {
    Eigen::RowVectorXd def = alpha * x.row(u) - z.row(u);
    const double deg = g.out_degree(u);
    if (deg > 0.0) {
      Eigen::RowVectorXd nb = Eigen::RowVectorXd::Zero(z.cols());
      for (const auto& [v, w] : g.out_neighbors(u)) nb += w * z.row(v);
      def += ((1.0 - alpha) / deg) * nb;
    }
    worst = std::max(
        worst, def.lpNorm<Eigen::Infinity>() / std::max(deg, 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Generators and benchmarks
// ---------------------------------------------------------------------------

DynamicGraph gen_random_graph(Index n, Index arcs, std::uint64_t seed,
                              bool undirected) {
  DynamicGraph g(n, undirected);
  Rng rng(seed);
  Index placed = 0;
  while (placed < arcs) {
    Index u = static_cast<Index>(rand_index(rng, n));
    Index v = static_cast<Index>(rand_index(rng, n));
    if (u == v) continue;
    if (g.has_edge(u, v) || (undirected && g.has_edge(v, u))) continue;
    g.add_arc_raw(u, v, 1.0);
    if (undirected) g.add_arc_raw(v, u, 1.0);
    ++placed;
  }
  return g;
}

DynamicGraph gen_sbm(Index n, double p_in, double p_out, std::uint64_t seed) {
  DynamicGraph g(n, true);
  Rng rng(seed);
  const Index half = n / 2;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v) {
      const bool same = (u < half) == (v < half);
      if (rand_unit(rng) < (same ? p_in : p_out)) {
        g.add_arc_raw(u, v, 1.0);
        g.add_arc_raw(v, u, 1.0);
      }
    }
  return g;
}

StreamCase gen_mixed_stream(Index n_total, Index n0, Index m0, Index n_events,
                            std::uint64_t seed) {
  StreamCase sc{gen_random_graph(n0, m0, seed), {}};
  DynamicGraph mirror = sc.g0;  // tracks state while generating
  Rng rng(seed ^ 0xabcdef1234567890ull);
  std::vector<std::pair<Index, Index>> arcs;
  for (Index u = 0; u < n0; ++u)
    for (const auto& [v, w] : mirror.out_neighbors(u)) arcs.emplace_back(u, v);

  for (Index t = 0; t < n_events; ++t) {
    const Index remaining = n_events - t;
    const bool add_node =
        mirror.node_count() < n_total &&
        rand_index(rng, remaining) <
            static_cast<std::uint64_t>(n_total - mirror.node_count());
    GraphEvent ev;
    if (add_node) {
      ev.kind = GraphEvent::Kind::AddNode;
      const Index n = mirror.node_count();
      const Index fan_in = 1 + static_cast<Index>(rand_index(rng, 3));
      const Index fan_out = static_cast<Index>(rand_index(rng, 3));
      std::unordered_set<std::uint64_t> used;
      for (Index i = 0; i < fan_in; ++i) {
        Index s = static_cast<Index>(rand_index(rng, n));
        if (!used.insert(s).second) continue;
        ev.in_edges.emplace_back(s, 1.0);
        arcs.emplace_back(s, n);
      }
      used.clear();
      for (Index i = 0; i < fan_out; ++i) {
        Index d2 = static_cast<Index>(rand_index(rng, n));
        if (!used.insert(d2).second) continue;
        ev.out_edges.emplace_back(d2, 1.0);
        arcs.emplace_back(n, d2);
      }
    } else if (!arcs.empty() && rand_unit(rng) < 0.3) {
      const size_t pick = rand_index(rng, arcs.size());
      ev = GraphEvent::remove_edge(arcs[pick].first, arcs[pick].second);
      arcs[pick] = arcs.back();
      arcs.pop_back();
      if (arcs.empty()) {  // keep at least one edge alive
        ev = GraphEvent::add_edge(0, 1, 1.0);
      }
    } else {
      const Index n = mirror.node_count();
      Index u, v;
      do {
        u = static_cast<Index>(rand_index(rng, n));
        v = static_cast<Index>(rand_index(rng, n));
      } while (u == v || mirror.has_edge(u, v));
      ev = GraphEvent::add_edge(u, v, 1.0);
      arcs.emplace_back(u, v);
    }
    mirror.apply_event(ev);
    sc.events.push_back(std::move(ev));
  }
  return sc;
}

EvalReport bench_update_latency(const std::vector<Index>& n_values, Index d,
                                Index events_per_n, std::uint64_t seed) {
  EvalReport r;
  r.task = "bench_update_latency";
  r.config.d = d;
  r.config.seed = seed;
  double first_mean = 0.0, last_mean = 0.0;
  for (size_t i = 0; i < n_values.size(); ++i) {
    const Index n = n_values[i];
    DynamicGraph g = gen_random_graph(n, 8 * n, seed + i);
    RunConfig cfg;
    cfg.d = d;
    cfg.seed = seed + i;
    Engine eng(std::move(g), cfg);
    Rng rng(seed * 31 + i);
    std::vector<double> lat;
    lat.reserve(events_per_n);
    for (Index t = 0; t < events_per_n; ++t) {
      Index u, v;
      do {
        u = static_cast<Index>(rand_index(rng, n));
        v = static_cast<Index>(rand_index(rng, n));
      } while (u == v || eng.graph().has_edge(u, v));
      GraphEvent ev = GraphEvent::add_edge(u, v, 1.0);
      auto t0 = Clock::now();
      eng.apply(ev);
      lat.push_back(ms_since(t0));
    }
    const double mean =
        std::accumulate(lat.begin(), lat.end(), 0.0) / lat.size();
    std::nth_element(lat.begin(), lat.begin() + lat.size() / 2, lat.end());
    r.metrics["mean_ms_n" + std::to_string(n)] = mean;
    r.metrics["median_ms_n" + std::to_string(n)] = lat[lat.size() / 2];
    if (i == 0) first_mean = mean;
    last_mean = mean;
  }
  if (n_values.size() > 1 && first_mean > 0.0)
    r.metrics["mean_latency_ratio"] = last_mean / first_mean;
  return r;
}

}  // namespace damf
