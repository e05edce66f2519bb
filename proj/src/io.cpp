#include "damf/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace damf {

namespace {

constexpr char kMagic[4] = {'D', 'A', 'M', 'F'};
constexpr std::uint32_t kVersion = 1;

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  throw Error(Error::Kind::ParseError,
              path + ":" + std::to_string(line) + ": " + what);
}

bool blank_or_comment(const std::string& s) {
  for (char c : s) {
    if (c == '#') return true;
    if (!isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

void write_bytes(std::ofstream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw Error(Error::Kind::IoError, "state file truncated");
}

template <typename T>
void write_pod(std::ofstream& os, T v) {
  write_bytes(os, &v, sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is) {
  T v;
  read_bytes(is, &v, sizeof(T));
  return v;
}

void write_matrix(std::ofstream& os, const DenseMatrix& m) {
  write_pod<std::int64_t>(os, m.rows());
  write_pod<std::int64_t>(os, m.cols());
  if (m.size() > 0)
    write_bytes(os, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
}

DenseMatrix read_matrix(std::ifstream& is) {
  const auto rows = read_pod<std::int64_t>(is);
  const auto cols = read_pod<std::int64_t>(is);
  DenseMatrix m(rows, cols);
  if (m.size() > 0)
    read_bytes(is, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
  return m;
}

void write_vector(std::ofstream& os, const Vector& v) {
  write_pod<std::int64_t>(os, v.size());
  if (v.size() > 0)
    write_bytes(os, v.data(), sizeof(double) * static_cast<size_t>(v.size()));
}

Vector read_vector(std::ifstream& is) {
  const auto n = read_pod<std::int64_t>(is);
  Vector v(n);
  if (n > 0) read_bytes(is, v.data(), sizeof(double) * static_cast<size_t>(n));
  return v;
}

}  // namespace

DynamicGraph read_edge_list(const std::string& path, bool undirected) {
  std::ifstream is(path);
  if (!is) throw Error(Error::Kind::IoError, "cannot open " + path);

  struct Arc {
    Index u, v;
    double w;
  };
  std::vector<Arc> arcs;
  Index max_id = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ls(line);
    long long u, v;
    double w = 1.0;
    if (!(ls >> u >> v)) parse_fail(path, lineno, "expected `u v [w]`");
    ls >> w;
    std::string trailing;
    if (ls >> trailing) parse_fail(path, lineno, "trailing tokens");
    if (u < 0 || v < 0) parse_fail(path, lineno, "negative node id");
    if (w <= 0.0) parse_fail(path, lineno, "non-positive weight");
    arcs.push_back({static_cast<Index>(u), static_cast<Index>(v), w});
    max_id = std::max<Index>(max_id, std::max<Index>(u, v));
  }

  DynamicGraph g(max_id + 1, undirected);
  for (const Arc& a : arcs) {
    if (g.has_edge(a.u, a.v)) continue;
    g.add_arc_raw(a.u, a.v, a.w);
    if (undirected && a.u != a.v && !g.has_edge(a.v, a.u))
      g.add_arc_raw(a.v, a.u, a.w);
  }
  return g;
}

std::vector<ParsedEvent> read_events(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Error::Kind::IoError, "cannot open " + path);

  auto parse_id_list = [&](const std::string& tok, const std::string& prefix,
                           int lineno) {
    std::vector<std::pair<Index, double>> out;
    if (tok.rfind(prefix, 0) != 0)
      parse_fail(path, lineno, "expected `" + prefix + "...` list");
    std::string rest = tok.substr(prefix.size());
    if (rest.empty()) return out;
    std::istringstream ls(rest);
    std::string item;
    while (std::getline(ls, item, ',')) {
      if (item.empty()) parse_fail(path, lineno, "empty id in list");
      char* end = nullptr;
      long long id = std::strtoll(item.c_str(), &end, 10);
      if (end == item.c_str() || *end != '\0' || id < 0)
        parse_fail(path, lineno, "bad id `" + item + "`");
      out.emplace_back(static_cast<Index>(id), 1.0);
    }
    return out;
  };

  std::vector<ParsedEvent> events;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    if (op == "E" || op == "D") {
      long long u, v;
      if (!(ls >> u >> v) || u < 0 || v < 0)
        parse_fail(path, lineno, "expected `" + op + " u v`");
      double w = 1.0;
      if (op == "E") ls >> w;
      GraphEvent ev = op == "E"
                          ? GraphEvent::add_edge(static_cast<Index>(u),
                                                 static_cast<Index>(v), w)
                          : GraphEvent::remove_edge(static_cast<Index>(u),
                                                    static_cast<Index>(v));
      events.push_back({std::move(ev), lineno});
    } else if (op == "N") {
      long long id;
      if (!(ls >> id) || id < 0) parse_fail(path, lineno, "expected `N id`");
      std::string stok, ttok;
      if (!(ls >> stok >> ttok))
        parse_fail(path, lineno, "expected `N id s:... t:...`");
      GraphEvent ev = GraphEvent::add_node(parse_id_list(stok, "s:", lineno),
                                           parse_id_list(ttok, "t:", lineno));
      ev.u = static_cast<Index>(id);  // declared id, verified at apply time
      events.push_back({std::move(ev), lineno});
    } else {
      parse_fail(path, lineno, "unknown op `" + op + "`");
    }
  }
  return events;
}

void save_state(const std::string& path, const Engine& engine) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Error::Kind::IoError, "cannot write " + path);
  write_bytes(os, kMagic, 4);
  write_pod<std::uint32_t>(os, kVersion);

  const RunConfig& cfg = engine.config();
  write_pod<std::int64_t>(os, cfg.d);
  write_pod<double>(os, cfg.alpha);
  write_pod<double>(os, cfg.eps);
  write_pod<std::uint64_t>(os, cfg.seed);
  write_pod<double>(os, cfg.rebase_cond);
  write_pod<std::int64_t>(os, cfg.rebase_every);
  write_pod<std::uint8_t>(os, cfg.undirected ? 1 : 0);
  write_pod<std::uint64_t>(os, engine.events_applied());
  write_pod<std::int64_t>(os, engine.events_since_rebase());

  const FactorState& fs = engine.state();
  write_vector(os, fs.sigma());
  write_matrix(os, fs.xb());
  write_matrix(os, fs.yb());
  write_matrix(os, fs.px());
  write_matrix(os, fs.py());
  write_matrix(os, engine.enhancer().zb());
  write_matrix(os, engine.enhancer().rb());

  const DynamicGraph& g = engine.graph();
  write_pod<std::int64_t>(os, g.node_count());
  for (Index u = 0; u < g.node_count(); ++u) {
    const auto& nbrs = g.out_neighbors(u);
    write_pod<std::int64_t>(os, static_cast<std::int64_t>(nbrs.size()));
    for (const auto& [v, w] : nbrs) {
      write_pod<std::int64_t>(os, v);
      write_pod<double>(os, w);
    }
  }
  if (!os) throw Error(Error::Kind::IoError, "write failed: " + path);
}

Engine load_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Error::Kind::IoError, "cannot open " + path);
  char magic[4];
  read_bytes(is, magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw Error(Error::Kind::ParseError, path + ": not a DAMF state file");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion)
    throw Error(Error::Kind::ParseError,
                path + ": unsupported version " + std::to_string(version));

  RunConfig cfg;
  cfg.d = read_pod<std::int64_t>(is);
  cfg.alpha = read_pod<double>(is);
  cfg.eps = read_pod<double>(is);
  cfg.seed = read_pod<std::uint64_t>(is);
  cfg.rebase_cond = read_pod<double>(is);
  cfg.rebase_every = read_pod<std::int64_t>(is);
  cfg.undirected = read_pod<std::uint8_t>(is) != 0;
  const auto events_applied = read_pod<std::uint64_t>(is);
  const auto since_rebase = read_pod<std::int64_t>(is);

  Vector sigma = read_vector(is);
  DenseMatrix xb = read_matrix(is);
  DenseMatrix yb = read_matrix(is);
  DenseMatrix px = read_matrix(is);
  DenseMatrix py = read_matrix(is);
  DenseMatrix zb = read_matrix(is);
  DenseMatrix rb = read_matrix(is);

  const auto n = read_pod<std::int64_t>(is);
  DynamicGraph g(n, cfg.undirected);
  for (Index u = 0; u < n; ++u) {
    const auto cnt = read_pod<std::int64_t>(is);
    for (std::int64_t i = 0; i < cnt; ++i) {
      const auto v = read_pod<std::int64_t>(is);
      const double w = read_pod<double>(is);
      g.add_arc_raw(u, v, w);
    }
  }

  FactorState fs(std::move(xb), std::move(yb), std::move(px), std::move(py),
                 std::move(sigma), cfg.d);
  EnhancerState es(EnhancerParams{cfg.alpha, cfg.eps}, std::move(zb),
                   std::move(rb));
  return Engine(std::move(g), std::move(fs), std::move(es), cfg,
                events_applied, since_rebase);
}

void export_embeddings(const std::string& path, const Engine& engine,
                       bool enhanced) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error(Error::Kind::IoError, "cannot write " + path);
  const FactorState& fs = engine.state();
  const Index n = fs.rows_x();
  const Index k = fs.rank();
  std::fprintf(f, "%" PRId64 " %" PRId64 "\n", static_cast<std::int64_t>(n),
               static_cast<std::int64_t>(k));
  for (Index u = 0; u < n; ++u) {
    Vector x = enhanced ? engine.enhanced(u) : engine.context(u);
    Vector y = engine.content(u);
    std::fprintf(f, "%" PRId64, static_cast<std::int64_t>(u));
    for (Index j = 0; j < k; ++j) std::fprintf(f, " %.17g", x[j]);
    for (Index j = 0; j < k; ++j) std::fprintf(f, " %.17g", y[j]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0)
    throw Error(Error::Kind::IoError, "write failed: " + path);
}

}  // namespace damf
