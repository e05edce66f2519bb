// Command-line front end: dataset ingestion, event streaming, embedding
// export, evaluation, and latency benchmarks.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "damf/eval.hpp"
#include "damf/io.hpp"

namespace {

using namespace damf;

int error_exit_code(Error::Kind k) {
  switch (k) {
    case Error::Kind::ZeroMatrix:
    case Error::Kind::NonFinite:
    case Error::Kind::SingularProjection:
    case Error::Kind::NonConvergence:
    case Error::Kind::DegenerateLabels:
      return 3;  // numerical
    default:
      return 2;  // input / parse
  }
}

struct CommonOpts {
  RunConfig cfg;
  void attach(CLI::App* app) {
    app->add_option("--dim", cfg.d, "embedding dimension")->check(CLI::PositiveNumber);
    app->add_option("--alpha", cfg.alpha, "PPR damping factor in (0,1]")
        ->check(CLI::Range(1e-9, 1.0));
    app->add_option("--eps", cfg.eps, "PPR error tolerance")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", cfg.seed, "RNG seed");
    app->add_option("--rebase-cond", cfg.rebase_cond,
                    "condition-number rebase threshold");
    app->add_flag("--undirected", cfg.undirected,
                  "treat edges as undirected");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"damf: streaming dynamic network embedding"};
  app.require_subcommand(1);

  CommonOpts common;

  // init
  std::string init_edges, init_state;
  auto* cmd_init = app.add_subcommand("init", "build a state from an edge list");
  cmd_init->add_option("edge_list", init_edges)->required();
  cmd_init->add_option("--state", init_state, "output state file")->required();
  common.attach(cmd_init);

  // stream
  std::string stream_events, stream_state, stream_latency;
  auto* cmd_stream =
      app.add_subcommand("stream", "apply an event file to a state");
  cmd_stream->add_option("events", stream_events)->required();
  cmd_stream->add_option("--state", stream_state)->required();
  cmd_stream->add_option("--latency-log", stream_latency,
                         "write per-event latency (ms) lines here");

  // export
  std::string export_state, export_out;
  bool export_enhanced = false;
  auto* cmd_export = app.add_subcommand("export", "write embeddings as text");
  cmd_export->add_option("--state", export_state)->required();
  cmd_export->add_option("--out", export_out)->required();
  cmd_export->add_flag("--enhanced", export_enhanced,
                       "export Z instead of X for the context half");

  // query
  std::string query_state;
  std::int64_t query_node = 0;
  bool query_enhanced = false;
  auto* cmd_query = app.add_subcommand("query", "print one node's vectors");
  cmd_query->add_option("--state", query_state)->required();
  cmd_query->add_option("node", query_node)->required();
  cmd_query->add_flag("--enhanced", query_enhanced);

  // eval
  std::string eval_task, eval_dataset, eval_csv;
  double eval_removal = 0.3, eval_sample = 1.0;
  std::vector<std::int64_t> eval_ks = {10, 100, 1000, 10000, 100000, 1000000};
  auto* cmd_eval = app.add_subcommand("eval", "run an evaluation protocol");
  cmd_eval->add_option("task", eval_task, "lp | gr")->required();
  cmd_eval->add_option("dataset", eval_dataset, "edge-list file")->required();
  cmd_eval->add_option("--removal-ratio", eval_removal);
  cmd_eval->add_option("--sample-fraction", eval_sample);
  cmd_eval->add_option("--ks", eval_ks, "precision@K cut points");
  cmd_eval->add_option("--csv", eval_csv, "write precision rows as CSV");
  common.attach(cmd_eval);

  // bench
  std::vector<std::int64_t> bench_ns = {10000, 100000};
  std::int64_t bench_events = 200;
  auto* cmd_bench = app.add_subcommand("bench", "per-event latency benchmark");
  cmd_bench->add_option("--n", bench_ns, "graph sizes");
  cmd_bench->add_option("--events", bench_events, "events per size");
  common.attach(cmd_bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 4;
  }

  try {
    if (cmd_init->parsed()) {
      DynamicGraph g = read_edge_list(init_edges, common.cfg.undirected);
      Engine eng(std::move(g), common.cfg);
      save_state(init_state, eng);
      std::printf("n=%lld k=%lld state=%s\n",
                  static_cast<long long>(eng.graph().node_count()),
                  static_cast<long long>(eng.state().rank()),
                  init_state.c_str());
    } else if (cmd_stream->parsed()) {
      Engine eng = load_state(stream_state);
      std::vector<ParsedEvent> events = read_events(stream_events);
      std::ofstream lat;
      if (!stream_latency.empty()) {
        lat.open(stream_latency, std::ios::trunc);
        if (!lat)
          throw Error(Error::Kind::IoError, "cannot write " + stream_latency);
      }
      double total = 0.0;
      for (const ParsedEvent& pe : events) {
        if (pe.event.kind == GraphEvent::Kind::AddNode &&
            pe.event.u != eng.graph().node_count())
          throw Error(Error::Kind::ParseError,
                      stream_events + ":" + std::to_string(pe.line) +
                          ": node id " + std::to_string(pe.event.u) +
                          " out of order (expected " +
                          std::to_string(eng.graph().node_count()) + ")");
        auto t0 = std::chrono::steady_clock::now();
        eng.apply(pe.event);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        total += ms;
        if (lat.is_open()) lat << ms << "\n";
      }
      save_state(stream_state, eng);
      std::printf("events=%zu total_ms=%.3f n=%lld k=%lld\n", events.size(),
                  total, static_cast<long long>(eng.graph().node_count()),
                  static_cast<long long>(eng.state().rank()));
    } else if (cmd_export->parsed()) {
      Engine eng = load_state(export_state);
      export_embeddings(export_out, eng, export_enhanced);
    } else if (cmd_query->parsed()) {
      Engine eng = load_state(query_state);
      Vector x = query_enhanced ? eng.enhanced(query_node)
                                : eng.context(query_node);
      Vector y = eng.content(query_node);
      std::printf("%lld", static_cast<long long>(query_node));
      for (Index j = 0; j < x.size(); ++j) std::printf(" %.17g", x[j]);
      for (Index j = 0; j < y.size(); ++j) std::printf(" %.17g", y[j]);
      std::printf("\n");
    } else if (cmd_eval->parsed()) {
      DynamicGraph g = read_edge_list(eval_dataset, common.cfg.undirected);
      EvalReport report;
      if (eval_task == "lp") {
        report = run_link_prediction(g, eval_removal, common.cfg);
      } else if (eval_task == "gr") {
        std::vector<Index> ks(eval_ks.begin(), eval_ks.end());
        report = run_graph_reconstruction(g, common.cfg, eval_sample, ks);
      } else {
        std::fprintf(stderr, "unknown eval task `%s` (want lp or gr)\n",
                     eval_task.c_str());
        return 4;
      }
      std::fputs(report.to_text().c_str(), stdout);
      if (!eval_csv.empty()) {
        std::ofstream os(eval_csv, std::ios::trunc);
        if (!os) throw Error(Error::Kind::IoError, "cannot write " + eval_csv);
        os << report.to_csv();
      }
    } else if (cmd_bench->parsed()) {
      std::vector<Index> ns(bench_ns.begin(), bench_ns.end());
      EvalReport report = bench_update_latency(ns, common.cfg.d, bench_events,
                                               common.cfg.seed);
      std::fputs(report.to_text().c_str(), stdout);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return error_exit_code(e.kind);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
