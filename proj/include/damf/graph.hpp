#pragma once

#include <optional>
#include <unordered_set>
#include <vector>

#include "damf/types.hpp"

namespace damf {

// One change to the graph. For AddNode the edge lists refer to existing
// nodes; in undirected mode the union of both lists is treated as the
// neighbor set and installed as arcs in both directions.
struct GraphEvent {
  enum class Kind { AddNode, AddEdge, RemoveEdge };

  Kind kind = Kind::AddEdge;
  Index u = 0;  // AddEdge/RemoveEdge source
  Index v = 0;  // AddEdge/RemoveEdge target
  double w = 1.0;
  std::vector<std::pair<Index, double>> in_edges;   // AddNode: sources
  std::vector<std::pair<Index, double>> out_edges;  // AddNode: targets

  static GraphEvent add_edge(Index u, Index v, double w = 1.0) {
    GraphEvent e;
    e.kind = Kind::AddEdge;
    e.u = u;
    e.v = v;
    e.w = w;
    return e;
  }
  static GraphEvent remove_edge(Index u, Index v) {
    GraphEvent e;
    e.kind = Kind::RemoveEdge;
    e.u = u;
    e.v = v;
    return e;
  }
  static GraphEvent add_node(std::vector<std::pair<Index, double>> in_edges,
                             std::vector<std::pair<Index, double>> out_edges) {
    GraphEvent e;
    e.kind = Kind::AddNode;
    e.in_edges = std::move(in_edges);
    e.out_edges = std::move(out_edges);
    return e;
  }
};

// Sparse representation of one update step: column delta B, optional row
// delta C (edge change), and the event's edge-modification count.
struct DeltaVectors {
  enum class Step { NodeColumn, NodeRow, Edge };

  SparseVec b;
  std::optional<SparseVec> c;
  Index delta_m = 0;
  Step step = Step::Edge;
};

// Adjacency with mirrored out/in neighbor lists and out-degree weight sums.
// Undirected graphs are stored as two directed arcs.
class DynamicGraph {
 public:
  explicit DynamicGraph(Index n = 0, bool undirected = false);

  Index node_count() const { return static_cast<Index>(out_adj_.size()); }
  Index arc_count() const { return arcs_; }
  bool undirected() const { return undirected_; }

  double out_degree(Index u) const;
  const std::vector<std::pair<Index, double>>& out_neighbors(Index u) const;
  const std::vector<std::pair<Index, double>>& in_neighbors(Index u) const;
  bool has_edge(Index u, Index v) const;
  double edge_weight(Index u, Index v) const;  // 0 when absent

  // Mutates the graph and returns the delta sequence feeding the update
  // engine: AddNode -> [column delta, row delta]; edge change -> one
  // (B = e_u, C = +-w e_v) pair per stored arc.
  std::vector<DeltaVectors> apply_event(const GraphEvent& e);

  // Nodes whose out-neighborhood or out-degree the event changed, in the
  // order they were touched (the new node last for AddNode).
  std::vector<Index> touched_by(const GraphEvent& e) const;

  // Bulk construction helper; inserts arcs without emitting deltas.
  void add_arc_raw(Index u, Index v, double w);

 private:
  void check_node(Index u, const char* who) const;
  void insert_arc(Index u, Index v, double w);
  void erase_arc(Index u, Index v);

  bool undirected_ = false;
  Index arcs_ = 0;
  std::vector<std::vector<std::pair<Index, double>>> out_adj_;
  std::vector<std::vector<std::pair<Index, double>>> in_adj_;
  std::vector<double> out_deg_;
  std::unordered_set<std::uint64_t> edge_keys_;
};

inline std::vector<DeltaVectors> apply_event(DynamicGraph& g,
                                             const GraphEvent& e) {
  return g.apply_event(e);
}

}  // namespace damf
