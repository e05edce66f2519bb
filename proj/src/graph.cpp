#include "damf/graph.hpp"

#include <algorithm>
#include <string>

namespace damf {

namespace {

std::uint64_t edge_key(Index u, Index v) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

}  // namespace

DynamicGraph::DynamicGraph(Index n, bool undirected)
    : undirected_(undirected),
      out_adj_(n),
      in_adj_(n),
      out_deg_(n, 0.0) {}

void DynamicGraph::check_node(Index u, const char* who) const {
  if (u < 0 || u >= node_count())
    throw Error(Error::Kind::UnknownNode,
                std::string(who) + ": unknown node " + std::to_string(u));
}

double DynamicGraph::out_degree(Index u) const {
  check_node(u, "out_degree");
  return out_deg_[u];
}

const std::vector<std::pair<Index, double>>& DynamicGraph::out_neighbors(
    Index u) const {
  check_node(u, "out_neighbors");
  return out_adj_[u];
}

const std::vector<std::pair<Index, double>>& DynamicGraph::in_neighbors(
    Index u) const {
  check_node(u, "in_neighbors");
  return in_adj_[u];
}

bool DynamicGraph::has_edge(Index u, Index v) const {
  return edge_keys_.count(edge_key(u, v)) != 0;
}

double DynamicGraph::edge_weight(Index u, Index v) const {
  if (!has_edge(u, v)) return 0.0;
  for (const auto& [t, w] : out_adj_[u])
    if (t == v) return w;
  return 0.0;
}

void DynamicGraph::insert_arc(Index u, Index v, double w) {
  out_adj_[u].emplace_back(v, w);
  in_adj_[v].emplace_back(u, w);
  out_deg_[u] += w;
  edge_keys_.insert(edge_key(u, v));
  ++arcs_;
}

void DynamicGraph::erase_arc(Index u, Index v) {
  auto& out = out_adj_[u];
  auto it = std::find_if(out.begin(), out.end(),
                         [v](const auto& e) { return e.first == v; });
  out_deg_[u] -= it->second;
  out.erase(it);
  auto& in = in_adj_[v];
  in.erase(std::find_if(in.begin(), in.end(),
                        [u](const auto& e) { return e.first == u; }));
  edge_keys_.erase(edge_key(u, v));
  --arcs_;
}

void DynamicGraph::add_arc_raw(Index u, Index v, double w) {
  check_node(u, "add_arc_raw");
  check_node(v, "add_arc_raw");
  insert_arc(u, v, w);
}

std::vector<DeltaVectors> DynamicGraph::apply_event(const GraphEvent& e) {
  std::vector<DeltaVectors> deltas;
  switch (e.kind) {
    case GraphEvent::Kind::AddEdge: {
      check_node(e.u, "AddEdge");
      check_node(e.v, "AddEdge");
      if (e.w <= 0.0)
        throw Error(Error::Kind::ParseError, "AddEdge: weight must be > 0");
      if (has_edge(e.u, e.v))
        throw Error(Error::Kind::DuplicateEdge,
                    "AddEdge: edge (" + std::to_string(e.u) + "," +
                        std::to_string(e.v) + ") already present");
      const Index dm = undirected_ && e.u != e.v ? 2 : 1;
      insert_arc(e.u, e.v, e.w);
      deltas.push_back({SparseVec::unit(node_count(), e.u),
                        SparseVec::unit(node_count(), e.v, e.w), dm,
                        DeltaVectors::Step::Edge});
      if (undirected_ && e.u != e.v) {
        if (has_edge(e.v, e.u))
          throw Error(Error::Kind::DuplicateEdge,
                      "AddEdge: reverse arc already present");
        insert_arc(e.v, e.u, e.w);
        deltas.push_back({SparseVec::unit(node_count(), e.v),
                          SparseVec::unit(node_count(), e.u, e.w), dm,
                          DeltaVectors::Step::Edge});
      }
      break;
    }
    case GraphEvent::Kind::RemoveEdge: {
      check_node(e.u, "RemoveEdge");
      check_node(e.v, "RemoveEdge");
      if (!has_edge(e.u, e.v))
        throw Error(Error::Kind::MissingEdge,
                    "RemoveEdge: edge (" + std::to_string(e.u) + "," +
                        std::to_string(e.v) + ") not present");
      const Index dm = undirected_ && e.u != e.v ? 2 : 1;
      const double w = edge_weight(e.u, e.v);
      erase_arc(e.u, e.v);
      deltas.push_back({SparseVec::unit(node_count(), e.u),
                        SparseVec::unit(node_count(), e.v, -w), dm,
                        DeltaVectors::Step::Edge});
      if (undirected_ && e.u != e.v) {
        const double wr = edge_weight(e.v, e.u);
        erase_arc(e.v, e.u);
        deltas.push_back({SparseVec::unit(node_count(), e.v),
                          SparseVec::unit(node_count(), e.u, -wr), dm,
                          DeltaVectors::Step::Edge});
      }
      break;
    }
    case GraphEvent::Kind::AddNode: {
      const Index old_n = node_count();
      std::vector<std::pair<Index, double>> in = e.in_edges;
      std::vector<std::pair<Index, double>> out = e.out_edges;
      if (undirected_) {
        // Neighbor set = union of both lists, mirrored.
        for (const auto& [t, w] : e.out_edges) in.emplace_back(t, w);
        out = in;
      }
      for (const auto& [s, w] : in) {
        check_node(s, "AddNode");
        if (w <= 0.0)
          throw Error(Error::Kind::ParseError, "AddNode: weight must be > 0");
      }
      for (const auto& [t, w] : out) {
        check_node(t, "AddNode");
        if (w <= 0.0)
          throw Error(Error::Kind::ParseError, "AddNode: weight must be > 0");
      }

      out_adj_.emplace_back();
      in_adj_.emplace_back();
      out_deg_.push_back(0.0);
      const Index dm = static_cast<Index>(in.size() + out.size());

      // Column delta over the old rows: the new node's in-edges.
      DeltaVectors col;
      col.b.size = old_n;
      col.delta_m = dm;
      col.step = DeltaVectors::Step::NodeColumn;
      std::vector<std::pair<Index, double>> sorted_in = in;
      std::sort(sorted_in.begin(), sorted_in.end());
      for (const auto& [s, w] : sorted_in) col.b.nz.emplace_back(s, w);

      // Row delta over the new n+1 columns: the new node's out-edges.
      DeltaVectors row;
      row.b.size = old_n + 1;
      row.delta_m = dm;
      row.step = DeltaVectors::Step::NodeRow;
      std::vector<std::pair<Index, double>> sorted_out = out;
      std::sort(sorted_out.begin(), sorted_out.end());
      for (const auto& [t, w] : sorted_out) row.b.nz.emplace_back(t, w);

      for (const auto& [s, w] : in) insert_arc(s, old_n, w);
      for (const auto& [t, w] : out) insert_arc(old_n, t, w);

      deltas.push_back(std::move(col));
      deltas.push_back(std::move(row));
      break;
    }
  }
  return deltas;
}

std::vector<Index> DynamicGraph::touched_by(const GraphEvent& e) const {
  std::vector<Index> touched;
  auto add = [&touched](Index u) {
    if (std::find(touched.begin(), touched.end(), u) == touched.end())
      touched.push_back(u);
  };
  switch (e.kind) {
    case GraphEvent::Kind::AddEdge:
    case GraphEvent::Kind::RemoveEdge:
      add(e.u);
      if (undirected_ && e.u != e.v) add(e.v);
      break;
    case GraphEvent::Kind::AddNode:
      for (const auto& [s, w] : e.in_edges) add(s);
      if (undirected_)
        for (const auto& [t, w] : e.out_edges) add(t);
      add(node_count());  // the node the event will create
      break;
  }
  return touched;
}

}  // namespace damf
