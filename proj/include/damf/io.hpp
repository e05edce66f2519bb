#pragma once

#include <string>
#include <vector>

#include "damf/engine.hpp"
#include "damf/graph.hpp"

namespace damf {

// Whitespace-separated `u v [w]` lines, `#` comments, 0-based integer ids.
// Nodes are 0..max id. Duplicate arcs collapse (first weight wins); in
// undirected mode each line installs both arcs.
DynamicGraph read_edge_list(const std::string& path, bool undirected);

struct ParsedEvent {
  GraphEvent event;
  int line = 0;
};

// Event lines: `E u v [w]`, `D u v`, `N id s:a,b,.. t:c,d,..` (either list
// may be empty, e.g. `s:`). AddNode ids must arrive densely; that is checked
// against the engine at apply time.
std::vector<ParsedEvent> read_events(const std::string& path);

// Versioned binary state: magic "DAMF", format version, little-endian 64-bit
// floats; config, graph arcs, factor state, enhancer state.
void save_state(const std::string& path, const Engine& engine);
Engine load_state(const std::string& path);

// Text export: header `n k`, then per node: id, k context values, k content
// values, 17 significant digits. `enhanced` replaces the context half by Z.
void export_embeddings(const std::string& path, const Engine& engine,
                       bool enhanced);

}  // namespace damf
