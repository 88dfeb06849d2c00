#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "subgraph_ot/graph.hpp"
#include "subgraph_ot/matcher.hpp"

namespace subgraph_ot {

// Line-oriented graph text format, version 1:
//
//   #version 1
//   #features vector:3          (or: #features intset)
//   node <id> <f1> <f2> <f3>    (intset: node <id> <i1> <i2> ...)
//   edge <id> <id>
//
// Blank lines and other lines starting with '#' are ignored. Edges are
// undirected; `edge a b` and `edge b a` are duplicates. Numbers always use
// '.' as the decimal separator.
Graph parse_graph(std::string_view text);
Graph load_graph(const std::filesystem::path& path);

void write_graph(std::ostream& out, const Graph& graph);
void save_graph(const Graph& graph, const std::filesystem::path& path);

// JSON document with matched nodes, mapping pairs, objective, iteration
// count, convergence flag, candidate counts and elapsed time. The plan is
// not stored.
void write_result(std::ostream& out, const MatchResult& result);
void save_result(const MatchResult& result, const std::filesystem::path& path);

// Reads back what save_result wrote; `plan` is left empty.
MatchResult load_result(const std::filesystem::path& path);

}  // namespace subgraph_ot
