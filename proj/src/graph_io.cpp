#include "subgraph_ot/graph_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "subgraph_ot/error.hpp"

namespace subgraph_ot {
namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars rejects a leading '+'; accept it for hand-written files.
    if (first != last && *first == '+') ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& reason) {
  throw Error(code, "line " + std::to_string(line) + ": " + reason);
}

struct PendingEdge {
  std::string_view a, b;
  std::size_t line;
};

}  // namespace

Graph parse_graph(std::string_view text) {
  bool have_version = false;
  bool have_features = false;
  FeatureKind kind = FeatureKind::kRealVector;
  std::size_t dim = 0;

  std::vector<std::string> ids;
  std::vector<Feature> features;
  std::vector<PendingEdge> pending;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    const std::string_view head = tokens[0];

    if (head == "#version") {
      if (tokens.size() != 2 || tokens[1] != "1") fail(ErrorCode::kParseError, line_no, "unsupported version");
      have_version = true;
      continue;
    }
    if (head == "#features") {
      if (!have_version) fail(ErrorCode::kParseError, line_no, "#features before #version");
      if (have_features) fail(ErrorCode::kParseError, line_no, "feature kind declared twice");
      if (tokens.size() != 2) fail(ErrorCode::kParseError, line_no, "expected '#features vector:<dim>' or '#features intset'");
      if (tokens[1] == "intset") {
        kind = FeatureKind::kIntSet;
      } else if (tokens[1].starts_with("vector:") && parse_number(tokens[1].substr(7), dim) && dim > 0) {
        kind = FeatureKind::kRealVector;
      } else {
        fail(ErrorCode::kParseError, line_no, "bad feature declaration '" + std::string(tokens[1]) + "'");
      }
      have_features = true;
      continue;
    }
    if (head.starts_with('#')) continue;

    if (!have_version) fail(ErrorCode::kParseError, line_no, "missing '#version 1' header");
    if (head == "node") {
      if (!have_features) fail(ErrorCode::kParseError, line_no, "node record before #features");
      if (tokens.size() < 2) fail(ErrorCode::kParseError, line_no, "node record without id");
      const std::size_t payload = tokens.size() - 2;
      if (kind == FeatureKind::kRealVector) {
        if (payload != dim) {
          fail(ErrorCode::kFeatureKindMismatch, line_no,
               "expected " + std::to_string(dim) + " values, got " + std::to_string(payload));
        }
        RealVector f;
        for (std::size_t k = 2; k < tokens.size(); ++k) {
          double x = 0.0;
          if (!parse_number(tokens[k], x)) {
            fail(ErrorCode::kParseError, line_no, "bad number '" + std::string(tokens[k]) + "'");
          }
          f.values.push_back(x);
        }
        features.emplace_back(std::move(f));
      } else {
        std::vector<std::int64_t> values;
        for (std::size_t k = 2; k < tokens.size(); ++k) {
          std::int64_t x = 0;
          if (!parse_number(tokens[k], x)) {
            double d = 0.0;
            if (parse_number(tokens[k], d)) {
              fail(ErrorCode::kFeatureKindMismatch, line_no, "non-integer '" + std::string(tokens[k]) + "' in intset");
            }
            fail(ErrorCode::kParseError, line_no, "bad integer '" + std::string(tokens[k]) + "'");
          }
          values.push_back(x);
        }
        std::sort(values.begin(), values.end());
        if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
          fail(ErrorCode::kParseError, line_no, "duplicate value in intset");
        }
        features.emplace_back(IntSet{std::move(values)});
      }
      ids.emplace_back(tokens[1]);
      continue;
    }
    if (head == "edge") {
      if (tokens.size() != 3) fail(ErrorCode::kParseError, line_no, "edge record needs two ids");
      pending.push_back({tokens[1], tokens[2], line_no});
      continue;
    }
    fail(ErrorCode::kParseError, line_no, "unknown record '" + std::string(head) + "'");
  }
  if (!have_version) throw Error(ErrorCode::kParseError, "missing '#version 1' header");
  if (!have_features) throw Error(ErrorCode::kParseError, "missing '#features' declaration");

  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw Error(ErrorCode::kDuplicateNode, "node id '" + ids[i] + "' appears twice");
    }
  }
  std::vector<Edge> edges;
  std::set<Edge> seen;
  for (const auto& e : pending) {
    const auto ia = index.find(e.a);
    const auto ib = index.find(e.b);
    if (ia == index.end() || ib == index.end()) {
      fail(ErrorCode::kDanglingEdge, e.line,
           "edge references unknown node '" + std::string(ia == index.end() ? e.a : e.b) + "'");
    }
    const Edge key{std::min(ia->second, ib->second), std::max(ia->second, ib->second)};
    if (!seen.insert(key).second) fail(ErrorCode::kDuplicateEdge, e.line, "duplicate edge");
    edges.push_back(key);
  }
  Graph g(std::move(ids), std::move(features), edges);
  return g;
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

void write_graph(std::ostream& out, const Graph& graph) {
  out << "#version 1\n";
  if (graph.feature_kind() == FeatureKind::kIntSet && !graph.empty()) {
    out << "#features intset\n";
  } else {
    out << "#features vector:" << std::max<std::size_t>(graph.feature_dim(), 1) << '\n';
  }
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const std::string& id = graph.id(i);
    if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos || id.starts_with('#')) {
      throw Error(ErrorCode::kInvalidArgument, "node id '" + id + "' cannot be written");
    }
    out << "node " << id;
    if (const auto* v = std::get_if<RealVector>(&graph.feature(i))) {
      for (double x : v->values) out << ' ' << format_double(x);
    } else {
      for (std::int64_t x : std::get<IntSet>(graph.feature(i)).values) out << ' ' << x;
    }
    out << '\n';
  }
  for (const auto& [a, b] : graph.edges()) out << "edge " << graph.id(a) << ' ' << graph.id(b) << '\n';
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  write_graph(out, graph);
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path.string() + "' failed");
}

void write_result(std::ostream& out, const MatchResult& result) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["objective"] = result.objective;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["elapsed_seconds"] = result.elapsed_seconds;
  doc["matched_nodes"] = result.matched_nodes;
  auto& mapping = doc["mapping"] = nlohmann::ordered_json::array();
  for (const auto& [q, s] : result.mapping) mapping.push_back({{"query", q}, {"source", s}});
  doc["candidates"] = {{"generated", result.candidate_stats.generated},
                       {"filtered", result.candidate_stats.filtered},
                       {"solved", result.candidate_stats.solved}};
  out << doc.dump(2) << '\n';
}

void save_result(const MatchResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  write_result(out, result);
  if (!out) throw Error(ErrorCode::kIoError, "write to '" + path.string() + "' failed");
}

MatchResult load_result(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  MatchResult result;
  try {
    const auto doc = nlohmann::json::parse(in);
    result.objective = doc.at("objective").get<double>();
    result.iterations = doc.at("iterations").get<int>();
    result.converged = doc.at("converged").get<bool>();
    result.elapsed_seconds = doc.at("elapsed_seconds").get<double>();
    result.matched_nodes = doc.at("matched_nodes").get<std::vector<std::string>>();
    for (const auto& pair : doc.at("mapping")) {
      result.mapping.emplace_back(pair.at("query").get<std::string>(), pair.at("source").get<std::string>());
    }
    const auto& c = doc.at("candidates");
    result.candidate_stats = {c.at("generated").get<std::size_t>(), c.at("filtered").get<std::size_t>(),
                              c.at("solved").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, "result file '" + path.string() + "': " + e.what());
  }
  return result;
}

}  // namespace subgraph_ot
