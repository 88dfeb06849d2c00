#include "subgraph_ot/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "subgraph_ot/error.hpp"

namespace subgraph_ot {

IntSet make_int_set(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw Error(ErrorCode::kInvalidArgument, "integer-set feature contains duplicates");
  }
  return IntSet{std::move(values)};
}

FeatureKind kind_of(const Feature& f) {
  return std::holds_alternative<RealVector>(f) ? FeatureKind::kRealVector : FeatureKind::kIntSet;
}

Graph::Graph(std::vector<std::string> ids, std::vector<Feature> features,
             std::span<const Edge> edges)
    : ids_(std::move(ids)), features_(std::move(features)) {
  const std::size_t n = ids_.size();
  if (features_.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "feature count " + std::to_string(features_.size()) +
                                                 " does not match node count " + std::to_string(n));
  }
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::kDuplicateNode, "node id '" + ids_[i] + "' appears twice");
    }
  }

  if (n > 0) {
    kind_ = kind_of(features_[0]);
    if (kind_ == FeatureKind::kRealVector) dim_ = std::get<RealVector>(features_[0]).values.size();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (kind_of(features_[i]) != kind_) {
      throw Error(ErrorCode::kFeatureKindMismatch, "node '" + ids_[i] + "' has a different feature kind");
    }
    if (kind_ == FeatureKind::kRealVector) {
      if (std::get<RealVector>(features_[i]).values.size() != dim_) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "node '" + ids_[i] + "' feature dimension differs from " + std::to_string(dim_));
      }
    } else {
      const auto& v = std::get<IntSet>(features_[i]).values;
      if (!std::is_sorted(v.begin(), v.end()) || std::adjacent_find(v.begin(), v.end()) != v.end()) {
        throw Error(ErrorCode::kInvalidArgument, "node '" + ids_[i] + "' integer set is not canonical");
      }
    }
  }

  adj_.assign(n, {});
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw Error(ErrorCode::kDanglingEdge, "edge endpoint out of range");
    }
    adj_[a].push_back(b);
    if (a != b) adj_[b].push_back(a);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = adj_[i];
    std::sort(list.begin(), list.end());
    auto dup = std::adjacent_find(list.begin(), list.end());
    if (dup != list.end()) {
      throw Error(ErrorCode::kDuplicateEdge, "duplicate edge " + ids_[i] + " - " + ids_[*dup]);
    }
    for (std::size_t j : list) {
      if (j >= i) ++edge_count_;
    }
  }
}

std::optional<std::size_t> Graph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Graph::adjacent(std::size_t i, std::size_t j) const {
  const auto& list = adj_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < adj_.size(); ++i) {
    for (std::size_t j : adj_[i]) {
      if (j >= i) out.emplace_back(i, j);
    }
  }
  return out;
}

bool Graph::operator==(const Graph& other) const {
  return ids_ == other.ids_ && features_ == other.features_ && adj_ == other.adj_;
}

SubgraphView::SubgraphView(const Graph& parent, std::vector<std::size_t> members)
    : parent_(&parent), members_(std::move(members)) {
  std::vector<bool> seen(parent.size(), false);
  for (std::size_t idx : members_) {
    if (idx >= parent.size() || seen[idx]) {
      throw Error(ErrorCode::kInvalidArgument, "subgraph members must be distinct valid indices");
    }
    seen[idx] = true;
  }
}

Graph SubgraphView::materialize() const {
  const Graph& g = *parent_;
  std::vector<std::size_t> local(g.size(), std::numeric_limits<std::size_t>::max());
  std::vector<std::string> ids;
  std::vector<Feature> features;
  ids.reserve(members_.size());
  features.reserve(members_.size());
  for (std::size_t k = 0; k < members_.size(); ++k) {
    local[members_[k]] = k;
    ids.push_back(g.id(members_[k]));
    features.push_back(g.feature(members_[k]));
  }
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    for (std::size_t nb : g.neighbors(members_[k])) {
      std::size_t j = local[nb];
      if (j != std::numeric_limits<std::size_t>::max() && j >= k) edges.emplace_back(k, j);
    }
  }
  return Graph(std::move(ids), std::move(features), edges);
}

Eigen::MatrixXd structure_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j : g.neighbors(i)) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    }
  }
  return c;
}

Eigen::MatrixXd structure_matrix(const SubgraphView& view) {
  const auto members = view.members();
  const auto n = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      if (view.parent().adjacent(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)])) {
        c(a, b) = c(b, a) = 1.0;
      }
    }
  }
  return c;
}

std::vector<std::optional<std::size_t>> bfs_distances(const Graph& g, std::size_t source) {
  std::vector<std::optional<std::size_t>> dist(g.size());
  std::deque<std::size_t> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    std::size_t u = frontier.front();
    frontier.pop_front();
    for (std::size_t v : g.neighbors(u)) {
      if (!dist[v]) {
        dist[v] = *dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::size_t query_radius(const Graph& g) {
  if (g.empty()) throw Error(ErrorCode::kInvalidArgument, "radius of an empty graph");
  std::size_t radius = std::numeric_limits<std::size_t>::max();
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::size_t ecc = 0;
    for (const auto& d : bfs_distances(g, v)) {
      if (!d) throw Error(ErrorCode::kDisconnectedGraph, "graph is not connected");
      ecc = std::max(ecc, *d);
    }
    radius = std::min(radius, ecc);
  }
  return radius;
}

SubgraphView k_hop_neighborhood(const Graph& g, std::size_t center, std::size_t k) {
  if (center >= g.size()) throw Error(ErrorCode::kInvalidArgument, "center index out of range");
  // Level-synchronous BFS; each level sorted by parent index.
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> members{center};
  std::vector<std::size_t> level{center};
  seen[center] = true;
  for (std::size_t hop = 0; hop < k && !level.empty(); ++hop) {
    std::vector<std::size_t> next;
    for (std::size_t u : level) {
      for (std::size_t v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = true;
          next.push_back(v);
        }
      }
    }
    std::sort(next.begin(), next.end());
    members.insert(members.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return SubgraphView(g, std::move(members));
}

namespace {

double vector_cost(const RealVector& a, const RealVector& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sq += d * d;
  }
  return sq / (1.0 + sq);
}

double jaccard_cost(const IntSet& a, const IntSet& b) {
  if (a.values.empty() && b.values.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.values.begin();
  auto ib = b.values.begin();
  while (ia != a.values.end() && ib != b.values.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t united = a.values.size() + b.values.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(united);
}

}  // namespace

double feature_cost(const Feature& a, const Feature& b) {
  if (kind_of(a) != kind_of(b)) throw Error(ErrorCode::kFeatureKindMismatch, "feature kinds differ");
  if (const auto* va = std::get_if<RealVector>(&a)) {
    const auto& vb = std::get<RealVector>(b);
    if (va->values.size() != vb.values.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "feature vectors differ in dimension");
    }
    return vector_cost(*va, vb);
  }
  return jaccard_cost(std::get<IntSet>(a), std::get<IntSet>(b));
}

Eigen::MatrixXd feature_cost_matrix(const Graph& gs, const Graph& gq) {
  if (!gs.empty() && !gq.empty()) {
    if (gs.feature_kind() != gq.feature_kind()) {
      throw Error(ErrorCode::kFeatureKindMismatch, "source and query feature kinds differ");
    }
    if (gs.feature_dim() != gq.feature_dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "source and query feature dimensions differ");
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(gs.size()), static_cast<Eigen::Index>(gq.size()));
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (std::size_t j = 0; j < gq.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feature_cost(gs.feature(i), gq.feature(j));
    }
  }
  return m;
}

}  // namespace subgraph_ot
