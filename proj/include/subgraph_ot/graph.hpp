#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace subgraph_ot {

struct RealVector {
  std::vector<double> values;
  bool operator==(const RealVector&) const = default;
};

// Sorted, duplicate-free set of integers. Build through make_int_set().
struct IntSet {
  std::vector<std::int64_t> values;
  bool operator==(const IntSet&) const = default;
};

using Feature = std::variant<RealVector, IntSet>;

enum class FeatureKind { kRealVector, kIntSet };

// Sorts the input and throws kInvalidArgument on duplicates.
IntSet make_int_set(std::vector<std::int64_t> values);

FeatureKind kind_of(const Feature& f);

using Edge = std::pair<std::size_t, std::size_t>;

// Undirected node-featured graph. Adjacency is held as sorted neighbor
// lists; a self-loop puts a node in its own list. Immutable once built.
class Graph {
 public:
  Graph() = default;

  // Validates: unique ids, one feature per node, uniform feature kind and
  // dimension, in-range endpoints, no duplicate undirected edges.
  Graph(std::vector<std::string> ids, std::vector<Feature> features,
        std::span<const Edge> edges);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::span<const std::string> ids() const { return ids_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  const Feature& feature(std::size_t i) const { return features_[i]; }
  std::span<const Feature> features() const { return features_; }
  FeatureKind feature_kind() const { return kind_; }
  // Vector dimension; 0 for integer-set features.
  std::size_t feature_dim() const { return dim_; }

  std::span<const std::size_t> neighbors(std::size_t i) const { return adj_[i]; }
  bool adjacent(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const { return edge_count_; }
  // Every undirected edge once, as (min, max), in lexicographic order.
  std::vector<Edge> edges() const;

  bool operator==(const Graph& other) const;

 private:
  std::vector<std::string> ids_;
  std::vector<Feature> features_;
  std::vector<std::vector<std::size_t>> adj_;
  std::unordered_map<std::string, std::size_t> index_;
  FeatureKind kind_ = FeatureKind::kRealVector;
  std::size_t dim_ = 0;
  std::size_t edge_count_ = 0;
};

// Ordered subset of a parent graph's nodes with the induced structure.
// Holds a pointer to the parent; the parent must outlive the view.
class SubgraphView {
 public:
  SubgraphView(const Graph& parent, std::vector<std::size_t> members);

  const Graph& parent() const { return *parent_; }
  std::span<const std::size_t> members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  // Induced subgraph as a standalone Graph carrying the parent's ids.
  Graph materialize() const;

 private:
  const Graph* parent_;
  std::vector<std::size_t> members_;
};

// Dense 0/1 adjacency used as the structure matrix.
Eigen::MatrixXd structure_matrix(const Graph& g);
// Induced adjacency of the view, rows ordered like its members.
Eigen::MatrixXd structure_matrix(const SubgraphView& view);

// Unweighted BFS distances from `source`; unreachable nodes get nullopt.
std::vector<std::optional<std::size_t>> bfs_distances(const Graph& g, std::size_t source);

// min over nodes of the max BFS distance to any other node.
// Throws kDisconnectedGraph if some pair is unreachable.
std::size_t query_radius(const Graph& g);

// Nodes within k hops of center, ordered by distance then parent index.
SubgraphView k_hop_neighborhood(const Graph& g, std::size_t center, std::size_t k);

// Pairwise feature dissimilarity in [0,1]:
//   vectors: 1 - 1 / (1 + |x - y|^2)
//   sets:    1 - |A n B| / |A u B|  (two empty sets cost 0)
double feature_cost(const Feature& a, const Feature& b);

// |gs| x |gq| matrix of feature_cost values.
Eigen::MatrixXd feature_cost_matrix(const Graph& gs, const Graph& gq);

}  // namespace subgraph_ot
