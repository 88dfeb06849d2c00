#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "subgraph_ot/fgw.hpp"
#include "subgraph_ot/graph.hpp"

namespace subgraph_ot {

struct MatchConfig {
  double alpha = 0.5;
  // Scale the feature term by n/m and the structure term by n^2/m^2.
  bool normalize = true;
  double delta = 1e-9;
  int max_iter = 1000;
};

struct SsotConfig : MatchConfig {
  // Candidates pass the feature filter when their partial transport value is
  // strictly below this threshold.
  double feature_threshold = 1.0;
  // Candidate solves run on this many threads; the result does not depend on it.
  unsigned workers = 1;
};

struct CandidateStats {
  std::size_t generated = 0;
  std::size_t filtered = 0;  // rejected by the filter
  std::size_t solved = 0;
};

struct MatchResult {
  std::vector<std::string> matched_nodes;  // source ids, ascending source index
  // (query id, source id), in query order.
  std::vector<std::pair<std::string, std::string>> mapping;
  double objective = 0.0;
  Eigen::MatrixXd plan;
  int iterations = 0;
  bool converged = false;
  CandidateStats candidate_stats;
  double elapsed_seconds = 0.0;
  // SSOT only: center node of the winning candidate.
  std::size_t center = 0;
  // Solver health over every Frank-Wolfe run behind this result.
  double worst_marginal_violation = 0.0;
  double worst_objective_increase = 0.0;
};

// Dummy-augmented problem for a source with n >= m nodes: p = 1/n,
// q_hat = [1/n ... 1/n, 1 - m/n], M_hat = [M, 0]. With m == n the dummy
// column carries zero mass.
FgwProblem build_partial_problem(const Graph& source, const Graph& query, const MatchConfig& config);

// As build_partial_problem, but requires m < n (kQueryTooLarge otherwise).
FgwProblem build_sot_problem(const Graph& source, const Graph& query, const MatchConfig& config);

// Injective query -> source map maximizing the total plan weight on the
// non-dummy block. result[j] is the source row assigned to query column j.
// Throws kDegeneratePlan if a non-dummy column is all zero.
std::vector<std::size_t> extract_matching(const Eigen::MatrixXd& plan);

// One global partial-FGW solve between the whole source and the query.
MatchResult sot_match(const Graph& source, const Graph& query, const MatchConfig& config = {});

// |candidate| >= m and partial feature transport value < threshold.
bool candidate_filter(const SubgraphView& candidate, const Graph& query, double threshold);

// Sliding-subgraph matching over the k-hop neighborhoods of every source
// node, k being the query radius. Returns the surviving candidate with the
// smallest objective, lowest center index on ties.
// Throws kDisconnectedQuery or kNoCandidates.
MatchResult ssot_match(const Graph& source, const Graph& query, const SsotConfig& config = {});

}  // namespace subgraph_ot
