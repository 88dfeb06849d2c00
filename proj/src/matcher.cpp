#include "subgraph_ot/matcher.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <optional>
#include <thread>

#include "subgraph_ot/error.hpp"
#include "subgraph_ot/transport.hpp"

namespace subgraph_ot {
namespace {

using Clock = std::chrono::steady_clock;

FgwProblem assemble_problem(const Eigen::MatrixXd& feature_cost, Eigen::MatrixXd source_structure,
                            Eigen::MatrixXd query_structure, const MatchConfig& config) {
  const Eigen::Index n = feature_cost.rows();
  const Eigen::Index m = feature_cost.cols();
  const double mass = 1.0 / static_cast<double>(n);

  FgwProblem problem;
  problem.feature_cost = Eigen::MatrixXd::Zero(n, m + 1);
  problem.feature_cost.leftCols(m) = feature_cost;
  problem.source_structure = std::move(source_structure);
  problem.query_structure = std::move(query_structure);
  problem.p = Eigen::VectorXd::Constant(n, mass);
  problem.q_hat = Eigen::VectorXd::Constant(m + 1, mass);
  problem.q_hat[m] = std::max(0.0, 1.0 - static_cast<double>(m) / static_cast<double>(n));
  problem.alpha = config.alpha;
  if (config.normalize) {
    const double ratio = static_cast<double>(n) / static_cast<double>(m);
    problem.feature_scale = ratio;
    problem.structure_scale = ratio * ratio;
  }
  return problem;
}

// Exact filter test on a candidate's rows of the feature cost. Every query
// column must receive mass 1/n_s, so sum_j min_i M_ij / n_s bounds the
// partial transport value from below; the LP runs only when the bound passes.
bool passes_feature_filter(const Eigen::MatrixXd& costs, double threshold) {
  const double bound = costs.colwise().minCoeff().sum() / static_cast<double>(costs.rows());
  if (!(bound < threshold)) return false;
  return partial_wasserstein_value(costs) < threshold;
}

void check_match_config(const MatchConfig& config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  if (!(config.delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  if (config.max_iter <= 0) throw Error(ErrorCode::kInvalidArgument, "max_iter must be positive");
}

void check_feature_kinds(const Graph& source, const Graph& query) {
  if (source.empty() || query.empty()) return;
  if (source.feature_kind() != query.feature_kind()) {
    throw Error(ErrorCode::kFeatureKindMismatch, "source and query feature kinds differ");
  }
  if (source.feature_dim() != query.feature_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "source and query feature dimensions differ");
  }
}

double objective_increase(const SolveReport& report) {
  double worst = 0.0;
  for (std::size_t k = 1; k < report.objective_trace.size(); ++k) {
    worst = std::max(worst, report.objective_trace[k] - report.objective_trace[k - 1]);
  }
  return worst;
}

// Fills the plan-derived fields; `members` maps plan rows to source indices.
void fill_from_report(MatchResult& result, SolveReport report, const Graph& source, const Graph& query,
                      std::span<const std::size_t> members) {
  const auto assignment = extract_matching(report.plan);
  std::vector<std::size_t> matched;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    const std::size_t src = members[assignment[j]];
    matched.push_back(src);
    result.mapping.emplace_back(query.id(j), source.id(src));
  }
  std::sort(matched.begin(), matched.end());
  for (std::size_t src : matched) result.matched_nodes.push_back(source.id(src));
  // The quadratic term can round a hair below zero on exact matches.
  result.objective = std::max(0.0, report.objective);
  result.iterations = report.iterations;
  result.converged = report.converged;
  result.plan = std::move(report.plan);
}

}  // namespace

FgwProblem build_partial_problem(const Graph& source, const Graph& query, const MatchConfig& config) {
  check_match_config(config);
  check_feature_kinds(source, query);
  if (query.empty()) throw Error(ErrorCode::kInvalidArgument, "query graph is empty");
  if (query.size() > source.size()) {
    throw Error(ErrorCode::kQueryTooLarge, "query has more nodes than the source");
  }
  return assemble_problem(feature_cost_matrix(source, query), structure_matrix(source), structure_matrix(query),
                          config);
}

FgwProblem build_sot_problem(const Graph& source, const Graph& query, const MatchConfig& config) {
  if (query.size() >= source.size()) {
    throw Error(ErrorCode::kQueryTooLarge, "query must have fewer nodes than the source");
  }
  return build_partial_problem(source, query, config);
}

std::vector<std::size_t> extract_matching(const Eigen::MatrixXd& plan) {
  const Eigen::Index n = plan.rows();
  const Eigen::Index m = plan.cols() - 1;
  if (m < 0 || m > n) throw Error(ErrorCode::kShapeMismatch, "plan must be n x (m+1) with m <= n");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(plan.col(j).maxCoeff() > 0.0)) {
      throw Error(ErrorCode::kDegeneratePlan, "query column " + std::to_string(j) + " receives no mass");
    }
  }

  // Hungarian method with potentials; query columns are the rows of the
  // assignment problem, source rows its columns. Cost is the negated weight.
  // Indices are 1-based with slot 0 as the virtual start.
  const auto rows = static_cast<std::size_t>(m);
  const auto cols = static_cast<std::size_t>(n);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0);
  std::vector<double> v(cols + 1, 0.0);
  std::vector<std::size_t> owner(cols + 1, 0);  // owner[col] = assigned row
  std::vector<std::size_t> way(cols + 1, 0);
  auto cost = [&](std::size_t i, std::size_t j) {
    return -plan(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(i - 1));
  };

  for (std::size_t i = 1; i <= rows; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assignment(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (owner[j] != 0) assignment[owner[j] - 1] = j - 1;
  }
  return assignment;
}

MatchResult sot_match(const Graph& source, const Graph& query, const MatchConfig& config) {
  const auto start = Clock::now();
  const FgwProblem problem = build_sot_problem(source, query, config);
  SolveReport report = frank_wolfe(problem, {config.delta, config.max_iter});

  MatchResult result;
  result.worst_marginal_violation = report.max_marginal_violation;
  result.worst_objective_increase = objective_increase(report);
  std::vector<std::size_t> identity(source.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  fill_from_report(result, std::move(report), source, query, identity);
  result.candidate_stats = {1, 0, 1};
  result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

bool candidate_filter(const SubgraphView& candidate, const Graph& query, double threshold) {
  if (candidate.size() < query.size() || query.empty()) return false;
  return passes_feature_filter(feature_cost_matrix(candidate.materialize(), query), threshold);
}

MatchResult ssot_match(const Graph& source, const Graph& query, const SsotConfig& config) {
  const auto start = Clock::now();
  check_match_config(config);
  check_feature_kinds(source, query);
  if (!(config.feature_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "feature threshold must be positive");
  }
  if (query.empty()) throw Error(ErrorCode::kInvalidArgument, "query graph is empty");
  std::size_t radius = 0;
  try {
    radius = query_radius(query);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDisconnectedGraph) throw;
    throw Error(ErrorCode::kDisconnectedQuery, "query graph is not connected");
  }

  struct Outcome {
    bool passed = false;
    SolveReport report;
    std::vector<std::size_t> members;
  };
  const std::size_t n = source.size();
  std::vector<Outcome> outcomes(n);

  const Eigen::MatrixXd all_costs = feature_cost_matrix(source, query);
  const Eigen::MatrixXd query_structure = structure_matrix(query);

  auto evaluate = [&](std::size_t center) {
    const SubgraphView view = k_hop_neighborhood(source, center, radius);
    if (view.size() < query.size()) return;
    const std::vector<Eigen::Index> rows(view.members().begin(), view.members().end());
    const Eigen::MatrixXd costs = all_costs(rows, Eigen::all);
    if (!passes_feature_filter(costs, config.feature_threshold)) return;
    Outcome& out = outcomes[center];
    out.passed = true;
    out.report = frank_wolfe(assemble_problem(costs, structure_matrix(view), query_structure, config),
                             {config.delta, config.max_iter});
    out.members.assign(view.members().begin(), view.members().end());
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t v = 0; v < n; ++v) evaluate(v);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t v = next++; v < n; v = next++) evaluate(v);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MatchResult result;
  result.candidate_stats.generated = n;
  std::optional<std::size_t> best;
  for (std::size_t v = 0; v < n; ++v) {
    const Outcome& out = outcomes[v];
    if (!out.passed) continue;
    ++result.candidate_stats.solved;
    result.worst_marginal_violation = std::max(result.worst_marginal_violation, out.report.max_marginal_violation);
    result.worst_objective_increase = std::max(result.worst_objective_increase, objective_increase(out.report));
    if (!best || out.report.objective < outcomes[*best].report.objective) best = v;
  }
  result.candidate_stats.filtered = n - result.candidate_stats.solved;
  if (!best) {
    throw Error(ErrorCode::kNoCandidates, "no candidate subgraph passed the feature filter");
  }

  Outcome& winner = outcomes[*best];
  result.center = *best;
  fill_from_report(result, std::move(winner.report), source, query, winner.members);
  result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace subgraph_ot
