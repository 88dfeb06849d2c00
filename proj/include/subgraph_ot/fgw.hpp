#pragma once

#include <vector>

#include <Eigen/Dense>

namespace subgraph_ot {

// Dummy-augmented partial fused Gromov-Wasserstein problem.
//
// The plan has n rows (source nodes) and m + 1 columns: m query nodes plus a
// trailing dummy column that absorbs the unmatched source mass at zero cost.
// The objective is
//   J(T) = (1 - alpha) * feature_scale * <M_hat, T>
//        + alpha * structure_scale * <L_hat (x) T, T>
// where L_hat (x) T contracts (C_s[i,i'] - C_q[j,j'])^2 against T and
// vanishes whenever j or j' is the dummy column.
struct FgwProblem {
  Eigen::MatrixXd feature_cost;      // n x (m+1), last column zero
  Eigen::MatrixXd source_structure;  // n x n, symmetric
  Eigen::MatrixXd query_structure;   // m x m, symmetric
  Eigen::VectorXd p;                 // n
  Eigen::VectorXd q_hat;             // m + 1
  double alpha = 0.5;
  double feature_scale = 1.0;
  double structure_scale = 1.0;

  Eigen::Index source_size() const { return source_structure.rows(); }
  Eigen::Index query_size() const { return query_structure.rows(); }
};

// Throws kShapeMismatch, kAsymmetricStructure, kInvalidArgument or
// kInfeasibleMarginals when the problem breaks its invariants.
void validate(const FgwProblem& problem);

// L_hat (x) T via the separable form
//   (C_s o C_s) r 1^T + 1 ((C_q o C_q) c)^T - 2 C_s T C_q^T
// where r and c are the row and column sums of the non-dummy block of T.
// On a feasible plan c equals the query marginal. The dummy column of the
// result is zero. O(n^2 m + n m^2).
Eigen::MatrixXd tensor_product_apply(const Eigen::MatrixXd& source_structure,
                                     const Eigen::MatrixXd& query_structure,
                                     const Eigen::MatrixXd& plan);

struct ObjectiveTerms {
  double feature = 0.0;    // feature_scale * <M_hat, T>
  double structure = 0.0;  // structure_scale * <L_hat (x) T, T>
};

ObjectiveTerms objective_terms(const FgwProblem& problem, const Eigen::MatrixXd& plan);
double objective(const FgwProblem& problem, const Eigen::MatrixXd& plan);

// (1 - alpha) * feature_scale * M_hat + 2 * alpha * structure_scale * (L_hat (x) T).
// Only the true gradient when both structure matrices are symmetric.
Eigen::MatrixXd gradient(const FgwProblem& problem, const Eigen::MatrixXd& plan);

// Exact minimizer over [0, 1] of J(plan + gamma * direction).
double line_search(const FgwProblem& problem, const Eigen::MatrixXd& plan,
                   const Eigen::MatrixXd& direction);

struct FrankWolfeOptions {
  double delta = 1e-9;
  int max_iter = 1000;
};

struct SolveReport {
  Eigen::MatrixXd plan;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // J at the start point and after every step
  bool converged = false;
  // Largest marginal residual seen over all iterates.
  double max_marginal_violation = 0.0;
};

// Conditional gradient from the product plan p q_hat^T. Each step solves the
// transport LP with the current gradient as cost and moves by the exact line
// search. Stops when the objective changes by less than delta, when the step
// length is zero, or after max_iter steps (converged = false).
SolveReport frank_wolfe(const FgwProblem& problem, const FrankWolfeOptions& options = {});

// max(|T 1 - p|_inf, |T^T 1 - q|_inf)
double marginal_violation(const Eigen::MatrixXd& plan, const Eigen::VectorXd& p,
                          const Eigen::VectorXd& q);

}  // namespace subgraph_ot
