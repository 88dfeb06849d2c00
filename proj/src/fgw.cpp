#include "subgraph_ot/fgw.hpp"

#include <algorithm>
#include <cmath>

#include "subgraph_ot/error.hpp"
#include "subgraph_ot/transport.hpp"

namespace subgraph_ot {
namespace {

void check_plan_shape(const FgwProblem& problem, const Eigen::MatrixXd& plan) {
  if (plan.rows() != problem.source_size() || plan.cols() != problem.query_size() + 1) {
    throw Error(ErrorCode::kShapeMismatch, "plan must be n x (m+1)");
  }
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a.array() * b.array()).sum(); }

// Minimizer of a*g^2 + b*g over [0,1]. Ties between endpoints go to 1.
double quadratic_step(double a, double b) {
  if (a > 0.0) return std::clamp(-b / (2.0 * a), 0.0, 1.0);
  return a + b <= 0.0 ? 1.0 : 0.0;
}

struct StepCoefficients {
  double a;
  double b;
};

StepCoefficients step_coefficients(const FgwProblem& problem, const Eigen::MatrixXd& plan_product,
                                   const Eigen::MatrixXd& direction, const Eigen::MatrixXd& direction_product) {
  const double ws = problem.alpha * problem.structure_scale;
  const double wf = (1.0 - problem.alpha) * problem.feature_scale;
  return {ws * inner(direction_product, direction),
          wf * inner(problem.feature_cost, direction) + 2.0 * ws * inner(plan_product, direction)};
}

double objective_from_product(const FgwProblem& problem, const Eigen::MatrixXd& plan,
                              const Eigen::MatrixXd& plan_product) {
  return (1.0 - problem.alpha) * problem.feature_scale * inner(problem.feature_cost, plan) +
         problem.alpha * problem.structure_scale * inner(plan_product, plan);
}

// L_hat (x) T with the elementwise squares of C_s and C_q computed once.
class TensorProduct {
 public:
  TensorProduct(const Eigen::MatrixXd& cs, const Eigen::MatrixXd& cq)
      : cs_(cs), cq_(cq), cs_sq_(cs.cwiseAbs2()), cq_sq_(cq.cwiseAbs2()) {}

  void apply(const Eigen::MatrixXd& plan, Eigen::MatrixXd& out) {
    const Eigen::Index n = cs_.rows();
    const Eigen::Index m = cq_.rows();
    const auto block = plan.leftCols(m);
    row_mass_.noalias() = block.rowwise().sum();
    col_mass_.noalias() = block.colwise().sum();
    source_term_.noalias() = cs_sq_ * row_mass_;
    query_term_.noalias() = col_mass_ * cq_sq_.transpose();
    scratch_.noalias() = cs_ * block;
    out.resize(n, m + 1);
    out.leftCols(m).noalias() = -2.0 * scratch_ * cq_.transpose();
    out.leftCols(m).colwise() += source_term_;
    out.leftCols(m).rowwise() += query_term_;
    out.col(m).setZero();
  }

 private:
  const Eigen::MatrixXd& cs_;
  const Eigen::MatrixXd& cq_;
  Eigen::MatrixXd cs_sq_;
  Eigen::MatrixXd cq_sq_;
  Eigen::VectorXd row_mass_;
  Eigen::RowVectorXd col_mass_;
  Eigen::VectorXd source_term_;
  Eigen::RowVectorXd query_term_;
  Eigen::MatrixXd scratch_;
};

}  // namespace

void validate(const FgwProblem& problem) {
  const Eigen::Index n = problem.source_size();
  const Eigen::Index m = problem.query_size();
  if (problem.source_structure.cols() != n || problem.query_structure.cols() != m ||
      problem.feature_cost.rows() != n || problem.feature_cost.cols() != m + 1 || problem.p.size() != n ||
      problem.q_hat.size() != m + 1) {
    throw Error(ErrorCode::kShapeMismatch, "inconsistent problem dimensions");
  }
  if (problem.source_structure != problem.source_structure.transpose() ||
      problem.query_structure != problem.query_structure.transpose()) {
    throw Error(ErrorCode::kAsymmetricStructure, "structure matrices must be symmetric");
  }
  if (!problem.feature_cost.col(m).isZero(0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dummy column of the feature cost must be zero");
  }
  if (problem.alpha < 0.0 || problem.alpha > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1]");
  }
  if (!(problem.feature_scale > 0.0) || !(problem.structure_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scales must be positive");
  }
  if (std::abs(problem.p.sum() - problem.q_hat.sum()) > kMassTolerance * std::max(1.0, problem.p.sum())) {
    throw Error(ErrorCode::kInfeasibleMarginals, "p and q_hat carry different mass");
  }
}

Eigen::MatrixXd tensor_product_apply(const Eigen::MatrixXd& source_structure,
                                     const Eigen::MatrixXd& query_structure, const Eigen::MatrixXd& plan) {
  const Eigen::Index n = source_structure.rows();
  const Eigen::Index m = query_structure.rows();
  if (source_structure.cols() != n || query_structure.cols() != m || plan.rows() != n || plan.cols() != m + 1) {
    throw Error(ErrorCode::kShapeMismatch, "tensor product expects C_s n x n, C_q m x m, T n x (m+1)");
  }
  Eigen::MatrixXd out;
  TensorProduct(source_structure, query_structure).apply(plan, out);
  return out;
}

ObjectiveTerms objective_terms(const FgwProblem& problem, const Eigen::MatrixXd& plan) {
  check_plan_shape(problem, plan);
  const Eigen::MatrixXd product = tensor_product_apply(problem.source_structure, problem.query_structure, plan);
  return {problem.feature_scale * inner(problem.feature_cost, plan),
          problem.structure_scale * inner(product, plan)};
}

double objective(const FgwProblem& problem, const Eigen::MatrixXd& plan) {
  const auto terms = objective_terms(problem, plan);
  return (1.0 - problem.alpha) * terms.feature + problem.alpha * terms.structure;
}

Eigen::MatrixXd gradient(const FgwProblem& problem, const Eigen::MatrixXd& plan) {
  check_plan_shape(problem, plan);
  if (problem.source_structure != problem.source_structure.transpose() ||
      problem.query_structure != problem.query_structure.transpose()) {
    throw Error(ErrorCode::kAsymmetricStructure, "gradient requires symmetric structure matrices");
  }
  const Eigen::MatrixXd product = tensor_product_apply(problem.source_structure, problem.query_structure, plan);
  return (1.0 - problem.alpha) * problem.feature_scale * problem.feature_cost +
         2.0 * problem.alpha * problem.structure_scale * product;
}

double line_search(const FgwProblem& problem, const Eigen::MatrixXd& plan, const Eigen::MatrixXd& direction) {
  check_plan_shape(problem, plan);
  check_plan_shape(problem, direction);
  if (direction.isZero(0.0)) return 0.0;
  const auto& cs = problem.source_structure;
  const auto& cq = problem.query_structure;
  const auto coeffs = step_coefficients(problem, tensor_product_apply(cs, cq, plan), direction,
                                        tensor_product_apply(cs, cq, direction));
  return quadratic_step(coeffs.a, coeffs.b);
}

double marginal_violation(const Eigen::MatrixXd& plan, const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const double rows = (plan.rowwise().sum() - p).cwiseAbs().maxCoeff();
  const double cols = (plan.colwise().sum().transpose() - q).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

SolveReport frank_wolfe(const FgwProblem& problem, const FrankWolfeOptions& options) {
  validate(problem);
  if (!(options.delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be positive");
  if (options.max_iter <= 0) throw Error(ErrorCode::kInvalidArgument, "max_iter must be positive");

  TensorProduct tensor(problem.source_structure, problem.query_structure);
  const double wf = (1.0 - problem.alpha) * problem.feature_scale;
  const double ws = problem.alpha * problem.structure_scale;
  WarmTransport lmo(Marginals{problem.p, problem.q_hat});

  SolveReport report;
  Eigen::MatrixXd plan = problem.p * problem.q_hat.transpose();
  // L_hat (x) plan, kept current through linearity of the product.
  Eigen::MatrixXd product;
  tensor.apply(plan, product);
  Eigen::MatrixXd grad;
  Eigen::MatrixXd direction;
  Eigen::MatrixXd direction_product;
  double current = objective_from_product(problem, plan, product);
  report.objective_trace.push_back(current);
  report.max_marginal_violation = marginal_violation(plan, problem.p, problem.q_hat);

  while (report.iterations < options.max_iter) {
    ++report.iterations;
    grad.noalias() = wf * problem.feature_cost + 2.0 * ws * product;
    direction.noalias() = lmo.solve(grad).matrix - plan;
    if (direction.isZero(0.0)) {
      report.converged = true;
      break;
    }
    tensor.apply(direction, direction_product);
    const auto coeffs = step_coefficients(problem, product, direction, direction_product);
    const double gamma = quadratic_step(coeffs.a, coeffs.b);
    if (gamma == 0.0) {
      report.converged = true;
      break;
    }
    plan += gamma * direction;
    product += gamma * direction_product;
    const double next = objective_from_product(problem, plan, product);
    report.objective_trace.push_back(next);
    report.max_marginal_violation =
        std::max(report.max_marginal_violation, marginal_violation(plan, problem.p, problem.q_hat));
    const double change = std::abs(next - current);
    current = next;
    if (change < options.delta) {
      report.converged = true;
      break;
    }
  }

  report.plan = std::move(plan);
  report.objective = current;
  return report;
}

}  // namespace subgraph_ot
