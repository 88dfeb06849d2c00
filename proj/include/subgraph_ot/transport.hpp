#pragma once

#include <memory>

#include <Eigen/Dense>

namespace subgraph_ot {

struct Marginals {
  Eigen::VectorXd p;  // source masses, one per row
  Eigen::VectorXd q;  // target masses, one per column
};

struct TransportPlan {
  Eigen::MatrixXd matrix;
  double value = 0.0;  // <cost, matrix>
};

// Tolerance on |sum(p) - sum(q)| accepted by solve_transport_lp.
inline constexpr double kMassTolerance = 1e-12;

// Exact minimum-cost plan over the transportation polytope T(p, q).
//
// Transportation simplex started from the northwest-corner basis. Entering
// cells follow Dantzig's rule with lowest-index tie-breaking and fall back to
// Bland's rule after a run of degenerate pivots, so the result is a
// deterministic vertex of the polytope. Zero-mass rows and columns are
// removed before solving and come back as zero rows/columns of the plan.
//
// Throws kShapeMismatch, kNonFiniteCost, or kInfeasibleMarginals.
TransportPlan solve_transport_lp(const Eigen::MatrixXd& cost, const Marginals& marginals);

// A sequence of solves over fixed marginals. The first solve starts from the
// northwest corner; each later one starts from the previous optimal basis,
// which stays feasible because only the costs change. Any optimal vertex may
// come back when there are ties, so results can differ from a cold solve in
// the plan but never in the value.
class WarmTransport {
 public:
  // Throws kInfeasibleMarginals.
  explicit WarmTransport(Marginals marginals);
  ~WarmTransport();
  WarmTransport(WarmTransport&&) noexcept;
  WarmTransport& operator=(WarmTransport&&) noexcept;

  // Throws kShapeMismatch or kNonFiniteCost.
  TransportPlan solve(const Eigen::MatrixXd& cost);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// Optimal value of the partial transport problem between n_s = rows(cost)
// source nodes and m = cols(cost) target nodes, every node carrying mass
// 1/n_s and total transported mass m/n_s. Solved as a balanced problem with
// an extra zero-cost target column of mass 1 - m/n_s.
// Requires rows(cost) >= cols(cost).
double partial_wasserstein_value(const Eigen::MatrixXd& cost);

}  // namespace subgraph_ot
