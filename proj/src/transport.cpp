#include "subgraph_ot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "subgraph_ot/error.hpp"

namespace subgraph_ot {
namespace {

// Consecutive zero-step pivots tolerated before switching to Bland's rule.
constexpr int kDegenerateRunLimit = 50;

// Transportation simplex on a reduced problem whose masses are all positive.
class TransportationSimplex {
 public:
  TransportationSimplex(const Eigen::MatrixXd& cost, std::vector<double> supply,
                        std::vector<double> demand)
      : cost_(cost),
        rows_(cost.rows()),
        cols_(cost.cols()),
        flow_(Eigen::MatrixXd::Zero(cost.rows(), cost.cols())),
        basic_(static_cast<std::size_t>(cost.rows() * cost.cols()), 0),
        row_cells_(static_cast<std::size_t>(cost.rows() * cost.cols())),
        col_cells_(static_cast<std::size_t>(cost.rows() * cost.cols())),
        row_count_(static_cast<std::size_t>(cost.rows()), 0),
        col_count_(static_cast<std::size_t>(cost.cols()), 0),
        u_(static_cast<std::size_t>(cost.rows())),
        v_(static_cast<std::size_t>(cost.cols())),
        row_done_(static_cast<std::size_t>(cost.rows())),
        col_done_(static_cast<std::size_t>(cost.cols())),
        parent_(static_cast<std::size_t>(cost.rows() + cost.cols())) {
    stack_.reserve(static_cast<std::size_t>(rows_ + cols_));
    path_.reserve(static_cast<std::size_t>(rows_ + cols_));
    northwest_corner(std::move(supply), std::move(demand));
    tolerance_ = 1e-12 * (1.0 + cost.cwiseAbs().maxCoeff());
  }

  // New costs, same masses: the current basis stays primal feasible.
  void reprice(const Eigen::MatrixXd& cost) {
    cost_ = cost;
    tolerance_ = 1e-12 * (1.0 + cost_.cwiseAbs().maxCoeff());
  }

  void run() {
    const long max_pivots = 100L * rows_ * cols_ + 10000;
    int degenerate_run = 0;
    for (long pivot = 0; pivot < max_pivots; ++pivot) {
      compute_potentials();
      const bool bland = degenerate_run >= kDegenerateRunLimit;
      const auto entering = select_entering(bland);
      if (entering < 0) return;
      const double step = pivot_on(entering / cols_, entering % cols_);
      degenerate_run = step > 0.0 ? 0 : degenerate_run + 1;
    }
    throw std::logic_error("transportation simplex exceeded its pivot budget");
  }

  const Eigen::MatrixXd& flow() const { return flow_; }

 private:
  std::size_t cell(Eigen::Index r, Eigen::Index c) const { return static_cast<std::size_t>(r * cols_ + c); }

  // Basic cells of row r (column indices) and of column c (row indices),
  // kept in insertion order in flat slabs.
  std::span<const Eigen::Index> row_cells(Eigen::Index r) const {
    return {row_cells_.data() + r * cols_, row_count_[static_cast<std::size_t>(r)]};
  }
  std::span<const Eigen::Index> col_cells(Eigen::Index c) const {
    return {col_cells_.data() + c * rows_, col_count_[static_cast<std::size_t>(c)]};
  }

  void add_basic(Eigen::Index r, Eigen::Index c) {
    basic_[cell(r, c)] = 1;
    row_cells_[static_cast<std::size_t>(r * cols_) + row_count_[static_cast<std::size_t>(r)]++] = c;
    col_cells_[static_cast<std::size_t>(c * rows_) + col_count_[static_cast<std::size_t>(c)]++] = r;
  }

  static void erase_from(Eigen::Index* first, std::size_t& count, Eigen::Index value) {
    Eigen::Index* last = first + count;
    Eigen::Index* hit = std::find(first, last, value);
    std::copy(hit + 1, last, hit);
    --count;
  }

  void remove_basic(Eigen::Index r, Eigen::Index c) {
    basic_[cell(r, c)] = 0;
    erase_from(row_cells_.data() + r * cols_, row_count_[static_cast<std::size_t>(r)], c);
    erase_from(col_cells_.data() + c * rows_, col_count_[static_cast<std::size_t>(c)], r);
  }

  // Produces rows + cols - 1 basic cells forming a spanning tree; ties in
  // residual mass step down first, leaving a zero-flow basic cell.
  void northwest_corner(std::vector<double> supply, std::vector<double> demand) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    while (true) {
      const double x = std::min(supply[static_cast<std::size_t>(r)], demand[static_cast<std::size_t>(c)]);
      flow_(r, c) = x;
      add_basic(r, c);
      if (r == rows_ - 1 && c == cols_ - 1) break;
      double& s = supply[static_cast<std::size_t>(r)];
      double& d = demand[static_cast<std::size_t>(c)];
      if (c == cols_ - 1 || (r < rows_ - 1 && s <= d)) {
        d -= x;
        s = 0.0;
        ++r;
      } else {
        s -= x;
        d = 0.0;
        ++c;
      }
    }
  }

  // u_r + v_c = cost(r, c) on the basis tree, rooted at u_0 = 0.
  void compute_potentials() {
    auto& row_done = row_done_;
    auto& col_done = col_done_;
    std::fill(row_done.begin(), row_done.end(), 0);
    std::fill(col_done.begin(), col_done.end(), 0);
    // Stack entries: index >= 0 is a row, index < 0 encodes column ~index.
    auto& stack = stack_;
    stack.assign(1, 0);
    u_[0] = 0.0;
    row_done[0] = 1;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      if (node >= 0) {
        for (Eigen::Index c : row_cells(node)) {
          if (col_done[static_cast<std::size_t>(c)]) continue;
          v_[static_cast<std::size_t>(c)] = cost_(node, c) - u_[static_cast<std::size_t>(node)];
          col_done[static_cast<std::size_t>(c)] = 1;
          stack.push_back(~c);
        }
      } else {
        const Eigen::Index c = ~node;
        for (Eigen::Index r : col_cells(c)) {
          if (row_done[static_cast<std::size_t>(r)]) continue;
          u_[static_cast<std::size_t>(r)] = cost_(r, c) - v_[static_cast<std::size_t>(c)];
          row_done[static_cast<std::size_t>(r)] = 1;
          stack.push_back(r);
        }
      }
    }
  }

  // Returns the linear index of the entering cell, or -1 at optimality.
  Eigen::Index select_entering(bool bland) const {
    Eigen::Index best = -1;
    double best_reduced = -tolerance_;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double ur = u_[static_cast<std::size_t>(r)];
      for (Eigen::Index c = 0; c < cols_; ++c) {
        if (basic_[cell(r, c)]) continue;
        const double reduced = cost_(r, c) - ur - v_[static_cast<std::size_t>(c)];
        if (reduced < best_reduced) {
          if (bland) return r * cols_ + c;
          best_reduced = reduced;
          best = r * cols_ + c;
        }
      }
    }
    return best;
  }

  // Moves flow around the cycle closed by (r, c); returns the step length.
  double pivot_on(Eigen::Index r, Eigen::Index c) {
    // Tree path from row r to column c. Nodes: rows as r, columns as rows_ + c.
    const Eigen::Index total = rows_ + cols_;
    auto& parent = parent_;
    parent.assign(static_cast<std::size_t>(total), -2);
    auto& stack = stack_;
    stack.assign(1, r);
    parent[static_cast<std::size_t>(r)] = -1;
    const Eigen::Index target = rows_ + c;
    while (!stack.empty() && parent[static_cast<std::size_t>(target)] == -2) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      if (node < rows_) {
        for (Eigen::Index cc : row_cells(node)) {
          const Eigen::Index next = rows_ + cc;
          if (parent[static_cast<std::size_t>(next)] != -2) continue;
          parent[static_cast<std::size_t>(next)] = node;
          stack.push_back(next);
        }
      } else {
        for (Eigen::Index rr : col_cells(node - rows_)) {
          if (parent[static_cast<std::size_t>(rr)] != -2) continue;
          parent[static_cast<std::size_t>(rr)] = node;
          stack.push_back(rr);
        }
      }
    }

    // Walk back from column c to row r; the first edge gets -, then alternate.
    auto& path = path_;
    path.clear();
    bool minus = true;
    for (Eigen::Index node = target; parent[static_cast<std::size_t>(node)] >= 0;
         node = parent[static_cast<std::size_t>(node)]) {
      const Eigen::Index prev = parent[static_cast<std::size_t>(node)];
      const Eigen::Index rr = node < rows_ ? node : prev;
      const Eigen::Index cc = node < rows_ ? prev - rows_ : node - rows_;
      path.push_back({rr, cc, minus});
      minus = !minus;
    }

    double theta = std::numeric_limits<double>::infinity();
    Eigen::Index leave_r = -1;
    Eigen::Index leave_c = -1;
    for (const auto& e : path) {
      if (!e.minus) continue;
      const double f = flow_(e.r, e.c);
      if (f < theta || (f == theta && cell(e.r, e.c) < cell(leave_r, leave_c))) {
        theta = f;
        leave_r = e.r;
        leave_c = e.c;
      }
    }
    for (const auto& e : path) {
      if (e.minus) {
        flow_(e.r, e.c) = std::max(0.0, flow_(e.r, e.c) - theta);
      } else {
        flow_(e.r, e.c) += theta;
      }
    }
    flow_(leave_r, leave_c) = 0.0;
    flow_(r, c) = theta;
    remove_basic(leave_r, leave_c);
    add_basic(r, c);
    return theta;
  }

  Eigen::MatrixXd cost_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::MatrixXd flow_;
  std::vector<char> basic_;
  std::vector<Eigen::Index> row_cells_;
  std::vector<Eigen::Index> col_cells_;
  std::vector<std::size_t> row_count_;
  std::vector<std::size_t> col_count_;
  std::vector<double> u_;
  std::vector<double> v_;
  double tolerance_ = 0.0;
  // Scratch buffers reused across pivots.
  struct CycleCell {
    Eigen::Index r, c;
    bool minus;
  };
  std::vector<char> row_done_;
  std::vector<char> col_done_;
  std::vector<Eigen::Index> parent_;
  std::vector<Eigen::Index> stack_;
  std::vector<CycleCell> path_;
};

void check_masses(const Eigen::VectorXd& masses, const char* name) {
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    if (!std::isfinite(masses[i]) || masses[i] < 0.0) {
      throw Error(ErrorCode::kInfeasibleMarginals, std::string(name) + " has a negative or non-finite entry");
    }
  }
}


// Checks shapes and masses, and lists the rows and columns with positive mass.
struct Support {
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
};

void check_cost(const Eigen::MatrixXd& cost, const Marginals& marginals) {
  if (cost.rows() != marginals.p.size() || cost.cols() != marginals.q.size()) {
    throw Error(ErrorCode::kShapeMismatch, "cost matrix shape does not match marginals");
  }
  if (!cost.allFinite()) throw Error(ErrorCode::kNonFiniteCost, "cost matrix has non-finite entries");
}

Support support_of(const Marginals& marginals) {
  const Eigen::VectorXd& p = marginals.p;
  const Eigen::VectorXd& q = marginals.q;
  check_masses(p, "p");
  check_masses(q, "q");
  const double mass = p.sum();
  if (std::abs(mass - q.sum()) > kMassTolerance * std::max(1.0, mass)) {
    throw Error(ErrorCode::kInfeasibleMarginals, "sum(p) and sum(q) differ");
  }
  Support s;
  s.rows.reserve(static_cast<std::size_t>(p.size()));
  s.cols.reserve(static_cast<std::size_t>(q.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s.rows.push_back(i);
  }
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if (q[j] > 0.0) s.cols.push_back(j);
  }
  return s;
}

TransportationSimplex make_simplex(const Eigen::MatrixXd& reduced, const Marginals& marginals, const Support& s) {
  std::vector<double> supply(s.rows.size());
  std::vector<double> demand(s.cols.size());
  for (std::size_t k = 0; k < s.rows.size(); ++k) supply[k] = marginals.p[s.rows[k]];
  for (std::size_t k = 0; k < s.cols.size(); ++k) demand[k] = marginals.q[s.cols[k]];
  return TransportationSimplex(reduced, std::move(supply), std::move(demand));
}

}  // namespace

TransportPlan solve_transport_lp(const Eigen::MatrixXd& cost, const Marginals& marginals) {
  check_cost(cost, marginals);
  const Support s = support_of(marginals);
  TransportPlan plan{Eigen::MatrixXd::Zero(cost.rows(), cost.cols()), 0.0};
  if (s.rows.empty() || s.cols.empty()) return plan;

  TransportationSimplex simplex = make_simplex(cost(s.rows, s.cols), marginals, s);
  simplex.run();

  plan.matrix(s.rows, s.cols) = simplex.flow();
  plan.value = (plan.matrix.array() * cost.array()).sum();
  return plan;
}

struct WarmTransport::State {
  Marginals marginals;
  Support support;
  std::optional<TransportationSimplex> simplex;
};

WarmTransport::WarmTransport(Marginals marginals) : state_(std::make_unique<State>()) {
  state_->support = support_of(marginals);
  state_->marginals = std::move(marginals);
}

WarmTransport::~WarmTransport() = default;
WarmTransport::WarmTransport(WarmTransport&&) noexcept = default;
WarmTransport& WarmTransport::operator=(WarmTransport&&) noexcept = default;

TransportPlan WarmTransport::solve(const Eigen::MatrixXd& cost) {
  State& st = *state_;
  check_cost(cost, st.marginals);
  TransportPlan plan{Eigen::MatrixXd::Zero(cost.rows(), cost.cols()), 0.0};
  if (st.support.rows.empty() || st.support.cols.empty()) return plan;

  Eigen::MatrixXd reduced = cost(st.support.rows, st.support.cols);
  if (st.simplex) {
    st.simplex->reprice(reduced);
  } else {
    st.simplex.emplace(make_simplex(reduced, st.marginals, st.support));
  }
  st.simplex->run();

  plan.matrix(st.support.rows, st.support.cols) = st.simplex->flow();
  plan.value = (plan.matrix.array() * cost.array()).sum();
  return plan;
}

double partial_wasserstein_value(const Eigen::MatrixXd& cost) {
  const Eigen::Index ns = cost.rows();
  const Eigen::Index m = cost.cols();
  if (ns < m || ns == 0) {
    throw Error(ErrorCode::kInvalidArgument, "partial transport needs at least as many source as target nodes");
  }
  const double mass = 1.0 / static_cast<double>(ns);
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(ns, m + 1);
  lifted.leftCols(m) = cost;
  Marginals marginals{Eigen::VectorXd::Constant(ns, mass), Eigen::VectorXd::Constant(m + 1, mass)};
  marginals.q[m] = 1.0 - static_cast<double>(m) / static_cast<double>(ns);
  if (marginals.q[m] < 0.0) marginals.q[m] = 0.0;
  return solve_transport_lp(lifted, marginals).value;
}

}  // namespace subgraph_ot
