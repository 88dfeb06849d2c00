#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "subgraph_ot/error.hpp"
#include "subgraph_ot/transport.hpp"

using namespace subgraph_ot;

namespace {

Eigen::VectorXd uniform(Eigen::Index n) { return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)); }

Eigen::VectorXd random_simplex(Eigen::Index n, std::mt19937_64& rng, bool allow_zero = false) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution zero(0.2);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (allow_zero && zero(rng)) ? 0.0 : u(rng);
  if (v.sum() == 0.0) v[0] = 1.0;
  return v / v.sum();
}

Eigen::MatrixXd random_cost(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = u(rng);
  return c;
}

void check_feasible(const TransportPlan& plan, const Marginals& marg) {
  CHECK(plan.matrix.minCoeff() >= 0.0);
  CHECK((plan.matrix.rowwise().sum() - marg.p).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((plan.matrix.colwise().sum().transpose() - marg.q).cwiseAbs().maxCoeff() <= 1e-9);
}

}  // namespace

TEST_CASE("zero-cost diagonal") {
  Eigen::MatrixXd cost(2, 2);
  cost << 0, 1, 1, 0;
  const Marginals marg{uniform(2), uniform(2)};
  const auto plan = solve_transport_lp(cost, marg);
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, 0, 0, 0.5;
  CHECK(plan.matrix.isApprox(expected, 1e-15));
  CHECK(plan.value == 0.0);
}

TEST_CASE("constant cost gives the total mass") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const Marginals marg{random_simplex(4, rng) * 0.7, random_simplex(3, rng) * 0.7};
    const auto plan = solve_transport_lp(Eigen::MatrixXd::Ones(4, 3), marg);
    CHECK(plan.value == doctest::Approx(marg.p.sum()).epsilon(1e-12));
    check_feasible(plan, marg);
  }
}

TEST_CASE("3x2 instance against vertex enumeration") {
  Eigen::MatrixXd cost(3, 2);
  cost << 0, 2, 1, 0, 3, 1;
  const Marginals marg{uniform(3), uniform(2)};
  const double expected = oracle::transport_by_vertex_enumeration(cost, marg.p, marg.q);
  // Frozen from the enumeration oracle: rows 0 and 2 go whole to columns 0
  // and 1, row 1 splits 1/6 : 1/6.
  CHECK(expected == doctest::Approx(0.5).epsilon(1e-14));
  const auto plan = solve_transport_lp(cost, marg);
  CHECK(std::abs(plan.value - 0.5) <= 1e-12);
  check_feasible(plan, marg);
}

TEST_CASE("solver matches vertex enumeration on small random instances") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 120; ++t) {
    const Eigen::Index n = 1 + t % 4;
    const Eigen::Index m = 1 + (t / 4) % 4;
    const Eigen::MatrixXd cost = random_cost(n, m, rng);
    const Marginals marg{random_simplex(n, rng, t % 3 == 0), random_simplex(m, rng, t % 5 == 0)};
    const auto plan = solve_transport_lp(cost, marg);
    const double expected = oracle::transport_by_vertex_enumeration(cost, marg.p, marg.q);
    CHECK(std::abs(plan.value - expected) <= 1e-10);
    check_feasible(plan, marg);
  }
}

TEST_CASE("degenerate uniform marginals with integer costs") {
  // Many ties and degenerate bases; exercises the anti-cycling fallback.
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> small(0, 2);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index n = 3 + t % 2;
    const Eigen::Index m = 3;
    Eigen::MatrixXd cost(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = small(rng);
    const Marginals marg{uniform(n), uniform(m)};
    const auto plan = solve_transport_lp(cost, marg);
    CHECK(std::abs(plan.value - oracle::transport_by_vertex_enumeration(cost, marg.p, marg.q)) <= 1e-10);
  }
}

TEST_CASE("larger instances stay feasible and beat the product plan") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 60;
    const Eigen::Index m = 7;
    const Eigen::MatrixXd cost = random_cost(n, m, rng);
    Marginals marg{uniform(n), Eigen::VectorXd::Constant(m, 1.0 / n)};
    marg.q[m - 1] = 1.0 - (m - 1.0) / n;
    const auto plan = solve_transport_lp(cost, marg);
    check_feasible(plan, marg);
    const double product = (cost.array() * (marg.p * marg.q.transpose()).array()).sum();
    CHECK(plan.value <= product + 1e-12);
  }
}

TEST_CASE("value is monotone under entrywise cost increase") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int t = 0; t < 30; ++t) {
    const Eigen::MatrixXd cost = random_cost(4, 3, rng);
    Eigen::MatrixXd bump = cost;
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) bump(i, j) += u(rng);
    const Marginals marg{random_simplex(4, rng), random_simplex(3, rng)};
    CHECK(solve_transport_lp(cost, marg).value <= solve_transport_lp(bump, marg).value + 1e-12);
  }
}

TEST_CASE("zero-mass rows and columns come back as zeros") {
  Eigen::MatrixXd cost(3, 3);
  cost << 0.1, 0.9, 0.4, 0.3, 0.2, 0.8, 0.5, 0.6, 0.7;
  Marginals marg{Eigen::Vector3d(0.5, 0.0, 0.5), Eigen::Vector3d(0.5, 0.5, 0.0)};
  const auto plan = solve_transport_lp(cost, marg);
  CHECK(plan.matrix.row(1).isZero(0.0));
  CHECK(plan.matrix.col(2).isZero(0.0));
  check_feasible(plan, marg);
  CHECK(plan.value == doctest::Approx(oracle::transport_by_vertex_enumeration(cost, marg.p, marg.q)));
}

TEST_CASE("solver errors") {
  const Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(2, 2);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code([&] { solve_transport_lp(cost, {Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.5, 0.6)}); }) ==
        ErrorCode::kInfeasibleMarginals);
  CHECK(code([&] { solve_transport_lp(cost, {Eigen::Vector2d(1.5, -0.5), Eigen::Vector2d(0.5, 0.5)}); }) ==
        ErrorCode::kInfeasibleMarginals);
  Eigen::MatrixXd bad = cost;
  bad(0, 1) = std::numeric_limits<double>::infinity();
  CHECK(code([&] { solve_transport_lp(bad, {uniform(2), uniform(2)}); }) == ErrorCode::kNonFiniteCost);
  CHECK(code([&] { solve_transport_lp(cost, {uniform(3), uniform(2)}); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(77);
  const Eigen::MatrixXd cost = random_cost(20, 5, rng);
  const Marginals marg{uniform(20), random_simplex(5, rng)};
  const auto a = solve_transport_lp(cost, marg);
  const auto b = solve_transport_lp(cost, marg);
  CHECK(a.matrix == b.matrix);
}

TEST_CASE("partial_wasserstein_value examples") {
  // Query features copied inside the candidate.
  Eigen::MatrixXd copies(4, 2);
  copies << 0.3, 0.0, 0.0, 0.7, 0.5, 0.5, 0.9, 0.2;
  CHECK(partial_wasserstein_value(copies) == 0.0);

  // n_s == m with matching multisets.
  Eigen::MatrixXd square(2, 2);
  square << 0.4, 0.0, 0.0, 0.4;
  CHECK(partial_wasserstein_value(square) == 0.0);

  Eigen::MatrixXd m(3, 2);
  m << 0.2, 0.9, 0.8, 0.1, 0.5, 0.5;
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(3, 3);
  lifted.leftCols(2) = m;
  const double expected = oracle::transport_by_vertex_enumeration(lifted, uniform(3), uniform(3));
  // Frozen from the oracle: (0.2 + 0.1) / 3.
  CHECK(expected == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(std::abs(partial_wasserstein_value(m) - 0.1) <= 1e-12);
}

TEST_CASE("partial value is bounded below by min cost times transported mass") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index ns = 3 + t % 5;
    const Eigen::Index m = 1 + t % 3;
    Eigen::MatrixXd c(ns, m);
    for (Eigen::Index i = 0; i < ns; ++i)
      for (Eigen::Index j = 0; j < m; ++j) c(i, j) = u(rng);
    CHECK(partial_wasserstein_value(c) >= 0.5 * static_cast<double>(m) / static_cast<double>(ns) - 1e-15);
  }
}

TEST_CASE("warm-started sequence matches cold solves") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 40; ++t) {
    const Eigen::Index n = 1 + t % 5;
    const Eigen::Index m = 1 + (t / 5) % 4;
    const Marginals marg{random_simplex(n, rng, t % 3 == 0), random_simplex(m, rng, t % 4 == 0)};
    WarmTransport warm(marg);
    Eigen::MatrixXd cost = random_cost(n, m, rng);
    for (int k = 0; k < 15; ++k) {
      // Small perturbations mimic successive gradients; every fifth step jumps.
      const Eigen::MatrixXd noise = random_cost(n, m, rng);
      cost = k % 5 == 4 ? noise : Eigen::MatrixXd(cost + 0.05 * noise);
      const auto plan = warm.solve(cost);
      CHECK(std::abs(plan.value - oracle::transport_by_vertex_enumeration(cost, marg.p, marg.q)) <= 1e-10);
      check_feasible(plan, marg);
    }
  }
  WarmTransport warm(Marginals{uniform(2), uniform(3)});
  CHECK_THROWS_AS(warm.solve(Eigen::MatrixXd::Zero(3, 2)), Error);
  CHECK_THROWS_AS(WarmTransport(Marginals{uniform(2), Eigen::VectorXd::Constant(3, 1.0)}), Error);
}
