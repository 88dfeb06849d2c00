#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "subgraph_ot/error.hpp"
#include "subgraph_ot/synth_bench.hpp"

using namespace subgraph_ot;

namespace {

double scalar(const Graph& g, std::size_t i) { return std::get<RealVector>(g.feature(i)).values[0]; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("generated instance shape and planted copy") {
  ErConfig cfg;
  const ErInstance inst = generate_er_instance(cfg, trial_seed(0, 0));
  REQUIRE(inst.source.size() == 100);
  REQUIRE(inst.query.size() == 5);
  REQUIRE(inst.planted.size() == 5);
  CHECK(std::set<std::size_t>(inst.planted.begin(), inst.planted.end()).size() == 5);
  CHECK(query_radius(inst.query) >= 1);
  for (std::size_t a = 0; a < 5; ++a) {
    CHECK(scalar(inst.query, a) == scalar(inst.source, inst.planted[a]));
    CHECK(scalar(inst.query, a) >= 0.0);
    CHECK(scalar(inst.query, a) <= 1.0);
    for (std::size_t b = 0; b < 5; ++b) {
      CHECK(inst.query.adjacent(a, b) == inst.source.adjacent(inst.planted[a], inst.planted[b]));
    }
  }
}

TEST_CASE("levels20 features and noise") {
  ErConfig cfg;
  cfg.feature_model = FeatureModel::kLevels20;
  const ErInstance clean = generate_er_instance(cfg, 7);
  for (std::size_t i = 0; i < clean.source.size(); ++i) {
    const double x = scalar(clean.source, i) * 20.0;
    CHECK(x == std::round(x));
    CHECK(x >= 1.0);
    CHECK(x <= 20.0);
  }
  cfg.noise_sigma = 0.2;
  const ErInstance noisy = generate_er_instance(cfg, 7);
  double moved = 0.0;
  for (std::size_t a = 0; a < noisy.query.size(); ++a) {
    moved += std::abs(scalar(noisy.query, a) - scalar(noisy.source, noisy.planted[a]));
  }
  CHECK(moved > 0.0);
}

TEST_CASE("same seed gives the same instance") {
  ErConfig cfg;
  cfg.noise_sigma = 0.3;
  const ErInstance a = generate_er_instance(cfg, 42);
  const ErInstance b = generate_er_instance(cfg, 42);
  CHECK(a.source == b.source);
  CHECK(a.query == b.query);
  CHECK(a.planted == b.planted);
  const ErInstance c = generate_er_instance(cfg, 43);
  CHECK_FALSE(a.source == c.source);
  CHECK(trial_seed(5, 1) == trial_seed(5, 1));
  CHECK(trial_seed(5, 1) != trial_seed(5, 2));
  CHECK(trial_seed(5, 1) != trial_seed(6, 1));
}

TEST_CASE("mean source degree near the target") {
  ErConfig cfg;
  double total = 0.0;
  for (std::size_t t = 0; t < 100; ++t) {
    const ErInstance inst = generate_er_instance(cfg, trial_seed(1, t));
    total += 2.0 * static_cast<double>(inst.source.edge_count()) / static_cast<double>(inst.source.size());
  }
  const double mean = total / 100.0;
  CHECK(mean >= 2.5);
  CHECK(mean <= 3.5);
}

TEST_CASE("config validation") {
  auto code = [](const ErConfig& c) {
    try {
      validate(c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  ErConfig c;
  CHECK(code(c) == ErrorCode::kIoError);
  c.m = 100;
  CHECK(code(c) == ErrorCode::kInvalidArgument);
  c = {};
  c.m = 0;
  CHECK(code(c) == ErrorCode::kInvalidArgument);
  c = {};
  c.trials = 0;
  CHECK(code(c) == ErrorCode::kInvalidArgument);
  c = {};
  c.noise_sigma = -0.1;
  CHECK(code(c) == ErrorCode::kInvalidArgument);
  c = {};
  c.query_edge_prob = 1.5;
  CHECK(code(c) == ErrorCode::kInvalidArgument);
}

TEST_CASE("single recoverable trial succeeds") {
  ErConfig cfg;
  cfg.n = 8;
  cfg.m = 3;
  cfg.trials = 1;
  // First seed whose instance the brute-force oracle certifies: the planted
  // assignment is the only zero-cost one.
  bool found = false;
  for (cfg.seed = 0; cfg.seed < 20 && !found; ++cfg.seed) {
    const ErInstance inst = generate_er_instance(cfg, trial_seed(cfg.seed, 0));
    const FgwProblem prob = build_sot_problem(inst.source, inst.query, {});
    const auto zeros = oracle::zero_cost_assignments(prob.feature_cost.leftCols(3), prob.source_structure,
                                                     prob.query_structure, 0.5);
    found = zeros.size() == 1 && zeros[0] == inst.planted;
  }
  REQUIRE(found);
  --cfg.seed;
  SsotConfig mc;
  mc.feature_threshold = 1e-9;
  for (Method method : {Method::kSot, Method::kSsot}) {
    const BenchReport report = run_benchmark(cfg, method, mc);
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].success);
    CHECK(report.summary.success_rate == 1.0);
    CHECK(report.records[0].objective <= 1e-8);
    CHECK(report.records[0].seed == trial_seed(cfg.seed, 0));
  }
}

TEST_CASE("failing matcher counts as failure") {
  ErConfig cfg;
  cfg.n = 30;
  cfg.m = 3;
  cfg.trials = 4;
  cfg.noise_sigma = 0.5;
  SsotConfig mc;
  mc.feature_threshold = 1e-300;
  const BenchReport report = run_benchmark(cfg, Method::kSsot, mc);
  REQUIRE(report.records.size() == 4);
  CHECK(report.summary.success_rate == 0.0);
  for (const auto& r : report.records) {
    CHECK_FALSE(r.success);
    CHECK(std::isnan(r.objective));
  }
}

TEST_CASE("summary arithmetic") {
  std::vector<BenchRecord> records(4);
  records[0].success = true;
  records[2].success = true;
  records[3].success = true;
  for (std::size_t i = 0; i < 4; ++i) records[i].query_time_seconds = static_cast<double>(i + 1);
  const BenchSummary s = summarize(Method::kSot, records);
  CHECK(s.trials == 4);
  CHECK(s.success_rate == 0.75);
  CHECK(s.mean_query_time_seconds == 2.5);
  CHECK(summarize(Method::kSot, {}).success_rate == 0.0);
}

TEST_CASE("csv output") {
  std::vector<BenchRecord> records(2);
  records[0] = {0, Method::kSsot, true, 0.0, 0.5, 17};
  records[1] = {1, Method::kSsot, false, std::nan(""), 0.25, 18};
  std::ostringstream timed;
  write_records_csv(timed, records);
  const auto lines = lines_of(timed.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "trial,method,success,objective,query_time_s,seed");
  CHECK(lines[1] == "0,SSOT,1,0,0.5,17");
  CHECK(lines[2] == "1,SSOT,0,nan,0.25,18");

  std::ostringstream untimed;
  write_records_csv(untimed, records, false);
  CHECK(lines_of(untimed.str())[1] == "0,SSOT,1,0,0,17");

  std::ostringstream summary;
  write_summary_csv(summary, summarize(Method::kSsot, records));
  const auto slines = lines_of(summary.str());
  REQUIRE(slines.size() == 2);
  CHECK(slines[0] == "method,trials,success_rate,mean_query_time_s");
  CHECK(slines[1] == "SSOT,2,0.5,0.375");
}
