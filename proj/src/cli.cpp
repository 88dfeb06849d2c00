#include "subgraph_ot/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "subgraph_ot/error.hpp"
#include "subgraph_ot/graph_io.hpp"
#include "subgraph_ot/matcher.hpp"
#include "subgraph_ot/synth_bench.hpp"

namespace subgraph_ot {
namespace {

struct MatchFlags {
  std::string source;
  std::string query;
  double alpha = 0.5;
  double delta = 1e-9;
  int max_iter = 1000;
  bool no_normalize = false;
  std::string out;
  double threshold = 1.0;
  unsigned workers = 1;
};

struct BenchFlags {
  std::size_t n = 100;
  std::size_t m = 5;
  std::size_t trials = 500;
  double noise = 0.0;
  std::string method = "ssot";
  std::uint64_t seed = 0;
  std::string features = "uniform";
  std::string csv;
  std::string summary_csv;
  double query_edge_prob = 0.5;
  double degree = 3.0;
  double alpha = 0.5;
  double delta = 1e-9;
  int max_iter = 1000;
  bool no_normalize = false;
  double threshold = 1.0;
  bool no_timing = false;
};

void add_solver_flags(CLI::App* cmd, double& alpha, double& delta, int& max_iter, bool& no_normalize) {
  cmd->add_option("--alpha", alpha, "feature/structure trade-off in [0,1]")->capture_default_str();
  cmd->add_option("--delta", delta, "Frank-Wolfe convergence tolerance")->capture_default_str();
  cmd->add_option("--max-iter", max_iter, "Frank-Wolfe iteration cap")->capture_default_str();
  cmd->add_flag("--no-normalize", no_normalize, "disable n/m and n^2/m^2 term scaling");
}

std::string check_solver_flags(double alpha, double delta, int max_iter) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) return "--alpha must lie in [0, 1]";
  if (!(delta > 0.0)) return "--delta must be positive";
  if (max_iter <= 0) return "--max-iter must be positive";
  return {};
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += sep;
    s += items[i];
  }
  return s;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoCandidates:
      return kExitNoCandidates;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDisconnectedGraph:
    case ErrorCode::kDisconnectedQuery:
    case ErrorCode::kFeatureKindMismatch:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kQueryTooLarge:
    case ErrorCode::kParseError:
    case ErrorCode::kDanglingEdge:
    case ErrorCode::kDuplicateNode:
    case ErrorCode::kDuplicateEdge:
    case ErrorCode::kIoError:
      return kExitInputError;
    default:
      return kExitSolverError;
  }
}

void print_result(std::ostream& out, const MatchResult& r, bool ssot) {
  std::vector<std::string> pairs;
  for (const auto& [q, s] : r.mapping) pairs.push_back(q + ":" + s);
  out.precision(17);
  out << "objective=" << r.objective << '\n';
  out << "matched=" << join(r.matched_nodes, ',') << '\n';
  out << "mapping=" << join(pairs, ',') << '\n';
  out << "iterations=" << r.iterations << " converged=" << (r.converged ? "true" : "false") << '\n';
  if (ssot) {
    out << "candidates_generated=" << r.candidate_stats.generated << " candidates_filtered="
        << r.candidate_stats.filtered << " candidates_solved=" << r.candidate_stats.solved << '\n';
  }
  out.precision(6);
  out << "elapsed_s=" << r.elapsed_seconds << '\n';
}

int run_match(const MatchFlags& flags, bool ssot, std::ostream& out, std::ostream& err) {
  if (auto msg = check_solver_flags(flags.alpha, flags.delta, flags.max_iter); !msg.empty()) {
    err << "error: " << msg << '\n';
    return kExitInputError;
  }
  if (ssot && !(flags.threshold > 0.0)) {
    err << "error: --threshold must be positive\n";
    return kExitInputError;
  }
  if (ssot && flags.workers == 0) {
    err << "error: --workers must be positive\n";
    return kExitInputError;
  }

  Graph source;
  Graph query;
  try {
    source = load_graph(flags.source);
    query = load_graph(flags.query);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  if (!ssot && query.size() >= source.size()) {
    err << "error: query too large (" << query.size() << " query nodes, " << source.size() << " source nodes)\n";
    return kExitInputError;
  }
  if (ssot && query.size() > source.size()) {
    err << "error: query too large (" << query.size() << " query nodes, " << source.size() << " source nodes)\n";
    return kExitInputError;
  }

  try {
    MatchResult result;
    if (ssot) {
      SsotConfig cfg;
      cfg.alpha = flags.alpha;
      cfg.delta = flags.delta;
      cfg.max_iter = flags.max_iter;
      cfg.normalize = !flags.no_normalize;
      cfg.feature_threshold = flags.threshold;
      cfg.workers = flags.workers;
      result = ssot_match(source, query, cfg);
    } else {
      result = sot_match(source, query, {flags.alpha, !flags.no_normalize, flags.delta, flags.max_iter});
    }
    print_result(out, result, ssot);
    if (!flags.out.empty()) save_result(result, flags.out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::kNoCandidates) {
      err << "hint: every candidate was filtered out; raise --threshold\n";
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverError;
  }
  return kExitOk;
}

std::filesystem::path default_summary_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p.replace_extension();
  p += ".summary.csv";
  return p;
}

int run_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err) {
  if (auto msg = check_solver_flags(flags.alpha, flags.delta, flags.max_iter); !msg.empty()) {
    err << "error: " << msg << '\n';
    return kExitInputError;
  }
  if (!(flags.threshold > 0.0)) {
    err << "error: --threshold must be positive\n";
    return kExitInputError;
  }
  ErConfig cfg;
  cfg.n = flags.n;
  cfg.m = flags.m;
  cfg.trials = flags.trials;
  cfg.noise_sigma = flags.noise;
  cfg.seed = flags.seed;
  cfg.query_edge_prob = flags.query_edge_prob;
  cfg.target_avg_degree = flags.degree;
  cfg.feature_model = flags.features == "levels20" ? FeatureModel::kLevels20 : FeatureModel::kUniform;
  try {
    validate(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  const Method method = flags.method == "sot" ? Method::kSot : Method::kSsot;
  SsotConfig match;
  match.alpha = flags.alpha;
  match.delta = flags.delta;
  match.max_iter = flags.max_iter;
  match.normalize = !flags.no_normalize;
  match.feature_threshold = flags.threshold;

  const std::filesystem::path csv_path = flags.csv;
  const std::filesystem::path summary_path =
      flags.summary_csv.empty() ? default_summary_path(csv_path) : std::filesystem::path(flags.summary_csv);
  std::ofstream csv(csv_path, std::ios::binary);
  std::ofstream summary_csv(summary_path, std::ios::binary);
  if (!csv || !summary_csv) {
    err << "error: cannot open output CSV files\n";
    return kExitInputError;
  }

  BenchReport report;
  try {
    report = run_benchmark(cfg, method, match);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverError;
  }
  write_records_csv(csv, report.records, !flags.no_timing);
  write_summary_csv(summary_csv, report.summary, !flags.no_timing);
  out << "method=" << to_string(report.summary.method) << " trials=" << report.summary.trials
      << " success_rate=" << report.summary.success_rate
      << " mean_query_time_s=" << report.summary.mean_query_time_seconds << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgraph matching by partial fused Gromov-Wasserstein transport", "subgraph-ot"};
  app.require_subcommand(1);

  MatchFlags match_flags;
  auto* match = app.add_subcommand("match", "match a query inside a source graph with one global solve");
  match->add_option("--source", match_flags.source, "source graph file")->required();
  match->add_option("--query", match_flags.query, "query graph file")->required();
  add_solver_flags(match, match_flags.alpha, match_flags.delta, match_flags.max_iter, match_flags.no_normalize);
  match->add_option("--out", match_flags.out, "write the result document here");

  MatchFlags ssot_flags;
  auto* ssot = app.add_subcommand("ssot", "match a query by sliding k-hop candidate subgraphs");
  ssot->add_option("--source", ssot_flags.source, "source graph file")->required();
  ssot->add_option("--query", ssot_flags.query, "query graph file")->required();
  add_solver_flags(ssot, ssot_flags.alpha, ssot_flags.delta, ssot_flags.max_iter, ssot_flags.no_normalize);
  ssot->add_option("--out", ssot_flags.out, "write the result document here");
  ssot->add_option("--threshold", ssot_flags.threshold, "feature filter threshold (> 0)")->capture_default_str();
  ssot->add_option("--workers", ssot_flags.workers, "threads for candidate solves")->capture_default_str();

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "run the Erdos-Renyi planted-query benchmark");
  bench->add_option("--n", bench_flags.n, "source graph size")->capture_default_str();
  bench->add_option("--m", bench_flags.m, "query graph size")->capture_default_str();
  bench->add_option("--trials", bench_flags.trials, "number of trials")->capture_default_str();
  bench->add_option("--noise", bench_flags.noise, "std of Gaussian noise on query features")->capture_default_str();
  bench->add_option("--method", bench_flags.method, "sot or ssot")
      ->check(CLI::IsMember({"sot", "ssot"}))
      ->capture_default_str();
  bench->add_option("--seed", bench_flags.seed, "base random seed")->capture_default_str();
  bench->add_option("--features", bench_flags.features, "uniform or levels20")
      ->check(CLI::IsMember({"uniform", "levels20"}))
      ->capture_default_str();
  bench->add_option("--csv", bench_flags.csv, "per-trial CSV output")->required();
  bench->add_option("--summary-csv", bench_flags.summary_csv, "summary CSV output (default: <csv>.summary.csv)");
  bench->add_option("--query-edge-prob", bench_flags.query_edge_prob, "query ER edge probability")
      ->capture_default_str();
  bench->add_option("--degree", bench_flags.degree, "target average source degree")->capture_default_str();
  add_solver_flags(bench, bench_flags.alpha, bench_flags.delta, bench_flags.max_iter, bench_flags.no_normalize);
  bench->add_option("--threshold", bench_flags.threshold, "SSOT feature filter threshold")->capture_default_str();
  bench->add_flag("--no-timing", bench_flags.no_timing, "write 0 for timing columns (reproducible CSV)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << active->help();
    return kExitInputError;
  }

  if (match->parsed()) return run_match(match_flags, false, out, err);
  if (ssot->parsed()) return run_match(ssot_flags, true, out, err);
  return run_bench(bench_flags, out, err);
}

}  // namespace subgraph_ot
