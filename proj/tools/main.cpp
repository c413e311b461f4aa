// Command-line front end: single solves with optional trace dump, benchmark
// matrices over problem suites, and the brute-force oracle.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unilip/unilip.hpp"

namespace {

struct ProblemArgs {
  std::string fixture;
  std::optional<double> pinter_x_star;
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& args) {
  auto* fixture = cmd->add_option("--problem", args.fixture, "fixture file defining the problem");
  auto* pinter = cmd->add_option("--pinter", args.pinter_x_star,
                                 "instance of the randomized test class with this minimizer");
  fixture->excludes(pinter);
  pinter->excludes(fixture);
}

unilip::Problem resolve_problem(const ProblemArgs& args) {
  if (args.pinter_x_star) return unilip::pinter_problem(*args.pinter_x_star);
  if (!args.fixture.empty()) return unilip::load_fixture(args.fixture);
  throw unilip::ConfigError("no problem given: use --problem <fixture> or --pinter <x*>");
}

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_solve(const ProblemArgs& pargs, const std::string& label, double r, double eps,
              bool eps_absolute, std::optional<double> delta, double xi,
              std::size_t max_trials, const std::string& trace_path) {
  const unilip::Problem problem = resolve_problem(pargs);

  unilip::MethodConfig config;
  config.r = r;
  config.eps = eps;
  config.eps_relative = !eps_absolute;
  config.delta = delta;
  config.xi = xi;
  config.max_trials = max_trials;
  config = unilip::config_for_label(label, config);
  unilip::validate_config(config);

  if (auto why = unilip::validate_problem(problem, config)) {
    std::cerr << "error: " << *why << "\n";
    return 2;
  }

  const unilip::RunResult result = unilip::solve(problem, config);

  std::cout << "problem:  " << problem.name << "\n"
            << "method:   " << result.method_label << "\n"
            << "trials:   " << result.n_trials << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", result.best_x);
  std::cout << "best_x:   " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.12g", result.best_f);
  std::cout << "best_f:   " << buf << "\n"
            << "status:   " << unilip::to_string(result.status) << "\n";

  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw unilip::ConfigError("cannot open trace file: " + trace_path);
    unilip::render_trace(result, out);
  }
  return 0;
}

int cmd_bench(const std::string& suite, std::uint64_t seed, std::size_t count,
              const std::vector<std::string>& fixtures, const std::string& methods_csv,
              const unilip::BenchOptions& options, const std::string& format,
              const std::string& out_path) {
  if (suite != "pinter" && !(suite.empty() && !fixtures.empty()))
    throw unilip::ConfigError("unknown suite: " + suite);

  std::vector<unilip::Problem> problems;
  if (suite == "pinter") {
    for (auto& inst : unilip::pinter_suite(seed, count))
      problems.push_back(std::move(inst.problem));
  }
  for (const std::string& path : fixtures) problems.push_back(unilip::load_fixture(path));

  std::vector<std::string> methods = split_labels(methods_csv);
  if (methods.empty()) methods = unilip::all_method_labels();

  const unilip::BenchReport report = unilip::run_bench(std::move(problems), methods, options);

  if (out_path.empty()) {
    unilip::render_report(report, format, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw unilip::ConfigError("cannot open output file: " + out_path);
    unilip::render_report(report, format, out);
  }

  bool any_error = false, all_success = true;
  for (const auto& row : report.rows) {
    if (row.status == "run-error") any_error = true;
    if (!row.success) all_success = false;
  }
  if (all_success) return 0;
  return any_error ? 1 : 1;
}

int cmd_oracle(const ProblemArgs& pargs, std::size_t n) {
  const unilip::Problem problem = resolve_problem(pargs);
  const unilip::OracleReport rep = unilip::oracle_report(problem, n);
  char buf[64];
  std::cout << "problem:  " << problem.name << "\n"
            << "grid_n:   " << rep.grid_n << "\n";
  std::snprintf(buf, sizeof(buf), "%.12g", rep.x_min);
  std::cout << "x_min:    " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.12g", rep.f_min);
  std::cout << "f_min:    " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.12g", rep.L_hat);
  std::cout << "L_hat:    " << buf << "\n";
  if (rep.M_hat) {
    std::snprintf(buf, sizeof(buf), "%.12g", *rep.M_hat);
    std::cout << "M_hat:    " << buf << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Univariate Lipschitz global optimization toolbox"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one method on one problem");
  ProblemArgs solve_problem;
  add_problem_flags(solve, solve_problem);
  std::string method = "GE";
  double r = 1.1, eps = 1e-4, xi = 1e-8;
  bool eps_absolute = false;
  std::optional<double> delta;
  std::size_t max_trials = 1'000'000;
  std::string trace_path;
  solve->add_option("--method", method, "method label (PKC, GE, LT, DKC, ... with optional _LI)")
      ->required();
  solve->add_option("--r", r, "reliability parameter (> 1, adaptive estimators only)");
  solve->add_option("--eps", eps, "stopping accuracy");
  solve->add_flag("--eps-absolute", eps_absolute, "treat --eps as absolute, not scaled by b-a");
  solve->add_option("--delta", delta, "local-improvement width gate (defaults to the effective eps)");
  solve->add_option("--xi", xi, "floor for adaptive Lipschitz estimates");
  solve->add_option("--max-trials", max_trials, "trial cap");
  solve->add_option("--trace", trace_path, "write the trial trace as CSV to this file");

  // bench
  auto* bench = app.add_subcommand("bench", "run a method x suite benchmark matrix");
  std::string suite = "pinter";
  std::uint64_t seed = 42;
  std::size_t count = 100;
  std::vector<std::string> fixtures;
  std::string methods_csv;
  unilip::BenchOptions options;
  std::string format = "csv";
  std::string out_path;
  bench->add_option("--suite", suite, "problem suite (pinter)");
  bench->add_option("--seed", seed, "suite generator seed");
  bench->add_option("--count", count, "number of suite instances");
  bench->add_option("--fixture", fixtures, "add a fixture problem (repeatable)");
  bench->add_option("--methods", methods_csv, "comma-separated method labels (default: all 12)");
  bench->add_option("--eps", options.eps, "stopping accuracy");
  bool bench_eps_absolute = false;
  bench->add_flag("--eps-absolute", bench_eps_absolute, "treat --eps as absolute, not scaled by b-a");
  bench->add_option("--xi", options.xi, "floor for adaptive Lipschitz estimates");
  bench->add_option("--delta", options.delta, "local-improvement width gate");
  bench->add_option("--max-trials", options.max_trials, "trial cap per run");
  auto* r_opt = bench->add_option("--r", options.r, "reliability parameter");
  bench->add_flag("--r-auto", options.r_auto,
                  "start at r=1.1 and retry failing problems with r stepped by 0.1")
      ->excludes(r_opt);
  bench->add_option("--oracle-n", options.oracle_n, "oracle grid for missing known constants");
  bench->add_option("--parallel", options.parallel, "worker threads for the matrix");
  bench->add_option("--format", format, "report format: csv or md")
      ->check(CLI::IsMember({"csv", "md"}));
  bench->add_option("--out", out_path, "write the report to this file instead of stdout");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "brute-force minimum and Lipschitz estimates");
  ProblemArgs oracle_problem;
  add_problem_flags(oracle, oracle_problem);
  std::size_t oracle_n = unilip::kOracleDefaultGrid;
  oracle->add_option("--n", oracle_n, "grid size");

  try {
    app.parse(argc, argv);
    if (solve->parsed())
      return cmd_solve(solve_problem, method, r, eps, eps_absolute, delta, xi, max_trials,
                       trace_path);
    if (bench->parsed()) {
      options.eps_relative = !bench_eps_absolute;
      if (options.r_auto) options.r = 1.1;
      return cmd_bench(suite, seed, count, fixtures, methods_csv, options, format, out_path);
    }
    if (oracle->parsed()) return cmd_oracle(oracle_problem, oracle_n);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const unilip::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const unilip::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const unilip::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
