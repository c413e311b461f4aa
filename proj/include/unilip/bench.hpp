#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "unilip/core.hpp"
#include "unilip/oracle.hpp"
#include "unilip/solve.hpp"

// Benchmark matrices over (problem, method) cells with per-method averages,
// rendered as CSV or Markdown tables (problems as rows, methods as columns,
// a final Average row).

namespace unilip {

struct BenchOptions {
  double eps = 1e-4;
  bool eps_relative = true;
  double xi = 1e-8;
  std::optional<double> delta;
  std::size_t max_trials = 1'000'000;
  double r = 1.1;
  bool r_auto = false;          // retry failures with r stepped by 0.1
  double r_max = 3.0;           // give up threshold for r_auto
  std::size_t oracle_n = kOracleDefaultGrid;  // grid for missing known constants
  unsigned parallel = 1;
};

struct BenchRow {
  std::string problem;
  std::string method;
  std::optional<double> r;      // absent for known-constant methods
  double eps_eff = 0.0;
  std::size_t trials = 0;
  double best_x = std::numeric_limits<double>::quiet_NaN();
  double best_f = std::numeric_limits<double>::quiet_NaN();
  std::string status;           // converged | trial-cap-reached | rejected | run-error
  bool success = false;
};

struct BenchReport {
  std::vector<std::string> methods;
  std::vector<std::string> problems;
  std::vector<BenchRow> rows;   // problem-major: rows[p * methods.size() + m]

  const BenchRow& at(std::size_t problem, std::size_t method) const {
    return rows[problem * methods.size() + method];
  }

  // Mean trial count over the successful rows of one method; NaN when the
  // method never succeeded.
  double average(std::size_t method) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < problems.size(); ++p) {
      const BenchRow& row = at(p, method);
      if (row.success) {
        sum += static_cast<double>(row.trials);
        ++n;
      }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : sum / static_cast<double>(n);
  }
};

inline bool bench_success(const Problem& p, double eps_eff, const RunResult& r) {
  if (p.known_min_x) return std::abs(r.best_x - *p.known_min_x) <= eps_eff;
  return r.status == RunStatus::Converged;
}

namespace detail {

inline BenchRow run_cell(const Problem& p, const std::string& label,
                         const BenchOptions& opt) {
  MethodConfig base;
  base.eps = opt.eps;
  base.eps_relative = opt.eps_relative;
  base.xi = opt.xi;
  base.delta = opt.delta;
  base.max_trials = opt.max_trials;
  base.r = opt.r;
  MethodConfig config = config_for_label(label, base);

  BenchRow row;
  row.problem = p.name;
  row.method = label;
  row.eps_eff = config.effective_eps(p);

  const bool adaptive = config.estimator != Estimator::KnownConstant;
  // r stepped in exact tenths so retries and reruns agree bit-for-bit
  int r_tenths = static_cast<int>(std::lround(opt.r * 10.0));
  const int r_tenths_max = static_cast<int>(std::lround(opt.r_max * 10.0));

  for (;;) {
    if (adaptive) {
      config.r = static_cast<double>(r_tenths) / 10.0;
      row.r = config.r;
    }
    try {
      const RunResult res = solve(p, config);
      row.trials = res.n_trials;
      row.best_x = res.best_x;
      row.best_f = res.best_f;
      row.status = to_string(res.status);
      row.success = res.status != RunStatus::Rejected && bench_success(p, row.eps_eff, res);
    } catch (const Error&) {
      row.trials = 0;
      row.best_x = std::numeric_limits<double>::quiet_NaN();
      row.best_f = std::numeric_limits<double>::quiet_NaN();
      row.status = "run-error";
      row.success = false;
    }
    if (row.success || !opt.r_auto || !adaptive || r_tenths >= r_tenths_max) break;
    r_tenths += 1;
  }
  return row;
}

}  // namespace detail

// Fills missing known constants from the oracle so the known-constant methods
// can run.  Fixture-provided constants are kept.
inline void seed_known_constants(std::vector<Problem>& problems, std::size_t oracle_n) {
  for (Problem& p : problems) {
    if (p.known_L && (p.known_M || !p.has_derivative())) continue;
    auto [l_hat, m_hat] = estimate_constants(p, oracle_n);
    if (!p.known_L) p.known_L = l_hat;
    if (!p.known_M && m_hat) p.known_M = m_hat;
  }
}

// Runs every method on every problem.  Cells are independent jobs; with
// parallel > 1 they are distributed over worker threads and assembled in a
// fixed order, so the report does not depend on scheduling.
inline BenchReport run_bench(std::vector<Problem> problems,
                             const std::vector<std::string>& methods,
                             const BenchOptions& opt) {
  for (const std::string& label : methods) config_for_label(label);  // fail fast

  bool needs_constants = false;
  for (const std::string& label : methods)
    if (config_for_label(label).estimator == Estimator::KnownConstant) needs_constants = true;
  if (needs_constants) seed_known_constants(problems, opt.oracle_n);

  BenchReport report;
  report.methods = methods;
  for (const Problem& p : problems) report.problems.push_back(p.name);
  report.rows.resize(problems.size() * methods.size());

  const std::size_t cells = report.rows.size();
  auto work = [&](std::size_t idx) {
    const std::size_t pi = idx / methods.size();
    const std::size_t mi = idx % methods.size();
    report.rows[idx] = detail::run_cell(problems[pi], methods[mi], opt);
  };

  const unsigned workers = std::min<unsigned>(std::max(1u, opt.parallel),
                                              static_cast<unsigned>(cells ? cells : 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells) return;
          work(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return report;
}

// ---- rendering ---------------------------------------------------------------

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace detail

// CSV with the fixed column set; full precision for the coordinates so rows
// re-parse to the exact values.
inline void render_csv(const BenchReport& report, std::ostream& out) {
  out << "problem,method,r,eps,trials,best_x,best_f,status,success\n";
  for (const BenchRow& row : report.rows) {
    out << row.problem << ',' << row.method << ','
        << (row.r ? detail::fmt("%g", *row.r) : std::string()) << ','
        << detail::fmt("%g", row.eps_eff) << ',' << row.trials << ','
        << detail::fmt("%.17g", row.best_x) << ','
        << detail::fmt("%.17g", row.best_f) << ',' << row.status << ','
        << (row.success ? '1' : '0') << '\n';
  }
}

// Markdown table: one row per problem, one column per method, trials per
// cell ('!' marks an unsuccessful cell), then the Average row (2 decimals,
// successful rows only).  Mixed reliability parameters are footnoted.
inline void render_markdown(const BenchReport& report, std::ostream& out) {
  out << "| Problem |";
  for (const auto& m : report.methods) out << ' ' << m << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < report.methods.size(); ++i) out << "---:|";
  out << '\n';
  for (std::size_t p = 0; p < report.problems.size(); ++p) {
    out << "| " << report.problems[p] << " |";
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      const BenchRow& row = report.at(p, m);
      out << ' ' << row.trials << (row.success ? "" : "!") << " |";
    }
    out << '\n';
  }
  out << "| Average |";
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const double avg = report.average(m);
    out << ' ' << (std::isnan(avg) ? std::string("-") : detail::fmt("%.2f", avg)) << " |";
  }
  out << '\n';

  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    std::map<std::string, std::size_t> used;
    for (std::size_t p = 0; p < report.problems.size(); ++p) {
      const BenchRow& row = report.at(p, m);
      if (row.r) ++used[detail::fmt("%g", *row.r)];
    }
    if (used.size() > 1) {
      out << "\n" << report.methods[m] << ": r =";
      bool first = true;
      for (const auto& [r, count] : used) {
        out << (first ? " " : ", ") << r << " (" << count << "x)";
        first = false;
      }
      out << '\n';
    }
  }
}

inline void render_report(const BenchReport& report, const std::string& format,
                          std::ostream& out) {
  if (format == "csv") render_csv(report, out);
  else if (format == "md") render_markdown(report, out);
  else throw ConfigError("unknown report format: " + format);
}

// Ordered trial trace of a run: the data behind convergence plots.
inline void render_trace(const RunResult& result, std::ostream& out) {
  out << "k,x,z,dz\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const Trial& t = result.trials[i];
    out << (i + 1) << ',' << detail::fmt("%.17g", t.x) << ','
        << detail::fmt("%.17g", t.z) << ','
        << (t.dz ? detail::fmt("%.17g", *t.dz) : std::string()) << '\n';
  }
}

}  // namespace unilip
