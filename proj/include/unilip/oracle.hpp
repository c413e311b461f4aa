#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>

#include "unilip/core.hpp"

// Brute-force ground truth: dense-grid global minimization and sampled
// over-estimates of the Lipschitz constants of f and f'.  Used to seed the
// known-constant methods and to validate minorant invariants.

namespace unilip {

// Sampled divided differences under-estimate the true suprema; the
// known-constant methods need over-estimates, hence the inflation factor.
inline constexpr double kOracleSafetyFactor = 1.01;
inline constexpr std::size_t kOracleDefaultGrid = 1'000'001;

struct OracleReport {
  std::size_t grid_n = 0;
  double x_min = 0.0;
  double f_min = 0.0;
  double L_hat = 0.0;
  std::optional<double> M_hat;
};

namespace detail {

inline double oracle_eval(const std::function<double(double)>& fn, double x,
                          const char* what) {
  const double v = fn(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "oracle: non-finite " << what << " value at x=" << x;
    throw RunError(os.str());
  }
  return v;
}

inline double grid_point(const Problem& p, std::size_t i, std::size_t n) {
  if (i + 1 == n) return p.b;
  return p.a + (p.b - p.a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace detail

// Minimum of f over n uniformly spaced points including both endpoints.
// Ties keep the leftmost abscissa.
inline std::pair<double, double> grid_min(const Problem& p, std::size_t n) {
  if (n < 2) throw ConfigError("grid_min: need at least 2 grid points");
  double best_x = p.a;
  double best_f = detail::oracle_eval(p.f, p.a, "objective");
  for (std::size_t i = 1; i < n; ++i) {
    const double x = detail::grid_point(p, i, n);
    const double v = detail::oracle_eval(p.f, x, "objective");
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

// Sampled Lipschitz constants: max adjacent divided difference of f (and of
// f' when available), inflated by the safety factor.
inline std::pair<double, std::optional<double>> estimate_constants(const Problem& p,
                                                                   std::size_t n) {
  if (n < 2) throw ConfigError("estimate_constants: need at least 2 grid points");
  double l_max = 0.0, m_max = 0.0;
  double prev_x = p.a;
  double prev_f = detail::oracle_eval(p.f, p.a, "objective");
  double prev_df = p.has_derivative() ? detail::oracle_eval(p.df, p.a, "derivative") : 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double x = detail::grid_point(p, i, n);
    const double dx = x - prev_x;
    const double f = detail::oracle_eval(p.f, x, "objective");
    l_max = std::max(l_max, std::abs(f - prev_f) / dx);
    if (p.has_derivative()) {
      const double df = detail::oracle_eval(p.df, x, "derivative");
      m_max = std::max(m_max, std::abs(df - prev_df) / dx);
      prev_df = df;
    }
    prev_x = x;
    prev_f = f;
  }
  std::optional<double> m_hat;
  if (p.has_derivative()) m_hat = kOracleSafetyFactor * m_max;
  return {kOracleSafetyFactor * l_max, m_hat};
}

inline OracleReport oracle_report(const Problem& p, std::size_t n = kOracleDefaultGrid) {
  OracleReport rep;
  rep.grid_n = n;
  auto [x_min, f_min] = grid_min(p, n);
  rep.x_min = x_min;
  rep.f_min = f_min;
  auto [l_hat, m_hat] = estimate_constants(p, n);
  rep.L_hat = l_hat;
  rep.M_hat = m_hat;
  return rep;
}

}  // namespace unilip
