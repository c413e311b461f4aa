#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include "unilip/core.hpp"
#include "unilip/engine.hpp"

// Piece-wise linear scheme: Lipschitz-constant estimators for f, tent
// characteristics, trial placement, and the lower-bound evaluator C^k.

namespace unilip {

// |z1 - z0| / (x1 - x0), the divided-difference magnitude of an interval.
inline double rate_H(double x0, double x1, double z0, double z1) {
  if (!(x1 > x0)) throw RunError("rate_H: zero-width interval");
  return std::abs(z1 - z0) / (x1 - x0);
}

// Single global estimate l = r * max{xi, H^k} shared by every interval.
inline double estimate_global(const std::vector<double>& rates, double r, double xi) {
  double hmax = 0.0;
  for (double h : rates) hmax = std::max(hmax, h);
  return r * std::max(xi, hmax);
}

// Local tuning: per-interval l_j = r * max{lambda_j, gamma_j, xi}, where
// lambda_j is the neighborhood rate (truncated at the ends) and gamma_j the
// width-scaled global rate.
inline std::vector<double> estimate_local_tuning(const IntervalTable& t,
                                                 const std::vector<double>& rates,
                                                 double r, double xi) {
  const std::size_t m = rates.size();
  double hmax = 0.0, wmax = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    hmax = std::max(hmax, rates[j]);
    wmax = std::max(wmax, t.width(j));
  }
  std::vector<double> l(m);
  for (std::size_t j = 0; j < m; ++j) {
    double lambda = rates[j];
    if (j > 0) lambda = std::max(lambda, rates[j - 1]);
    if (j + 1 < m) lambda = std::max(lambda, rates[j + 1]);
    const double gamma = hmax * t.width(j) / wmax;
    l[j] = r * std::max({lambda, gamma, xi});
  }
  return l;
}

// Characteristic of an interval: the minimum of its tent function.
inline double characteristic(double z0, double z1, double width, double l) {
  return 0.5 * (z0 + z1) - 0.5 * l * width;
}

// Next trial point inside interval [x0, x1]; valid while l >= H there.
// An underestimated constant pushes the point outside the open interval,
// which is reported rather than clamped so estimator bugs surface.
inline double place_trial(double x0, double x1, double z0, double z1, double l) {
  const double x = 0.5 * (x0 + x1) + (z0 - z1) / (2.0 * l);
  if (!(x > x0 && x < x1)) {
    std::ostringstream os;
    os.precision(17);
    os << "estimate violated: placement " << x << " outside (" << x0 << ", " << x1
       << "); Lipschitz estimate " << l << " is below the interval rate";
    throw RunError(os.str());
  }
  return x;
}

// The piece-wise linear minorant C^k at x, using the estimates in force.
// At trial points it anchors to the recorded values.
inline double eval_lower_bound(const IntervalTable& t, double x) {
  const auto& xs = t.xs;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  j = std::min(j, t.interval_count() - 1);
  const double l = t.estimate[j];
  return std::max(t.zs[j] - l * (x - xs[j]), t.zs[j + 1] + l * (x - xs[j + 1]));
}

// Policy plugged into run_scheme for the six derivative-free methods.
class LinearScheme {
 public:
  static constexpr bool uses_derivative = false;

  LinearScheme(const Problem& p, const MethodConfig& c)
      : estimator_(c.estimator), r_(c.r), xi_(c.xi),
        known_L_(p.known_L.value_or(0.0)) {}

  void refresh(IntervalTable& t) const {
    const std::size_t m = t.interval_count();
    for (std::size_t j = 0; j < m; ++j)
      t.rate[j] = rate_H(t.xs[j], t.xs[j + 1], t.zs[j], t.zs[j + 1]);

    switch (estimator_) {
      case Estimator::KnownConstant:
        std::fill(t.estimate.begin(), t.estimate.end(), known_L_);
        break;
      case Estimator::GlobalEstimate: {
        const double l = estimate_global(t.rate, r_, xi_);
        std::fill(t.estimate.begin(), t.estimate.end(), l);
        break;
      }
      case Estimator::LocalTuning:
        t.estimate = estimate_local_tuning(t, t.rate, r_, xi_);
        break;
    }
    for (std::size_t j = 0; j < m; ++j)
      t.charac[j] = characteristic(t.zs[j], t.zs[j + 1], t.width(j), t.estimate[j]);
  }

  double place(const IntervalTable& t, std::size_t j) const {
    return place_trial(t.xs[j], t.xs[j + 1], t.zs[j], t.zs[j + 1], t.estimate[j]);
  }

 private:
  Estimator estimator_;
  double r_;
  double xi_;
  double known_L_;
};

}  // namespace unilip
