#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "unilip/core.hpp"
#include "unilip/engine.hpp"
#include "unilip/linear.hpp"

// Derivative-based scheme: rates for the Lipschitz constant of f', smooth
// piece-wise quadratic support geometry, case classification, characteristic
// and placement rules, plus evaluators for the smooth support psi and the
// non-smooth two-parabola bound Phi.

namespace unilip {

// Endpoint data of one interval together with the estimate in force.
struct SmoothInterval {
  double x0, x1;    // abscissas, x0 < x1
  double z0, z1;    // objective values
  double dz0, dz1;  // derivative values
  double m;         // Lipschitz estimate for f' in force

  double width() const { return x1 - x0; }
};

inline SmoothInterval smooth_interval(const IntervalTable& t, std::size_t j) {
  return {t.xs[j], t.xs[j + 1], t.zs[j], t.zs[j + 1],
          t.dzs[j], t.dzs[j + 1], t.estimate[j]};
}

// Rate pair (v, d) bounding the curvature information of an interval.
struct RateV {
  double v;
  double d;
};

// v_j is the smallest constant for which the two-parabola construction stays
// consistent on the interval; d_j is its auxiliary root term.
inline RateV rate_v(double x0, double x1, double z0, double z1, double dz0, double dz1) {
  const double w = x1 - x0;
  if (!(w > 0.0)) throw RunError("rate_v: zero-width interval");
  const double bracket = std::abs(2.0 * (z0 - z1) + (dz0 + dz1) * w);
  const double d = std::sqrt(bracket * bracket + (dz1 - dz0) * (dz1 - dz0) * w * w);
  if (!std::isfinite(d)) throw RunError("rate_v: non-finite interval data");
  return {(bracket + d) / (w * w), d};
}

// Parabola contact points y' <= y and the vertex x_bar of the connecting
// parabola.  degenerate marks a vanishing construction denominator (possible
// only with an exact a-priori constant); such intervals are subdivided at the
// midpoint instead.
struct SupportGeometry {
  double y_prime = 0.0;
  double y = 0.0;
  double x_bar = 0.0;
  bool degenerate = false;
};

inline double geometry_denominator(const SmoothInterval& si) {
  return si.m * si.width() + (si.dz1 - si.dz0);
}

inline double geometry_eta(const SmoothInterval& si) {
  return 1e-12 * std::max(1.0, si.m * si.width());
}

// Contact points and vertex.  Evaluated in interval-local coordinates, which
// is algebraically identical to the textbook absolute-coordinate form but
// avoids cancellation for intervals far from the origin.
inline SupportGeometry support_geometry(const SmoothInterval& si) {
  const double w = si.width();
  const double ddz = si.dz1 - si.dz0;
  const double den = geometry_denominator(si);
  if (den <= geometry_eta(si)) {
    std::ostringstream os;
    os.precision(17);
    os << "degenerate geometry: construction denominator " << den
       << " vanishes on [" << si.x0 << ", " << si.x1 << "]";
    throw RunError(os.str());
  }
  const double frac = ((si.z0 - si.z1) + si.dz1 * w + 0.5 * si.m * w * w) / den;
  SupportGeometry g;
  g.y = si.x0 + 0.25 * w + 0.25 * ddz / si.m + frac;
  g.y_prime = si.x0 - 0.25 * w - 0.25 * ddz / si.m + frac;
  g.x_bar = 2.0 * g.y - si.dz1 / si.m - si.x1;

  const double slack = 1e-10 * std::max({1.0, std::abs(si.x0), std::abs(si.x1)});
  if (g.y_prime < si.x0 - slack || g.y > si.x1 + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "estimate violated: contact points [" << g.y_prime << ", " << g.y
       << "] leave the interval [" << si.x0 << ", " << si.x1 << "]";
    throw RunError(os.str());
  }
  return g;
}

// Left parabola, touching the data at x0.
inline double phi_left(const SmoothInterval& si, double x) {
  const double u = x - si.x0;
  return si.z0 + si.dz0 * u - 0.5 * si.m * u * u;
}
inline double phi_left_slope(const SmoothInterval& si, double x) {
  return si.dz0 - si.m * (x - si.x0);
}

// Right parabola, touching the data at x1.
inline double phi_right(const SmoothInterval& si, double x) {
  const double u = si.x1 - x;
  return si.z1 - si.dz1 * u - 0.5 * si.m * u * u;
}
inline double phi_right_slope(const SmoothInterval& si, double x) {
  return si.dz1 + si.m * (si.x1 - x);
}

// Connecting parabola in its C1 anchor form: contact with the right parabola
// at y, curvature +m.
inline double pi_parabola(const SmoothInterval& si, const SupportGeometry& g, double x) {
  const double u = x - g.y;
  return phi_right(si, g.y) + phi_right_slope(si, g.y) * u + 0.5 * si.m * u * u;
}
inline double pi_slope(const SmoothInterval& si, const SupportGeometry& g, double x) {
  return phi_right_slope(si, g.y) + si.m * (x - g.y);
}

enum class CaseTag { I, Yprime, Y };

// Characteristic of the interval (the minimum of the smooth support) and the
// index-set membership that directs the placement rule.  Case I is the
// interior-vertex configuration; otherwise the minimum sits at an endpoint
// and the trial goes to the contact point on the descending side.
inline std::pair<double, CaseTag> classify_and_characterize(const SmoothInterval& si,
                                                            const SupportGeometry& g) {
  const double sl = pi_slope(si, g, g.y_prime);
  const double sr = pi_slope(si, g, g.y);
  if (sl * sr < 0.0) {
    const double at_vertex = pi_parabola(si, g, g.x_bar);
    return {std::min({si.z0, at_vertex, si.z1}), CaseTag::I};
  }
  const double R = std::min(si.z0, si.z1);
  return {R, si.z0 < si.z1 ? CaseTag::Yprime : CaseTag::Y};
}

// Next trial point for the selected interval.
inline double place_trial_smooth(const SmoothInterval& si, const SupportGeometry& g,
                                 CaseTag tag) {
  if (g.degenerate) return 0.5 * (si.x0 + si.x1);
  double x = tag == CaseTag::I ? g.x_bar : tag == CaseTag::Yprime ? g.y_prime : g.y;
  const double slack = 1e-10 * std::max({1.0, std::abs(si.x0), std::abs(si.x1)});
  if (x < si.x0 - slack || x > si.x1 + slack) {
    std::ostringstream os;
    os.precision(17);
    os << "estimate violated: smooth placement " << x << " outside ["
       << si.x0 << ", " << si.x1 << "]";
    throw RunError(os.str());
  }
  // Rounding may push a contact point marginally past an endpoint; a true
  // endpoint hit is reported by the duplicate-placement guard on insertion.
  return std::clamp(x, si.x0, si.x1);
}

// Smooth support value and slope at x: left parabola up to y', the connecting
// parabola between the contact points, right parabola after y.
inline std::pair<double, double> eval_support(const SmoothInterval& si,
                                              const SupportGeometry& g, double x) {
  if (x < si.x0 || x > si.x1)
    throw RunError("eval_support: contract violation, x outside the interval");
  if (g.degenerate)
    throw RunError("eval_support: degenerate geometry has no smooth support");
  if (x <= g.y_prime) return {phi_left(si, x), phi_left_slope(si, x)};
  if (x >= g.y) return {phi_right(si, x), phi_right_slope(si, x)};
  return {pi_parabola(si, g, x), pi_slope(si, g, x)};
}

// Two-parabola non-smooth lower bound on the interval.
inline double eval_nonsmooth_bound(const SmoothInterval& si, double x) {
  return std::max(phi_left(si, x), phi_right(si, x));
}

// Policy plugged into run_scheme for the six derivative-based methods.
class SmoothScheme {
 public:
  static constexpr bool uses_derivative = true;

  SmoothScheme(const Problem& p, const MethodConfig& c)
      : estimator_(c.estimator), r_(c.r), xi_(c.xi),
        known_M_(p.known_M.value_or(0.0)) {}

  void refresh(IntervalTable& t) {
    const std::size_t m = t.interval_count();
    for (std::size_t j = 0; j < m; ++j) {
      t.rate[j] = rate_v(t.xs[j], t.xs[j + 1], t.zs[j], t.zs[j + 1],
                         t.dzs[j], t.dzs[j + 1]).v;
    }

    switch (estimator_) {
      case Estimator::KnownConstant:
        std::fill(t.estimate.begin(), t.estimate.end(), known_M_);
        break;
      case Estimator::GlobalEstimate: {
        const double est = estimate_global(t.rate, r_, xi_);
        std::fill(t.estimate.begin(), t.estimate.end(), est);
        break;
      }
      case Estimator::LocalTuning:
        t.estimate = estimate_local_tuning(t, t.rate, r_, xi_);
        break;
    }

    geom_.assign(m, SupportGeometry{});
    cases_.assign(m, CaseTag::I);
    for (std::size_t j = 0; j < m; ++j) {
      const SmoothInterval si = smooth_interval(t, j);
      if (geometry_denominator(si) <= geometry_eta(si)) {
        const double mid = 0.5 * (si.x0 + si.x1);
        geom_[j] = {mid, mid, mid, true};
        t.charac[j] = std::min(si.z0, si.z1);
        continue;
      }
      geom_[j] = support_geometry(si);
      auto [R, tag] = classify_and_characterize(si, geom_[j]);
      t.charac[j] = R;
      cases_[j] = tag;
    }
  }

  double place(const IntervalTable& t, std::size_t j) const {
    return place_trial_smooth(smooth_interval(t, j), geom_[j], cases_[j]);
  }

  const std::vector<SupportGeometry>& geometry() const { return geom_; }
  const std::vector<CaseTag>& cases() const { return cases_; }

 private:
  Estimator estimator_;
  double r_;
  double xi_;
  double known_M_;
  std::vector<SupportGeometry> geom_;
  std::vector<CaseTag> cases_;
};

}  // namespace unilip
