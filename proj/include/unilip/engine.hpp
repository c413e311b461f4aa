#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "unilip/core.hpp"

// Scheme-agnostic outer loop: initial trials at the endpoints, the stopping
// rule, the two interval-selection policies, and trial bookkeeping.  The
// per-scheme work (rates, Lipschitz estimates, characteristics, placement)
// is supplied by a policy type; see linear.hpp and smooth.hpp.

namespace unilip {

// Sorted trial abscissas with their values and per-interval scratch data.
// Interval j spans [xs[j], xs[j+1]], j = 0..interval_count()-1.
struct IntervalTable {
  std::vector<double> xs;
  std::vector<double> zs;
  std::vector<double> dzs;      // empty for derivative-free runs
  std::vector<double> rate;     // divided-difference magnitude H_j, or v_j
  std::vector<double> estimate; // Lipschitz estimate in force, l_j or m_j
  std::vector<double> charac;   // characteristic R_j

  std::size_t size() const { return xs.size(); }
  std::size_t interval_count() const { return xs.empty() ? 0 : xs.size() - 1; }
  double width(std::size_t j) const { return xs[j + 1] - xs[j]; }

  void resize_scratch() {
    rate.assign(interval_count(), 0.0);
    estimate.assign(interval_count(), 0.0);
    charac.assign(interval_count(), 0.0);
  }
};

enum class Side { Right, Left };

// State of the local-improvement selector.  flag alternates the global and
// the local selection rule; imin tracks the incumbent (sorted position);
// side is the side of the incumbent to try next during a local phase.
struct SelectorState {
  int flag = 0;
  std::size_t imin = 0;
  Side side = Side::Right;
  std::size_t last_trial_index = 0;  // sorted position of the newest trial
};

// Which branch of the selector produced the chosen interval.
enum class SelectionBranch { Global, LocalImprovement, LocalFallback };

// Smallest interval index attaining the minimal characteristic.
inline std::size_t select_min_characteristic(const IntervalTable& t) {
  const auto& R = t.charac;
  std::size_t best = 0;
  for (std::size_t j = 1; j < R.size(); ++j)
    if (R[j] < R[best]) best = j;
  return best;
}

// One step of the local-improvement selector.  When the phase flag is down,
// delegates to the minimal-characteristic rule; when up, refreshes the
// incumbent with the most recent trial and proposes an interval adjacent to
// it, gated by the width threshold delta.  If no adjacent interval is wide
// enough, falls back to the global rule for this iteration.  The flag is
// toggled on every call; the side alternates once per local phase.
inline std::pair<std::size_t, SelectionBranch> select_local_improvement(
    const IntervalTable& t, SelectorState& s, double delta) {
  std::size_t choice;
  SelectionBranch branch;
  if (s.flag == 1) {
    const std::size_t j = s.last_trial_index;
    if (t.zs[j] < t.zs[s.imin]) s.imin = j;

    const std::size_t k = t.size();
    const std::size_t m = t.interval_count();
    std::vector<std::size_t> candidates;
    if (s.imin == 0) {
      candidates = {0};
    } else if (s.imin == k - 1) {
      candidates = {m - 1};
    } else if (s.side == Side::Right) {
      candidates = {s.imin, s.imin - 1};  // interval right of x_imin, then left
    } else {
      candidates = {s.imin - 1, s.imin};
    }

    branch = SelectionBranch::LocalFallback;
    choice = select_min_characteristic(t);
    for (std::size_t c : candidates) {
      if (t.width(c) > delta) {
        choice = c;
        branch = SelectionBranch::LocalImprovement;
        break;
      }
    }
    s.side = s.side == Side::Right ? Side::Left : Side::Right;
  } else {
    choice = select_min_characteristic(t);
    branch = SelectionBranch::Global;
  }
  s.flag = 1 - s.flag;
  return {choice, branch};
}

// Stop once the selected interval is no wider than the effective accuracy.
inline bool stop_check(double width, double eps_eff) { return width <= eps_eff; }

namespace detail {

inline bool nearly_equal(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

[[noreturn]] inline void throw_degenerate(double x) {
  std::ostringstream os;
  os.precision(17);
  os << "degenerate placement: trial at x=" << x
     << " coincides with an existing trial point";
  throw RunError(os.str());
}

}  // namespace detail

// Inserts a trial keeping the table sorted.  Returns the sorted position of
// the new point.  A placement that coincides with an existing abscissa within
// machine tolerance signals an inconsistent estimate and raises a run error.
inline std::size_t insert_trial(IntervalTable& t, double x, double z,
                                std::optional<double> dz = std::nullopt) {
  auto it = std::lower_bound(t.xs.begin(), t.xs.end(), x);
  const std::size_t pos = static_cast<std::size_t>(it - t.xs.begin());
  if (pos < t.xs.size() && detail::nearly_equal(t.xs[pos], x)) detail::throw_degenerate(x);
  if (pos > 0 && detail::nearly_equal(t.xs[pos - 1], x)) detail::throw_degenerate(x);
  t.xs.insert(t.xs.begin() + pos, x);
  t.zs.insert(t.zs.begin() + pos, z);
  if (dz) t.dzs.insert(t.dzs.begin() + pos, *dz);
  return pos;
}

// Per-iteration snapshot handed to an observer; the table still holds the
// scratch data (estimates, characteristics) used for this selection.
struct IterationInfo {
  std::size_t iteration = 0;        // 0-based count of post-initialization steps
  std::size_t chosen = 0;           // selected interval index
  SelectionBranch branch = SelectionBranch::Global;
  double width = 0.0;               // width of the selected interval
  bool stopped = false;             // true when this selection triggered the stop rule
  double new_x = std::numeric_limits<double>::quiet_NaN();  // placed point, if any
  const SelectorState* selector = nullptr;  // null for MinCharacteristic runs
};

namespace detail {

inline double checked_eval(const std::function<double(double)>& fn, double x,
                           const char* what) {
  const double v = fn(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite " << what << " value at x=" << x;
    throw RunError(os.str());
  }
  return v;
}

}  // namespace detail

// Runs the general scheme: trials at a and b, then iterate
// estimate -> characteristics -> select -> stop-check -> place until the
// selected interval is within the accuracy or the trial cap binds.
//
// Policy requirements:
//   static constexpr bool uses_derivative;
//   void refresh(IntervalTable&);                     // rates, estimates, characteristics
//   double place(const IntervalTable&, std::size_t);  // new point, strictly interior
// The observer (if any) is called once per iteration after selection with
// (table, policy, info); it sees the scratch state behind the decision.
template <class Policy, class Observer>
RunResult run_scheme(const Problem& p, const MethodConfig& c, Policy& policy,
                     Observer&& observe) {
  validate_config(c);
  RunResult result;
  result.method_label = method_label(c);
  if (auto why = validate_problem(p, c); why.has_value()) {
    result.status = RunStatus::Rejected;
    result.best_x = std::numeric_limits<double>::quiet_NaN();
    result.best_f = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  const double eps_eff = c.effective_eps(p);
  const double delta = c.effective_delta(p);
  constexpr bool with_dz = Policy::uses_derivative;

  IntervalTable table;
  auto evaluate = [&](double x) {
    Trial tr;
    tr.x = x;
    tr.z = detail::checked_eval(p.f, x, "objective");
    if constexpr (with_dz) tr.dz = detail::checked_eval(p.df, x, "derivative");
    result.trials.push_back(tr);
    return tr;
  };

  // STEP 0: the first two trials are at a and b, in that order.
  const Trial ta = evaluate(p.a);
  const Trial tb = evaluate(p.b);
  table.xs = {p.a, p.b};
  table.zs = {ta.z, tb.z};
  if constexpr (with_dz) table.dzs = {*ta.dz, *tb.dz};

  result.best_x = ta.x;
  result.best_f = ta.z;
  if (tb.z < result.best_f) {
    result.best_x = tb.x;
    result.best_f = tb.z;
  }

  SelectorState sel;
  sel.imin = tb.z < ta.z ? 1 : 0;
  sel.last_trial_index = 1;

  for (std::size_t iteration = 0;; ++iteration) {
    table.resize_scratch();
    policy.refresh(table);

    IterationInfo info;
    info.iteration = iteration;
    if (c.selector == Selector::LocalImprovement) {
      auto [t, branch] = select_local_improvement(table, sel, delta);
      info.chosen = t;
      info.branch = branch;
      info.selector = &sel;
    } else {
      info.chosen = select_min_characteristic(table);
      info.branch = SelectionBranch::Global;
    }
    info.width = table.width(info.chosen);

    if (stop_check(info.width, eps_eff)) {
      info.stopped = true;
      observe(table, policy, info);
      result.status = RunStatus::Converged;
      break;
    }
    if (result.trials.size() >= c.max_trials) {
      observe(table, policy, info);
      result.status = RunStatus::TrialCapReached;
      break;
    }

    const double x_new = policy.place(table, info.chosen);
    info.new_x = x_new;
    observe(table, policy, info);

    const Trial tn = evaluate(x_new);
    const std::size_t pos = insert_trial(table, tn.x, tn.z, tn.dz);
    sel.last_trial_index = pos;
    if (sel.imin >= pos) ++sel.imin;
    if (tn.z < table.zs[sel.imin]) sel.imin = pos;
    if (tn.z < result.best_f) {
      result.best_f = tn.z;
      result.best_x = tn.x;
    }
  }

  result.n_trials = result.trials.size();
  return result;
}

template <class Policy>
RunResult run_scheme(const Problem& p, const MethodConfig& c, Policy& policy) {
  return run_scheme(p, c, policy,
                    [](const IntervalTable&, const Policy&, const IterationInfo&) {});
}

}  // namespace unilip
