#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core data model shared by the solvers, the oracle, the testbed and the CLI.

namespace unilip {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter combinations, malformed problem definitions.
struct ConfigError : Error {
  using Error::Error;
};

// Failures during a solve: non-finite evaluations, violated estimates,
// degenerate trial placement.
struct RunError : Error {
  using Error::Error;
};

// A univariate objective on a closed interval [a, b].  The derivative is
// optional; methods that need it reject problems lacking it.  known_L / known_M
// feed the known-constant methods, known_min_* are validation metadata only.
struct Problem {
  std::string name;
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> f;
  std::function<double(double)> df;  // empty when unavailable
  std::optional<double> known_L;
  std::optional<double> known_M;
  std::optional<double> known_min_x;
  std::optional<double> known_min_f;

  bool has_derivative() const { return static_cast<bool>(df); }
  double width() const { return b - a; }
};

// One evaluation of f (and f' for derivative-based methods) at an abscissa.
struct Trial {
  double x = 0.0;
  double z = 0.0;
  std::optional<double> dz;
};

enum class Scheme { GS, GS_D };
enum class Estimator { KnownConstant, GlobalEstimate, LocalTuning };
enum class Selector { MinCharacteristic, LocalImprovement };

// Full configuration of one of the twelve method variants.
struct MethodConfig {
  Scheme scheme = Scheme::GS;
  Estimator estimator = Estimator::GlobalEstimate;
  Selector selector = Selector::MinCharacteristic;
  double r = 1.1;        // reliability multiplier, > 1 for adaptive estimators
  double xi = 1e-8;      // floor for adaptive estimates
  double eps = 1e-4;     // stopping accuracy
  bool eps_relative = true;  // effective tolerance = eps * (b - a)
  std::optional<double> delta;  // local-improvement width gate, defaults to eps_eff
  std::size_t max_trials = 1'000'000;

  double effective_eps(const Problem& p) const {
    return eps_relative ? eps * (p.b - p.a) : eps;
  }
  double effective_delta(const Problem& p) const {
    return delta ? *delta : effective_eps(p);
  }
};

enum class RunStatus { Converged, TrialCapReached, Rejected };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::TrialCapReached: return "trial-cap-reached";
    case RunStatus::Rejected: return "rejected";
  }
  return "unknown";
}

// Outcome of a solve: incumbent point/value plus the full trial trace in
// evaluation order (the first two entries are always a and b).
struct RunResult {
  double best_x = 0.0;
  double best_f = 0.0;
  std::vector<Trial> trials;
  std::size_t n_trials = 0;
  RunStatus status = RunStatus::Rejected;
  std::string method_label;
};

// Method acronym for a configuration: PKC, GE, LT (+ _LI) for the piece-wise
// linear scheme; DKC, DGE, DLT (+ _LI) for the derivative-based one.
inline std::string method_label(const MethodConfig& c) {
  std::string s = c.scheme == Scheme::GS_D ? "D" : "";
  switch (c.estimator) {
    case Estimator::KnownConstant: s += c.scheme == Scheme::GS ? "PKC" : "KC"; break;
    case Estimator::GlobalEstimate: s += "GE"; break;
    case Estimator::LocalTuning: s += "LT"; break;
  }
  if (c.selector == Selector::LocalImprovement) s += "_LI";
  return s;
}

// Inverse of method_label: fills scheme/estimator/selector of a config.
// Throws ConfigError for unknown labels.
inline MethodConfig config_for_label(const std::string& label, MethodConfig base = {}) {
  std::string s = label;
  base.selector = Selector::MinCharacteristic;
  if (s.size() > 3 && s.substr(s.size() - 3) == "_LI") {
    base.selector = Selector::LocalImprovement;
    s = s.substr(0, s.size() - 3);
  }
  if (!s.empty() && s[0] == 'D') {
    base.scheme = Scheme::GS_D;
    s = s.substr(1);
  } else {
    base.scheme = Scheme::GS;
    if (s == "PKC") s = "KC";
  }
  if (s == "KC") base.estimator = Estimator::KnownConstant;
  else if (s == "GE") base.estimator = Estimator::GlobalEstimate;
  else if (s == "LT") base.estimator = Estimator::LocalTuning;
  else throw ConfigError("unknown method label: " + label);
  return base;
}

inline const std::vector<std::string>& all_method_labels() {
  static const std::vector<std::string> labels = {
      "PKC", "GE", "LT", "PKC_LI", "GE_LI", "LT_LI",
      "DKC", "DGE", "DLT", "DKC_LI", "DGE_LI", "DLT_LI"};
  return labels;
}

// Parameter validation shared by make_method and the CLI.
// Throws ConfigError on the first violated constraint.
inline void validate_config(const MethodConfig& c) {
  if (c.estimator != Estimator::KnownConstant && !(c.r > 1.0))
    throw ConfigError("reliability parameter r must be > 1 for adaptive estimators");
  if (!(c.xi > 0.0)) throw ConfigError("xi must be positive");
  if (!(c.eps > 0.0)) throw ConfigError("eps must be positive");
  if (c.delta && !(*c.delta > 0.0)) throw ConfigError("delta must be positive");
  if (c.max_trials < 2)
    throw ConfigError("max_trials must be at least 2 (the initial trials at a and b)");
}

// Checks that a problem can be run with a configuration.  Returns the
// rejection reason, or nullopt when the pair is runnable.  Never throws.
inline std::optional<std::string> validate_problem(const Problem& p, const MethodConfig& c) {
  if (!(p.a < p.b)) return "invalid interval: requires a < b";
  if (!p.f) return "objective evaluator missing";
  if (p.known_L && !(*p.known_L > 0.0)) return "known_L must be strictly positive";
  if (p.known_M && !(*p.known_M > 0.0)) return "known_M must be strictly positive";
  if (c.scheme == Scheme::GS_D && !p.has_derivative())
    return "derivative required: scheme GS_D needs f'";
  if (c.estimator == Estimator::KnownConstant) {
    if (c.scheme == Scheme::GS && !p.known_L)
      return "known constant required: method needs the Lipschitz constant of f";
    if (c.scheme == Scheme::GS_D && !p.known_M)
      return "known constant required: method needs the Lipschitz constant of f'";
  }
  return std::nullopt;
}

}  // namespace unilip
