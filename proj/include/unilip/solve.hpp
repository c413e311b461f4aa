#pragma once

#include <utility>

#include "unilip/core.hpp"
#include "unilip/engine.hpp"
#include "unilip/linear.hpp"
#include "unilip/smooth.hpp"

namespace unilip {

// Runs the method described by the configuration on a problem.  Problems the
// configuration cannot handle yield status Rejected (see validate_problem);
// run-time failures (non-finite values, violated estimates) throw RunError.
template <class Observer>
RunResult solve(const Problem& p, const MethodConfig& c, Observer&& observe) {
  if (c.scheme == Scheme::GS) {
    LinearScheme policy(p, c);
    return run_scheme(p, c, policy, std::forward<Observer>(observe));
  }
  SmoothScheme policy(p, c);
  return run_scheme(p, c, policy, std::forward<Observer>(observe));
}

inline RunResult solve(const Problem& p, const MethodConfig& c) {
  return solve(p, c, [](const IntervalTable&, const auto&, const IterationInfo&) {});
}

// A validated, runnable method handle.
class Method {
 public:
  explicit Method(MethodConfig c) : config_(c), label_(method_label(c)) {
    validate_config(c);
  }

  const MethodConfig& config() const { return config_; }
  const std::string& label() const { return label_; }

  RunResult run(const Problem& p) const { return solve(p, config_); }

 private:
  MethodConfig config_;
  std::string label_;
};

// Builds one of the twelve method variants; throws ConfigError on invalid
// parameter combinations.
inline Method make_method(const MethodConfig& c) { return Method(c); }

}  // namespace unilip
