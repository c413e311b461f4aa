#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "unilip/core.hpp"
#include "unilip/expr.hpp"

// Test-problem supply: a randomized class of multiextremal objectives with
// analytic derivatives, a deterministic seeded suite generator, and a
// line-oriented fixture format for user-defined problems.

namespace unilip {

// 64-bit SplitMix generator.  The exact integer recipe is part of the file
// format contract: the same seed yields the same suite on every platform.
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// One instance of the randomized class: a multiextremal objective on [-5, 5]
// with global minimum 0 at x_star, composed of a flat quadratic and two
// squared-sine oscillations.
inline Problem pinter_problem(double x_star) {
  if (!(x_star >= -5.0 && x_star <= 5.0))
    throw ConfigError("pinter_problem: x_star must lie in [-5, 5]");
  Problem p;
  {
    std::ostringstream os;
    os.precision(12);
    os << "pinter(" << x_star << ")";
    p.name = os.str();
  }
  p.a = -5.0;
  p.b = 5.0;
  p.f = [x_star](double x) {
    const double d = x - x_star;
    const double s1 = std::sin(d + d * d);
    const double s2 = std::sin(d);
    return 0.025 * d * d + s1 * s1 + s2 * s2;
  };
  p.df = [x_star](double x) {
    const double d = x - x_star;
    return 0.05 * d + std::sin(2.0 * (d + d * d)) * (1.0 + 2.0 * d) + std::sin(2.0 * d);
  };
  p.known_min_x = x_star;
  p.known_min_f = 0.0;
  return p;
}

struct PinterInstance {
  int index = 0;        // 1-based position in the suite
  double x_star = 0.0;
  Problem problem;
};

// Deterministic suite: count minimizers drawn uniformly from [-5, 5] with the
// generator above.
inline std::vector<PinterInstance> pinter_suite(std::uint64_t seed, std::size_t count) {
  if (count < 1) throw ConfigError("pinter_suite: count must be at least 1");
  SplitMix64 rng(seed);
  std::vector<PinterInstance> suite;
  suite.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double x_star = -5.0 + 10.0 * rng.next_unit();
    PinterInstance inst;
    inst.index = static_cast<int>(j) + 1;
    inst.x_star = x_star;
    inst.problem = pinter_problem(x_star);
    inst.problem.name = "pinter_" + std::to_string(j + 1);
    suite.push_back(std::move(inst));
  }
  return suite;
}

// ---- fixtures ----------------------------------------------------------------
//
// Line-oriented UTF-8 `key = value` format:
//   name        = <identifier>
//   interval    = <a> <b>
//   expr        = <expression, see expr.hpp grammar>
//   lipschitz_f = <positive real>   (optional)
//   lipschitz_df= <positive real>   (optional)
//   known_min_x = <real>            (optional)
//   known_min_f = <real>            (optional)
// '#' starts a comment line; unknown keys are errors.

namespace detail {

[[noreturn]] inline void fixture_error(const std::string& origin, std::size_t line,
                                       const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_real(const std::string& origin, std::size_t line, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) fixture_error(origin, line, "trailing characters after number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fixture_error(origin, line, "malformed number '" + s + "'");
  }
}

}  // namespace detail

// Parses a fixture from a stream.  `origin` names the source in error
// messages (usually the file path).
inline Problem parse_fixture(std::istream& in, const std::string& origin) {
  Problem p;
  ExprPtr body;
  bool has_interval = false, has_expr = false;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      detail::fixture_error(origin, lineno, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (value.empty()) detail::fixture_error(origin, lineno, "missing value for '" + key + "'");

    if (key == "name") {
      p.name = value;
    } else if (key == "interval") {
      std::istringstream iv(value);
      if (!(iv >> p.a >> p.b))
        detail::fixture_error(origin, lineno, "interval needs two reals: '" + value + "'");
      std::string rest;
      if (iv >> rest)
        detail::fixture_error(origin, lineno, "interval needs exactly two reals");
      if (!(p.a < p.b))
        detail::fixture_error(origin, lineno, "invalid interval: requires a < b");
      has_interval = true;
    } else if (key == "expr") {
      try {
        body = parse_expression(value);
      } catch (const ParseError& e) {
        detail::fixture_error(origin, lineno, std::string("expr: ") + e.what());
      }
      has_expr = true;
    } else if (key == "lipschitz_f") {
      p.known_L = detail::parse_real(origin, lineno, value);
      if (!(*p.known_L > 0.0)) detail::fixture_error(origin, lineno, "lipschitz_f must be positive");
    } else if (key == "lipschitz_df") {
      p.known_M = detail::parse_real(origin, lineno, value);
      if (!(*p.known_M > 0.0)) detail::fixture_error(origin, lineno, "lipschitz_df must be positive");
    } else if (key == "known_min_x") {
      p.known_min_x = detail::parse_real(origin, lineno, value);
    } else if (key == "known_min_f") {
      p.known_min_f = detail::parse_real(origin, lineno, value);
    } else {
      detail::fixture_error(origin, lineno, "unknown key '" + key + "'");
    }
  }

  if (!has_expr) detail::fixture_error(origin, lineno, "missing 'expr'");
  if (!has_interval) detail::fixture_error(origin, lineno, "missing 'interval'");
  if (p.name.empty()) p.name = origin;

  p.f = [body](double x) { return eval(body, x); };
  try {
    ExprPtr deriv = differentiate(body);
    p.df = [deriv](double x) { return eval(deriv, x); };
  } catch (const NonDifferentiable&) {
    // abs in the body: the problem stays derivative-free
  }
  return p;
}

inline Problem load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture file: " + path);
  return parse_fixture(in, path);
}

}  // namespace unilip
