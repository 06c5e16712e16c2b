#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "leakrate/channel.hpp"
#include "leakrate/common.hpp"
#include "leakrate/specfun.hpp"

namespace leakrate {

// Minimize average leakage rate subject to a throughput floor gamma_floor.
struct Case2Problem {
  ChannelParams params;
  double gamma_floor = 0.0;
};

enum class Case2Branch { CLAMP_MIN, INTERIOR, CLAMP_MAX };

struct Case2Solution {
  RatePair rates;
  MetricBundle metrics;
  Case2Branch branch = Case2Branch::INTERIOR;
  std::optional<double> b_root;
};

// Maximizer of eta(r, r) = r exp((1 - 2^r)/gamma_bar_b).
inline double r_peak(const ChannelParams& params) {
  validate_params(params);
  return specfun::lambert_w0(params.gamma_bar_b) / kLn2;
}

// Largest supportable throughput floor: eta at r_s = r_b = r_peak.
inline double gamma_max(const ChannelParams& params) {
  const double r = r_peak(params);
  return throughput(params, {r, r});
}

namespace detail {

// Binding-constraint secrecy rate: eta(r_b, r_s) = gamma_floor exactly.
// Shares the expm1 form with tx_probability so the product round-trips.
inline double case2_rs(const ChannelParams& params, double gamma_floor,
                       double r_b) {
  return gamma_floor * std::exp(std::expm1(r_b * kLn2) / params.gamma_bar_b);
}

inline Case2Solution finish_case2(const ChannelParams& params, double r_b,
                                  double r_s, Case2Branch branch,
                                  std::optional<double> b_root) {
  Case2Solution sol;
  sol.rates.r_b = r_b;
  sol.rates.r_s = r_s;
  sol.branch = branch;
  sol.b_root = b_root;
  sol.metrics = metrics(params, sol.rates);
  return sol;
}

inline void require_feasible_floor(const Case2Problem& prob, double g_max) {
  if (!(prob.gamma_floor >= 0.0) || prob.gamma_floor > g_max) {
    throw infeasible_error(
        "throughput floor must lie in [0, gamma_max]", g_max);
  }
}

}  // namespace detail

// Both solutions of eta(x, x) = gamma_floor, one on each side of r_peak.
// At gamma_floor = gamma_max the pair collapses to (r_peak, r_peak).
inline std::pair<double, double> rb_feasible_bounds(
    const Case2Problem& prob, const specfun::SolverConfig& cfg = {}) {
  const double peak = r_peak(prob.params);
  const double g_max = gamma_max(prob.params);
  detail::require_feasible_floor(prob, g_max);
  if (!(prob.gamma_floor > 0.0)) {
    throw infeasible_error("throughput floor must be positive for rate bounds",
                           g_max);
  }
  if (prob.gamma_floor == g_max) return {peak, peak};
  auto gap = [&](double x) {
    return throughput(prob.params, {x, x}) - prob.gamma_floor;
  };
  const double lo =
      specfun::find_root(gap, std::numeric_limits<double>::min(), peak, cfg);
  double offset = peak;
  while (gap(peak + offset) >= 0.0) {
    offset *= 2.0;
    if (!(offset < 1e12)) {
      throw std::runtime_error("rb_feasible_bounds: upper bracket expansion failed");
    }
  }
  const double hi = specfun::find_root(gap, peak, peak + offset, cfg);
  return {lo, hi};
}

// Smallest root B > 1 of B ln(B) ln(c ln(B)) - B + 1 = 0 with
// c = e^{1/gamma_bar_b} / (gamma_floor ln2). Bracket by doubling, then
// polish tight enough that the residual contract holds regardless of cfg.
inline double solve_B(const Case2Problem& prob,
                      const specfun::SolverConfig& cfg = {}) {
  validate_params(prob.params);
  const double g_max = gamma_max(prob.params);
  if (!(prob.gamma_floor > 0.0) || !(prob.gamma_floor < g_max)) {
    throw infeasible_error(
        "throughput floor must lie strictly inside (0, gamma_max)", g_max);
  }
  const double c =
      std::exp(1.0 / prob.params.gamma_bar_b) / (prob.gamma_floor * kLn2);
  auto f = [&](double b) {
    const double lb = std::log(b);
    return b * lb * std::log(c * lb) - b + 1.0;
  };
  double lo = 1.0 + 1e-10;
  if (!(f(lo) < 0.0)) {
    throw std::runtime_error("solve_B: no bracket at the lower end");
  }
  double hi = 2.0;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!(hi < 1e300)) {
      throw std::runtime_error("solve_B: bracket expansion limit reached");
    }
  }
  specfun::SolverConfig tight = cfg;
  tight.abs_tol = std::min(cfg.abs_tol, 1e-14);
  tight.rel_tol = std::min(cfg.rel_tol, 1e-14);
  return specfun::find_root(f, lo, hi, tight);
}

namespace detail {

// Approximate-leakage objective along the binding constraint curve.
inline double case2_objective(const ChannelParams& params, double gamma_floor,
                              double r_b) {
  const double r_s = std::min(case2_rs(params, gamma_floor, r_b), r_b);
  return leakage_approx(params, {r_b, r_s});
}

}  // namespace detail

// Direct-minimization path of the approximate problem: scan the objective
// over the feasible interval, then compare against both endpoints. Public
// so the equivalence with the analytic path is testable.
inline Case2Solution solve_case2_closed_form_fallback(
    const Case2Problem& prob, const specfun::SolverConfig& cfg = {}) {
  const double g_max = gamma_max(prob.params);
  detail::require_feasible_floor(prob, g_max);
  if (prob.gamma_floor == 0.0) {
    return detail::finish_case2(prob.params, 0.0, 0.0, Case2Branch::CLAMP_MIN,
                                std::nullopt);
  }
  if (prob.gamma_floor == g_max) {
    const double peak = r_peak(prob.params);
    return detail::finish_case2(prob.params, peak, peak,
                                Case2Branch::CLAMP_MIN, std::nullopt);
  }
  const auto [rb_min, rb_max] = rb_feasible_bounds(prob, cfg);
  auto obj = [&](double r_b) {
    return detail::case2_objective(prob.params, prob.gamma_floor, r_b);
  };
  const double rb_mid = specfun::minimize_scalar(obj, rb_min, rb_max, cfg).first;
  const double f_mid = obj(rb_mid);
  if (obj(rb_min) <= std::min(f_mid, obj(rb_max))) {
    return detail::finish_case2(prob.params, rb_min, rb_min,
                                Case2Branch::CLAMP_MIN, std::nullopt);
  }
  if (obj(rb_max) <= f_mid) {
    return detail::finish_case2(prob.params, rb_max, rb_max,
                                Case2Branch::CLAMP_MAX, std::nullopt);
  }
  const double r_s = detail::case2_rs(prob.params, prob.gamma_floor, rb_mid);
  return detail::finish_case2(prob.params, rb_mid, std::min(r_s, rb_mid),
                              Case2Branch::INTERIOR, std::nullopt);
}

// Analytic solution of the approximate problem: stationary point from the
// B-equation, clamped into the feasible interval. A finite-difference probe
// guards against a spurious B root; any failure falls back to direct
// minimization, which solves the same problem.
inline Case2Solution solve_case2_closed_form(
    const Case2Problem& prob, const specfun::SolverConfig& cfg = {}) {
  const double g_max = gamma_max(prob.params);
  detail::require_feasible_floor(prob, g_max);
  if (prob.gamma_floor == 0.0) {
    return detail::finish_case2(prob.params, 0.0, 0.0, Case2Branch::CLAMP_MIN,
                                std::nullopt);
  }
  if (prob.gamma_floor == g_max) {
    const double peak = r_peak(prob.params);
    return detail::finish_case2(prob.params, peak, peak,
                                Case2Branch::CLAMP_MIN, std::nullopt);
  }
  const auto [rb_min, rb_max] = rb_feasible_bounds(prob, cfg);

  double b = 0.0;
  double rb_0 = std::numeric_limits<double>::quiet_NaN();
  bool have_root = false;
  try {
    b = solve_B(prob, cfg);
    const double arg = std::log(b) / (prob.gamma_floor * kLn2);
    const double inner = 1.0 + prob.params.gamma_bar_b * std::log(arg);
    rb_0 = inner > 0.0 ? std::log2(inner)
                       : -std::numeric_limits<double>::infinity();
    have_root = true;
  } catch (const std::runtime_error&) {
    have_root = false;
  }

  if (have_root && rb_0 > rb_min && rb_0 < rb_max) {
    auto obj = [&](double r_b) {
      return detail::case2_objective(prob.params, prob.gamma_floor, r_b);
    };
    const double h = 1e-4 * (rb_max - rb_min);
    const double f0 = obj(rb_0);
    const bool probe_ok =
        rb_0 - h <= rb_min || rb_0 + h >= rb_max ||
        f0 <= std::min(obj(rb_0 - h), obj(rb_0 + h)) + 1e-12 * (1.0 + f0);
    if (probe_ok) {
      const double r_s = detail::case2_rs(prob.params, prob.gamma_floor, rb_0);
      return detail::finish_case2(prob.params, rb_0, std::min(r_s, rb_0),
                                  Case2Branch::INTERIOR, b);
    }
    return solve_case2_closed_form_fallback(prob, cfg);
  }
  if (have_root) {
    const Case2Branch branch =
        rb_0 <= rb_min ? Case2Branch::CLAMP_MIN : Case2Branch::CLAMP_MAX;
    const double r_b = branch == Case2Branch::CLAMP_MIN ? rb_min : rb_max;
    return detail::finish_case2(prob.params, r_b, r_b, branch, std::nullopt);
  }
  return solve_case2_closed_form_fallback(prob, cfg);
}

// Baseline for the original problem: exact leakage minimized along the
// binding constraint over the feasible interval, dense grid plus
// golden-section refinement, no unimodality assumption.
inline Case2Solution solve_case2_exact(const Case2Problem& prob,
                                       const specfun::SolverConfig& cfg = {}) {
  const double g_max = gamma_max(prob.params);
  detail::require_feasible_floor(prob, g_max);
  if (prob.gamma_floor == 0.0) {
    return detail::finish_case2(prob.params, 0.0, 0.0, Case2Branch::CLAMP_MIN,
                                std::nullopt);
  }
  if (prob.gamma_floor == g_max) {
    const double peak = r_peak(prob.params);
    return detail::finish_case2(prob.params, peak, peak,
                                Case2Branch::CLAMP_MIN, std::nullopt);
  }
  const auto [rb_min, rb_max] = rb_feasible_bounds(prob, cfg);
  if (!(rb_max - rb_min > cfg.abs_tol)) {
    const double mid = 0.5 * (rb_min + rb_max);
    return detail::finish_case2(prob.params, mid, mid, Case2Branch::INTERIOR,
                                std::nullopt);
  }
  auto obj = [&](double r_b) {
    const double r_s =
        std::min(detail::case2_rs(prob.params, prob.gamma_floor, r_b), r_b);
    return leakage_exact(prob.params, {r_b, r_s});
  };
  const double rb_star = specfun::minimize_scalar(obj, rb_min, rb_max, cfg).first;
  const double r_s =
      std::min(detail::case2_rs(prob.params, prob.gamma_floor, rb_star), rb_star);
  return detail::finish_case2(prob.params, rb_star, r_s, Case2Branch::INTERIOR,
                              std::nullopt);
}

}  // namespace leakrate
