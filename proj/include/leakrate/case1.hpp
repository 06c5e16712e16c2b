#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "leakrate/channel.hpp"
#include "leakrate/common.hpp"
#include "leakrate/specfun.hpp"

namespace leakrate {

// Maximize throughput subject to an average leakage cap xi.
struct Case1Problem {
  ChannelParams params;
  double xi = 0.0;
};

enum class Case1Branch { AT_RB_MIN, AT_RB_INTERIOR };

struct Case1Solution {
  RatePair rates;
  MetricBundle metrics;
  Case1Branch branch = Case1Branch::AT_RB_INTERIOR;
  bool constraint_active = true;
};

// Supremum of leakage caps with a finite design: 3 g e^{1/g} / (10 ln2).
inline double xi_max(const ChannelParams& params) {
  validate_params(params);
  return 1.0 / approx_constant_A(params.gamma_bar_e);
}

// Closed-form solution of the approximate problem. The cap binds by
// construction: r_s = log2(1 + xi A 2^{r_b}) makes leakage_approx equal xi.
inline Case1Solution solve_case1_closed_form(const Case1Problem& prob) {
  validate_params(prob.params);
  const double cap = xi_max(prob.params);
  if (!(prob.xi > 0.0) || !(prob.xi < cap)) {
    throw infeasible_error(
        "leakage cap must lie strictly inside (0, xi_max); the upper "
        "boundary is a supremum only (r_b diverges there)",
        cap);
  }
  const double a = approx_constant_A(prob.params.gamma_bar_e);
  const double xa = prob.xi * a;
  const double rb_min = -std::log2(1.0 - xa);
  const double w = specfun::lambert_w0(xa * prob.params.gamma_bar_b);
  const double rb_0 = std::log2(std::expm1(w) / xa);

  Case1Solution sol;
  if (rb_min >= rb_0) {
    sol.branch = Case1Branch::AT_RB_MIN;
    sol.rates.r_b = rb_min;
    sol.rates.r_s = rb_min;
  } else {
    sol.branch = Case1Branch::AT_RB_INTERIOR;
    sol.rates.r_b = rb_0;
    sol.rates.r_s = std::log2(1.0 + xa * std::exp2(rb_0));
  }
  sol.metrics = metrics(prob.params, sol.rates);
  sol.constraint_active = true;
  return sol;
}

// Cap level where the interior stationary point meets the feasibility floor;
// above it the closed form pins r_s = r_b (zero secrecy cost).
inline double crossover_xi0(const ChannelParams& params,
                            const specfun::SolverConfig& cfg = {}) {
  validate_params(params);
  const double a = approx_constant_A(params.gamma_bar_e);
  const double cap = 1.0 / a;
  auto diff = [&](double xi) {
    const double xa = xi * a;
    const double rb_min = -std::log2(1.0 - xa);
    const double rb_0 =
        std::log2(std::expm1(specfun::lambert_w0(xa * params.gamma_bar_b)) / xa);
    return rb_0 - rb_min;
  };
  const double lo = cap * 1e-9;
  const double hi = cap * (1.0 - 1e-12);
  if (!(diff(lo) > 0.0) || !(diff(hi) < 0.0)) {
    throw std::runtime_error(
        "crossover_xi0: no sign change of rb_0 - rb_min inside (0, xi_max)");
  }
  return specfun::find_root(diff, lo, hi, cfg);
}

namespace detail {

// Largest r_s in [0, r_b] with exact leakage <= xi. Monotone in r_s, so the
// constraint is slack iff leakage at r_s = r_b already fits. The r_b-side
// integral factor is constant along the column and computed once.
inline double case1_best_rs(const ChannelParams& params, double r_b, double xi,
                            const specfun::SolverConfig& cfg,
                            bool* active = nullptr) {
  const double g = params.gamma_bar_e;
  const double k_e = std::exp(1.0 / g) / kLn2;
  const double ei_v = specfun::ei_neg(std::exp2(r_b) / g);
  auto leak = [&](double r_s) {
    if (r_s == 0.0) return -xi;
    const double val = k_e * (ei_v - specfun::ei_neg(std::exp2(r_b - r_s) / g));
    return (val > 0.0 ? val : 0.0) - xi;
  };
  if (leak(r_b) <= 0.0) {
    if (active) *active = false;
    return r_b;
  }
  if (active) *active = true;
  return specfun::find_root(leak, 0.0, r_b, cfg);
}

}  // namespace detail

// Baseline for the original problem (exact leakage, no approximation):
// dense grid over r_b with golden-section refinement, the inner r_s chosen
// by the binding leakage root. No unimodality assumption in r_b.
inline Case1Solution solve_case1_exact(const Case1Problem& prob,
                                       const specfun::SolverConfig& cfg = {}) {
  validate_params(prob.params);
  if (!(prob.xi > 0.0)) {
    throw infeasible_error("leakage cap must be positive",
                           xi_max(prob.params));
  }
  const double rb_lo = 1e-6;
  const double rb_hi =
      std::log2(1.0 + prob.params.gamma_bar_b * std::log(1e8));
  auto neg_eta = [&](double r_b) {
    const double r_s = detail::case1_best_rs(prob.params, r_b, prob.xi, cfg);
    return -throughput(prob.params, {r_b, r_s});
  };
  const auto [rb_star, neg_best] = specfun::minimize_scalar(neg_eta, rb_lo, rb_hi, cfg);
  (void)neg_best;

  Case1Solution sol;
  bool active = true;
  sol.rates.r_b = rb_star;
  sol.rates.r_s = detail::case1_best_rs(prob.params, rb_star, prob.xi, cfg, &active);
  sol.branch = active ? Case1Branch::AT_RB_INTERIOR : Case1Branch::AT_RB_MIN;
  sol.constraint_active = active;
  sol.metrics = metrics(prob.params, sol.rates);
  return sol;
}

}  // namespace leakrate
