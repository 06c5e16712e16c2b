#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "leakrate/case1.hpp"
#include "leakrate/case2.hpp"
#include "leakrate/channel.hpp"
#include "leakrate/common.hpp"
#include "leakrate/specfun.hpp"

namespace leakrate::oracle {

enum class ProblemKind { CASE1_EXACT, CASE1_APPROX, CASE2_EXACT, CASE2_APPROX };

struct GridSpec {
  double rb_lo = 1e-3;
  double rb_hi = 10.0;
  int n_rb = 1500;
  int n_rs = 1500;
};

struct GridResult {
  RatePair rates;
  double objective = 0.0;
  // Largest neighbor-to-neighbor objective change at the optimum; the
  // resolution limit a grid answer carries.
  double obj_step_bound = 0.0;
};

inline GridSpec default_grid(const ChannelParams& params) {
  GridSpec g;
  g.rb_hi = std::log2(1.0 + params.gamma_bar_b * std::log(1e8));
  return g;
}

namespace detail {

inline void validate_grid(const GridSpec& grid) {
  if (!(grid.rb_lo < grid.rb_hi) || grid.n_rb < 2 || grid.n_rs < 2) {
    throw std::invalid_argument("GridSpec: requires rb_lo < rb_hi, counts >= 2");
  }
}

// Leakage metric of the given kind with the column-constant factors reused.
struct ColumnLeakage {
  const ChannelParams& params;
  bool exact;
  double r_b;
  double k_e;
  double ei_v;
  double approx_scale;

  ColumnLeakage(const ChannelParams& p, bool use_exact, double rb)
      : params(p), exact(use_exact), r_b(rb), k_e(0.0), ei_v(0.0),
        approx_scale(0.0) {
    const double g = p.gamma_bar_e;
    if (exact) {
      k_e = std::exp(1.0 / g) / kLn2;
      ei_v = specfun::ei_neg(std::exp2(rb) / g);
    } else {
      approx_scale =
          3.0 * g * std::exp(1.0 / g) / (10.0 * kLn2) / std::exp2(rb);
    }
  }

  double operator()(double r_s) const {
    if (r_s == 0.0) return 0.0;
    if (!exact) return approx_scale * std::expm1(r_s * kLn2);
    const double val =
        k_e * (ei_v - specfun::ei_neg(std::exp2(r_b - r_s) / params.gamma_bar_e));
    return val > 0.0 ? val : 0.0;
  }
};

}  // namespace detail

// Exhaustive-search optimum of one of the four design problems over a
// rectangular r_b grid with r_s gridded over [0, r_b] per column. Feasibility
// uses a half-step slack on the binding side so optima sitting exactly on the
// constraint boundary are not excluded by rounding. Deterministic; ties keep
// the lowest (column, row) index.
inline GridResult grid_optimize(ProblemKind kind, const ChannelParams& params,
                                double constraint, const GridSpec& grid) {
  validate_params(params);
  detail::validate_grid(grid);
  const bool is_case1 =
      kind == ProblemKind::CASE1_EXACT || kind == ProblemKind::CASE1_APPROX;
  const bool exact_metric =
      kind == ProblemKind::CASE1_EXACT || kind == ProblemKind::CASE2_EXACT;

  const int n_rb = grid.n_rb;
  const int n_rs = grid.n_rs;
  auto rb_at = [&](int i) {
    return grid.rb_lo + (grid.rb_hi - grid.rb_lo) * i / (n_rb - 1);
  };

  bool found = false;
  int best_i = 0, best_j = 0;
  double best_obj = 0.0;
  RatePair best_rates;
  double max_eta_on_grid = 0.0;

  for (int i = 0; i < n_rb; ++i) {
    const double r_b = rb_at(i);
    const double p_tx = tx_probability(params, r_b);
    const double rs_step = r_b / (n_rs - 1);
    max_eta_on_grid = std::max(max_eta_on_grid, p_tx * r_b);

    if (is_case1) {
      // Leakage grows along the column: scan to the last feasible r_s, where
      // the column throughput p_tx * r_s is largest.
      detail::ColumnLeakage leak(params, exact_metric, r_b);
      double m_prev = 0.0;
      int j_last = -1;
      double rs_last = 0.0;
      for (int j = 0; j < n_rs; ++j) {
        const double r_s = j * rs_step;
        const double m = leak(r_s);
        const double slack = 0.5 * std::max(0.0, m - m_prev);
        if (m > constraint + slack) break;
        j_last = j;
        rs_last = r_s;
        m_prev = m;
      }
      if (j_last < 0) continue;
      const double obj = p_tx * rs_last;
      if (!found || obj > best_obj) {
        found = true;
        best_obj = obj;
        best_i = i;
        best_j = j_last;
        best_rates = {r_b, rs_last};
      }
    } else {
      // Throughput grows along the column while leakage grows too: the
      // column optimum is the first r_s meeting the floor.
      double eta_prev = 0.0;
      int j_first = -1;
      double rs_first = 0.0;
      for (int j = 0; j < n_rs; ++j) {
        const double r_s = j * rs_step;
        const double eta = p_tx * r_s;
        const double slack = 0.5 * std::max(0.0, eta - eta_prev);
        if (eta >= constraint - slack) {
          j_first = j;
          rs_first = r_s;
          break;
        }
        eta_prev = eta;
      }
      if (j_first < 0) continue;
      detail::ColumnLeakage leak(params, exact_metric, r_b);
      const double obj = leak(rs_first);
      if (!found || obj < best_obj) {
        found = true;
        best_obj = obj;
        best_i = i;
        best_j = j_first;
        best_rates = {r_b, rs_first};
      }
    }
  }

  if (!found) {
    throw infeasible_error("grid_optimize: no feasible grid point",
                           is_case1 ? xi_max(params) : max_eta_on_grid);
  }

  GridResult result;
  result.rates = best_rates;
  result.objective = best_obj;

  auto objective_at = [&](int i, int j) {
    const double r_b = rb_at(i);
    const double r_s = r_b * j / (n_rs - 1);
    if (is_case1) return tx_probability(params, r_b) * r_s;
    detail::ColumnLeakage leak(params, exact_metric, r_b);
    return leak(r_s);
  };
  double bound = 0.0;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int ni = best_i + di;
      const int nj = best_j + dj;
      if ((di == 0 && dj == 0) || ni < 0 || ni >= n_rb || nj < 0 || nj >= n_rs)
        continue;
      bound = std::max(bound, std::fabs(objective_at(ni, nj) - best_obj));
    }
  }
  result.obj_step_bound = bound;
  return result;
}

// Empirical transmission probability: fraction of channel draws whose
// capacity supports r_b, with the binomial standard error.
inline std::pair<double, double> mc_tx_probability(const ChannelParams& params,
                                                   double r_b, std::size_t n,
                                                   std::uint64_t seed) {
  validate_params(params);
  if (!(r_b >= 0.0)) {
    throw std::domain_error("mc_tx_probability: rate must be nonnegative");
  }
  if (n < 10000) {
    throw std::invalid_argument("mc_tx_probability: n must be at least 1e4");
  }
  const double threshold = std::expm1(r_b * kLn2);
  std::mt19937_64 engine(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const double gamma = -params.gamma_bar_b * std::log1p(-u);
    if (gamma >= threshold) ++hits;
  }
  const double estimate = static_cast<double>(hits) / static_cast<double>(n);
  const double stderr_est =
      std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(n));
  return {estimate, stderr_est};
}

// Leakage through the quadrature route; independent of ei_neg.
inline double quad_leakage(const ChannelParams& params, const RatePair& pair,
                           const specfun::SolverConfig& cfg = {}) {
  validate_params(params);
  validate_pair(pair);
  const double g = params.gamma_bar_e;
  const double u = std::exp2(pair.r_b - pair.r_s) / g;
  const double v = std::exp2(pair.r_b) / g;
  return std::exp(1.0 / g) / kLn2 * specfun::quad_exp_over_t(u, v, cfg);
}

}  // namespace leakrate::oracle
