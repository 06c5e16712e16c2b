#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "leakrate/common.hpp"
#include "leakrate/specfun.hpp"

namespace leakrate {

// Average received SNRs, linear power ratios.
struct ChannelParams {
  double gamma_bar_b = 1.0;
  double gamma_bar_e = 1.0;
};

// Wiretap-code rates in bits per channel use; invariant 0 <= r_s <= r_b.
struct RatePair {
  double r_b = 0.0;
  double r_s = 0.0;
};

struct MetricBundle {
  double p_tx = 0.0;
  double eta = 0.0;
  double phi = 0.0;
  double r_l_exact = 0.0;
  double r_lp = 0.0;
};

inline void validate_params(const ChannelParams& p) {
  if (!(p.gamma_bar_b > 0.0) || !(p.gamma_bar_e > 0.0) ||
      !std::isfinite(p.gamma_bar_b) || !std::isfinite(p.gamma_bar_e)) {
    throw std::domain_error("ChannelParams: SNRs must be positive and finite");
  }
}

inline void validate_pair(const RatePair& r) {
  if (!(r.r_s >= 0.0) || !(r.r_s <= r.r_b) || !std::isfinite(r.r_b)) {
    throw std::domain_error("RatePair: requires 0 <= r_s <= r_b, finite");
  }
}

inline double db_to_linear(double snr_db) {
  return std::pow(10.0, snr_db / 10.0);
}

inline double linear_to_db(double snr_linear) {
  return 10.0 * std::log10(snr_linear);
}

inline double capacity(double gamma) {
  if (!(gamma >= 0.0)) {
    throw std::domain_error("capacity: SNR must be nonnegative");
  }
  return std::log2(1.0 + gamma);
}

// Probability that the main channel supports r_b under on-off transmission.
inline double tx_probability(const ChannelParams& params, double r_b) {
  validate_params(params);
  if (!(r_b >= 0.0)) {
    throw std::domain_error("tx_probability: rate must be nonnegative");
  }
  return std::exp(-std::expm1(r_b * kLn2) / params.gamma_bar_b);
}

inline double secrecy_cost(const RatePair& pair) {
  validate_pair(pair);
  return pair.r_b - pair.r_s;
}

inline double throughput(const ChannelParams& params, const RatePair& pair) {
  validate_pair(pair);
  return tx_probability(params, pair.r_b) * pair.r_s;
}

// Average information leakage rate in closed form:
// (1/ln2) e^{1/g} [Ei(-2^{r_b}/g) - Ei(-2^{r_b - r_s}/g)] with g = gamma_bar_e.
inline double leakage_exact(const ChannelParams& params, const RatePair& pair) {
  validate_params(params);
  validate_pair(pair);
  if (pair.r_s == 0.0) return 0.0;
  const double g = params.gamma_bar_e;
  const double u = std::exp2(pair.r_b - pair.r_s) / g;
  const double v = std::exp2(pair.r_b) / g;
  const double diff = specfun::ei_neg(v) - specfun::ei_neg(u);
  const double value = std::exp(1.0 / g) / kLn2 * diff;
  return value > 0.0 ? value : 0.0;
}

// Low-complexity leakage approximation: (3 g e^{1/g} / (10 ln2)) (2^{r_s}-1) 2^{-r_b}.
inline double leakage_approx(const ChannelParams& params,
                             const RatePair& pair) {
  validate_params(params);
  validate_pair(pair);
  const double g = params.gamma_bar_e;
  const double scale = 3.0 * g * std::exp(1.0 / g) / (10.0 * kLn2);
  return scale * std::expm1(pair.r_s * kLn2) / std::exp2(pair.r_b);
}

// Envelope-bound intermediate of the approximation derivation, evaluated
// literally. Diagnostic only; solvers never consume it.
inline double leakage_as_intermediate(const ChannelParams& params,
                                      const RatePair& pair) {
  validate_params(params);
  validate_pair(pair);
  const double g = params.gamma_bar_e;
  const double x = std::exp2(pair.r_b);
  const double y = std::exp2(pair.r_s);
  const double low = -0.5 * std::exp(-x / g) * std::log1p(2.0 * g / x);
  const double high = std::exp(-x / (g * y)) * std::log1p(g * y / x);
  return std::exp(1.0 / g) / kLn2 * (low + high);
}

// A = 10 ln2 e^{-1/g} / (3 g); satisfies A * xi_max = 1.
inline double approx_constant_A(double gamma_bar_e) {
  if (!(gamma_bar_e > 0.0)) {
    throw std::domain_error("approx_constant_A: SNR must be positive");
  }
  return 10.0 * kLn2 * std::exp(-1.0 / gamma_bar_e) / (3.0 * gamma_bar_e);
}

inline MetricBundle metrics(const ChannelParams& params, const RatePair& pair) {
  MetricBundle m;
  m.p_tx = tx_probability(params, pair.r_b);
  m.eta = m.p_tx * pair.r_s;
  m.phi = pair.r_b - pair.r_s;
  m.r_l_exact = leakage_exact(params, pair);
  m.r_lp = leakage_approx(params, pair);
  return m;
}

// n i.i.d. exponential SNR draws with the given mean. The inverse-CDF mapping
// from raw 53-bit uniforms keeps the sequence stable across library versions.
inline std::vector<double> sample_snr(double gamma_bar, std::uint64_t rng_seed,
                                      std::size_t n) {
  if (!(gamma_bar > 0.0)) {
    throw std::domain_error("sample_snr: mean SNR must be positive");
  }
  std::mt19937_64 engine(rng_seed);
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    draws[i] = -gamma_bar * std::log1p(-u);
  }
  return draws;
}

}  // namespace leakrate
