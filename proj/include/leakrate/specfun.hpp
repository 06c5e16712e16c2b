#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "leakrate/common.hpp"

namespace leakrate::specfun {

struct SolverConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_iter = 200;
  int grid_points = 2001;
  double quad_tol = 1e-11;
};

// Ei(-x) for x > 0. Convergent series below x = 1, continued fraction above.
// When e^{-x} underflows the result saturates to -0.0 instead of raising.
inline double ei_neg(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("ei_neg: argument must be positive");
  }
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
    constexpr double euler_gamma = 0.57721566490153286060651209008240243;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 64; ++k) {
      term *= x / k;
      const double add = term / k;
      sum += (k % 2 != 0) ? add : -add;
      if (add < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return euler_gamma + std::log(x) - sum;
  }
  // E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...)))), modified Lentz.
  double b = x + 1.0;
  double c = 1e308;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return -(std::exp(-x) * h);
}

// Principal branch of w e^w = x for x >= 0, Halley iteration.
inline double lambert_w0(double x) {
  if (!(x >= 0.0)) {
    throw std::domain_error("lambert_w0: argument must be nonnegative");
  }
  if (x == 0.0) return 0.0;
  double w = (x < 2.718281828459045) ? std::log1p(x)
                                     : std::log(x) - std::log(std::log(x));
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::fabs(step) <= 1e-16 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

// Root of f on [lo, hi] with f(lo) f(hi) <= 0. Secant steps safeguarded by
// bisection so the bracket always shrinks.
template <typename F>
double find_root(F&& f, double lo, double hi, const SolverConfig& cfg = {}) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("find_root: invalid interval");
  }
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw std::invalid_argument("find_root: endpoints do not bracket a root");
  }
  double x0 = a, f0 = fa;
  double x1 = b, f1 = fb;
  double prev_width = b - a;
  bool force_bisect = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double tol =
        cfg.abs_tol + cfg.rel_tol * 0.5 * (std::fabs(a) + std::fabs(b));
    if (b - a <= tol) return 0.5 * (a + b);
    double x;
    const double denom = f1 - f0;
    if (!force_bisect && denom != 0.0) {
      x = x1 - f1 * (x1 - x0) / denom;
    } else {
      x = 0.5 * (a + b);
    }
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    x0 = x1;
    f0 = f1;
    x1 = x;
    f1 = fx;
    // Secant is kept only while the bracket keeps halving; otherwise the
    // next step bisects, which bounds the iteration count.
    force_bisect = (b - a) > 0.5 * prev_width;
    prev_width = b - a;
  }
  throw std::runtime_error("find_root: iteration limit exceeded");
}

// Scalar minimization: dense grid scan, then golden-section refinement of the
// best grid cell. The returned value never exceeds the best grid value.
template <typename F>
std::pair<double, double> minimize_scalar(F&& f, double lo, double hi,
                                          const SolverConfig& cfg = {}) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("minimize_scalar: invalid interval");
  }
  const int n = cfg.grid_points < 2 ? 2 : cfg.grid_points;
  double best_x = lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double step = (hi - lo) / (n - 1);
  double a = std::fmax(lo, best_x - step);
  double b = std::fmin(hi, best_x + step);
  constexpr double invphi = 0.61803398874989484820458683436564;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < cfg.max_iter; ++it) {
    if (b - a <= cfg.abs_tol + cfg.rel_tol * std::fabs(0.5 * (a + b))) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  if (fm <= best_f) return {xm, fm};
  return {best_x, best_f};
}

namespace detail {

template <typename G>
double adapt_simpson(const G& g, double a, double fa, double b, double fb,
                     double fm, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return adapt_simpson(g, a, fa, m, fm, flm, left, 0.5 * eps, depth - 1) +
         adapt_simpson(g, m, fm, b, fb, frm, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

// Integral of e^{-t}/t over [u, v], 0 < u <= v. The leading e^{-u} is
// factored out analytically so the result keeps full relative accuracy even
// when the integral underflows toward zero.
inline double quad_exp_over_t(double u, double v,
                              const SolverConfig& cfg = {}) {
  if (!(u > 0.0) || !(v >= u) || !std::isfinite(v)) {
    throw std::domain_error("quad_exp_over_t: requires 0 < u <= v, finite");
  }
  if (v == u) return 0.0;
  const double length = v - u;
  const auto g = [u](double s) { return std::exp(-s) / (u + s); };
  const int panels = static_cast<int>(std::ceil(length / 2.0));
  const double width = length / panels;
  // First pass: plain Simpson estimates give per-panel error budgets.
  double rough = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = i * width;
    const double b = a + width;
    rough += (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
  }
  const double eps_total = cfg.quad_tol * rough + 1e-300;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = i * width;
    const double b = a + width;
    const double fa = g(a);
    const double fb = g(b);
    const double fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::adapt_simpson(g, a, fa, b, fb, fm, whole,
                                   eps_total / panels, 60);
  }
  return std::exp(-u) * total;
}

}  // namespace leakrate::specfun
