#include "leakrate/specfun.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace sf = leakrate::specfun;

namespace {

void expect_rel(double actual, double expected, double rel) {
  EXPECT_NEAR(actual, expected, rel * std::fabs(expected))
      << "actual " << actual << " expected " << expected;
}

}  // namespace

TEST(ei_neg, matches_reference_values) {
  expect_rel(sf::ei_neg(0.001), -6.331539364136149, 1e-13);
  expect_rel(sf::ei_neg(0.01), -4.037929576538113, 1e-13);
  expect_rel(sf::ei_neg(0.1), -1.8229239584193906, 1e-13);
  expect_rel(sf::ei_neg(0.25), -1.0442826344437381, 1e-13);
  expect_rel(sf::ei_neg(0.5), -0.5597735947761608, 1e-13);
  expect_rel(sf::ei_neg(1.0), -0.2193839343955205, 1e-13);
  expect_rel(sf::ei_neg(2.0), -0.048900510708061125, 1e-13);
  expect_rel(sf::ei_neg(5.0), -0.0011482955912753257, 1e-13);
  expect_rel(sf::ei_neg(10.0), -4.156968929685325e-06, 1e-13);
  expect_rel(sf::ei_neg(30.0), -3.021552010688813e-15, 1e-13);
  expect_rel(sf::ei_neg(50.0), -3.783264029550459e-24, 1e-13);
  expect_rel(sf::ei_neg(700.0), -1.406518766234033e-307, 1e-12);
}

TEST(ei_neg, continuous_across_series_cf_switch) {
  expect_rel(sf::ei_neg(0.999999), -0.21938430227532935, 1e-12);
  expect_rel(sf::ei_neg(1.000001), -0.21938356651644703, 1e-12);
  const double below = sf::ei_neg(std::nextafter(1.0, 0.0));
  const double above = sf::ei_neg(std::nextafter(1.0, 2.0));
  EXPECT_NEAR(below, above, 1e-14);
}

TEST(ei_neg, saturates_to_negative_zero_on_underflow) {
  const double v = sf::ei_neg(800.0);
  EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(std::signbit(v));
}

TEST(ei_neg, rejects_nonpositive_arguments) {
  EXPECT_THROW(sf::ei_neg(0.0), std::domain_error);
  EXPECT_THROW(sf::ei_neg(-1.0), std::domain_error);
  EXPECT_THROW(sf::ei_neg(std::nan("")), std::domain_error);
}

TEST(ei_neg, strictly_increasing) {
  double prev = sf::ei_neg(1e-3);
  for (double x = 0.01; x <= 30.0; x *= 1.7) {
    const double cur = sf::ei_neg(x);
    EXPECT_LT(prev, cur) << "not increasing at x = " << x;
    prev = cur;
  }
}

TEST(lambert_w0, matches_reference_values) {
  expect_rel(sf::lambert_w0(0.001), 0.000999001497338531, 1e-13);
  expect_rel(sf::lambert_w0(0.05), 0.04767230860012938, 1e-13);
  expect_rel(sf::lambert_w0(0.1), 0.09127652716086226, 1e-13);
  expect_rel(sf::lambert_w0(0.5), 0.35173371124919584, 1e-13);
  expect_rel(sf::lambert_w0(1.0), 0.5671432904097838, 1e-13);
  expect_rel(sf::lambert_w0(2.718281828459045), 1.0, 1e-14);
  expect_rel(sf::lambert_w0(10.0), 1.7455280027406994, 1e-13);
  expect_rel(sf::lambert_w0(100.0), 3.38563014029005, 1e-13);
  expect_rel(sf::lambert_w0(1e6), 11.383358086140053, 1e-13);
}

TEST(lambert_w0, zero_maps_to_zero) {
  EXPECT_EQ(sf::lambert_w0(0.0), 0.0);
}

TEST(lambert_w0, residual_below_1e12_scaled) {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> log_x(std::log(1e-6), std::log(1e8));
  for (int i = 0; i < 500; ++i) {
    const double x = std::exp(log_x(eng));
    const double w = sf::lambert_w0(x);
    EXPECT_LE(std::fabs(w * std::exp(w) - x), 1e-12 * std::max(1.0, x))
        << "x = " << x;
  }
}

TEST(lambert_w0, rejects_negative_arguments) {
  EXPECT_THROW(sf::lambert_w0(-0.1), std::domain_error);
  EXPECT_THROW(sf::lambert_w0(std::nan("")), std::domain_error);
}

TEST(find_root, locates_cosine_zero) {
  const double r = sf::find_root([](double x) { return std::cos(x); }, 0.0, 3.0);
  EXPECT_NEAR(r, 1.5707963267948966, 1e-9);
}

TEST(find_root, linear_function) {
  const double r =
      sf::find_root([](double x) { return 2.0 * x - 1.0; }, 0.0, 1.0);
  EXPECT_NEAR(r, 0.5, 1e-10);
}

TEST(find_root, exact_zero_at_endpoint_returned_immediately) {
  const double r = sf::find_root([](double x) { return x; }, 0.0, 1.0);
  EXPECT_EQ(r, 0.0);
}

TEST(find_root, step_function_converges_via_bisection) {
  const double r = sf::find_root(
      [](double x) { return x < 2.0 ? -1.0 : 1.0; }, 0.0, 3.0);
  EXPECT_NEAR(r, 2.0, 1e-9);
}

TEST(find_root, handles_extreme_scale_imbalance) {
  // Exponential growth keeps plain secant pinned near one endpoint; the
  // bisection safeguard must still converge.
  const double r = sf::find_root(
      [](double x) { return std::expm1(20.0 * x) - 1e-9; }, 0.0, 5.0);
  EXPECT_NEAR(r, 5e-11, 1e-9);
}

TEST(find_root, rejects_bad_intervals_and_missing_brackets) {
  auto f = [](double x) { return x * x + 1.0; };
  EXPECT_THROW(sf::find_root(f, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(sf::find_root(f, 0.0, 1.0), std::invalid_argument);
}

TEST(find_root, iteration_limit_raises) {
  sf::SolverConfig cfg;
  cfg.max_iter = 1;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 0.0;
  EXPECT_THROW(
      sf::find_root([](double x) { return x - 0.331; }, 0.0, 1.0, cfg),
      std::runtime_error);
}

TEST(minimize_scalar, quadratic_minimum) {
  const auto [x, fx] = sf::minimize_scalar(
      [](double t) { return (t - 1.3) * (t - 1.3); }, 0.0, 3.0);
  EXPECT_NEAR(x, 1.3, 1e-8);
  EXPECT_NEAR(fx, 0.0, 1e-15);
}

TEST(minimize_scalar, boundary_minimum) {
  const auto [x, fx] = sf::minimize_scalar([](double t) { return t; }, 0.0, 1.0);
  EXPECT_NEAR(x, 0.0, 1e-9);
  EXPECT_NEAR(fx, 0.0, 1e-9);
}

TEST(minimize_scalar, multimodal_never_worse_than_grid) {
  auto f = [](double t) { return std::sin(5.0 * t) + 0.5 * t; };
  const auto [x, fx] = sf::minimize_scalar(f, 0.0, 4.0);
  sf::SolverConfig cfg;
  double grid_best = 1e300;
  for (int i = 0; i < cfg.grid_points; ++i) {
    grid_best = std::min(grid_best, f(4.0 * i / (cfg.grid_points - 1)));
  }
  EXPECT_LE(fx, grid_best);
  EXPECT_NEAR(fx, f(x), 0.0);
}

TEST(minimize_scalar, rejects_invalid_interval) {
  auto f = [](double t) { return t; };
  EXPECT_THROW(sf::minimize_scalar(f, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(sf::minimize_scalar(f, 2.0, 1.0), std::invalid_argument);
}

TEST(quad_exp_over_t, matches_reference_values) {
  expect_rel(sf::quad_exp_over_t(0.5, 2.0), 0.5108730840680997, 1e-10);
  expect_rel(sf::quad_exp_over_t(1.0, 8.0), 0.21934626877267657, 1e-10);
  expect_rel(sf::quad_exp_over_t(0.125, 0.25), 0.5791430061404306, 1e-10);
  expect_rel(sf::quad_exp_over_t(2.0, 50.0), 0.048900510708061125, 1e-10);
  expect_rel(sf::quad_exp_over_t(0.1, 100.0), 1.8229239584193906, 1e-10);
}

TEST(quad_exp_over_t, empty_interval_is_zero) {
  EXPECT_EQ(sf::quad_exp_over_t(3.0, 3.0), 0.0);
}

TEST(quad_exp_over_t, monotone_in_upper_limit) {
  EXPECT_LT(sf::quad_exp_over_t(1.0, 3.0), sf::quad_exp_over_t(1.0, 5.0));
  EXPECT_LT(sf::quad_exp_over_t(1.0, 5.0), sf::quad_exp_over_t(1.0, 9.0));
}

TEST(quad_exp_over_t, rejects_invalid_limits) {
  EXPECT_THROW(sf::quad_exp_over_t(0.0, 1.0), std::domain_error);
  EXPECT_THROW(sf::quad_exp_over_t(-1.0, 1.0), std::domain_error);
  EXPECT_THROW(sf::quad_exp_over_t(2.0, 1.0), std::domain_error);
  EXPECT_THROW(
      sf::quad_exp_over_t(1.0, std::numeric_limits<double>::infinity()),
      std::domain_error);
}

TEST(quad_exp_over_t, agrees_with_ei_neg_over_wide_range) {
  // The tail beyond x + 80 is below 1e-35 of the total and ignorable.
  for (int i = 0; i <= 40; ++i) {
    const double x = 1e-3 * std::pow(50.0 / 1e-3, i / 40.0);
    const double e1 = -sf::ei_neg(x);
    const double quad = sf::quad_exp_over_t(x, x + 80.0);
    EXPECT_LE(std::fabs(e1 - quad) / quad, 1e-9) << "x = " << x;
  }
}
