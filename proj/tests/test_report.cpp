#include "leakrate/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "leakrate/case1.hpp"
#include "leakrate/case2.hpp"

using namespace leakrate;
using report::Metric;
using report::SweepCase;
using report::SweepSpec;
using report::SweepTable;

namespace {

const ChannelParams kP13{db_to_linear(13.0), db_to_linear(3.0)};
const ChannelParams kP10{db_to_linear(10.0), db_to_linear(3.0)};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

SweepTable single_point_table() {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE1;
  spec.params_list = {kP13};
  spec.constraint_grid = {0.1};
  return report::sweep(spec);
}

}  // namespace

TEST(sweep, single_point_matches_the_solvers) {
  const SweepTable t = single_point_table();
  ASSERT_EQ(t.rows.size(), 1u);
  ASSERT_EQ(t.rows[0].cells.size(), 1u);
  const report::SweepCell& c = t.rows[0].cells[0];
  EXPECT_TRUE(c.feasible);

  const Case1Solution ex = solve_case1_exact({kP13, 0.1});
  const Case1Solution ap = solve_case1_closed_form({kP13, 0.1});
  EXPECT_DOUBLE_EQ(c.rb_exact, ex.rates.r_b);
  EXPECT_DOUBLE_EQ(c.rs_exact, ex.rates.r_s);
  EXPECT_DOUBLE_EQ(c.eta_exact, ex.metrics.eta);
  EXPECT_DOUBLE_EQ(c.rb_approx, ap.rates.r_b);
  EXPECT_DOUBLE_EQ(c.eta_at_approx, ap.metrics.eta);
  EXPECT_DOUBLE_EQ(c.rl_at_approx, ap.metrics.r_l_exact);
  EXPECT_DOUBLE_EQ(c.rlp_approx, ap.metrics.r_lp);
  EXPECT_DOUBLE_EQ(c.err_eta, std::fabs(c.eta_exact - c.eta_at_approx));
  EXPECT_DOUBLE_EQ(c.err_rb, std::fabs(c.rb_exact - c.rb_approx));

  ASSERT_EQ(t.summaries.size(), 1u);
  EXPECT_NEAR(t.summaries[0].gamma_b_db, 13.0, 1e-12);
  EXPECT_NEAR(t.summaries[0].gamma_e_db, 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(t.summaries[0].max_err_eta, c.err_eta);
  EXPECT_DOUBLE_EQ(t.summaries[0].max_err_rb, c.err_rb);
  EXPECT_EQ(t.summaries[0].n_infeasible, 0);
  EXPECT_TRUE(t.warnings.empty());
}

TEST(sweep, stronger_main_channel_dominates) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE1;
  spec.params_list = {kP10, kP13};
  const double cap = xi_max(kP10);
  for (int i = 1; i <= 8; ++i) spec.constraint_grid.push_back(0.9 * cap * i / 8.0);
  const SweepTable t1 = report::sweep(spec);
  for (const auto& row : t1.rows) {
    EXPECT_GE(row.cells[1].eta_exact, row.cells[0].eta_exact - 1e-9)
        << "cap = " << row.constraint;
    EXPECT_GE(row.cells[1].eta_at_approx, row.cells[0].eta_at_approx - 1e-9);
  }

  spec.case_kind = SweepCase::CASE2;
  spec.constraint_grid.clear();
  const double gm = gamma_max(kP10);
  for (int i = 1; i <= 8; ++i) spec.constraint_grid.push_back(0.9 * gm * i / 8.0);
  const SweepTable t2 = report::sweep(spec);
  for (const auto& row : t2.rows) {
    EXPECT_LE(row.cells[1].rl_exact, row.cells[0].rl_exact + 1e-9)
        << "floor = " << row.constraint;
  }
}

TEST(sweep, infeasible_cell_is_flagged_and_excluded) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE2;
  spec.params_list = {kP10, kP13};
  spec.constraint_grid = {2.0};
  const SweepTable t = report::sweep(spec);
  ASSERT_EQ(t.rows.size(), 1u);
  const auto& cells = t.rows[0].cells;
  EXPECT_FALSE(cells[0].feasible);
  EXPECT_TRUE(std::isnan(cells[0].eta_exact));
  EXPECT_TRUE(std::isnan(cells[0].err_eta));
  EXPECT_TRUE(cells[1].feasible);
  EXPECT_EQ(t.summaries[0].n_infeasible, 1);
  EXPECT_EQ(t.summaries[1].n_infeasible, 0);
  EXPECT_DOUBLE_EQ(t.summaries[0].max_err_eta, 0.0);
  ASSERT_EQ(t.warnings.size(), 1u);
  EXPECT_NE(t.warnings[0].find("10dB"), std::string::npos);
}

TEST(sweep, rows_come_out_sorted) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE1;
  spec.params_list = {kP13};
  spec.constraint_grid = {0.5, 0.1, 0.3};
  const SweepTable t = report::sweep(spec);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(t.rows[0].constraint, 0.1);
  EXPECT_DOUBLE_EQ(t.rows[1].constraint, 0.3);
  EXPECT_DOUBLE_EQ(t.rows[2].constraint, 0.5);
}

TEST(sweep, rejects_empty_params) {
  SweepSpec spec;
  spec.constraint_grid = {0.1};
  EXPECT_THROW(report::sweep(spec), std::invalid_argument);
}

TEST(emit_csv, header_and_row_shape) {
  const SweepTable t = single_point_table();
  const std::string path = testing::TempDir() + "shape.csv";
  report::emit_csv(t, path);
  const std::string text = slurp(path);
  const auto lines = split(text, '\n');
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_TRUE(lines.back().empty());
  EXPECT_EQ(lines[0],
            "constraint,rb_exact_13dB,rs_exact_13dB,eta_exact_13dB,"
            "rl_exact_13dB,phi_exact_13dB,rb_approx_13dB,rs_approx_13dB,"
            "eta_at_approx_13dB,rl_at_approx_13dB,rlp_approx_13dB,"
            "phi_approx_13dB,err_eta_13dB,err_rl_13dB,err_rb_13dB,"
            "err_rs_13dB");
  const auto fields = split(lines[1], ',');
  ASSERT_EQ(fields.size(), 16u);
  EXPECT_EQ(fields[0], "0.1");
}

TEST(emit_csv, values_round_trip_at_print_precision) {
  const SweepTable t = single_point_table();
  const std::string path = testing::TempDir() + "roundtrip.csv";
  report::emit_csv(t, path);
  const auto lines = split(slurp(path), '\n');
  const auto fields = split(lines[1], ',');
  const report::SweepCell& c = t.rows[0].cells[0];
  const double expected[] = {c.rb_exact,     c.rs_exact,   c.eta_exact,
                             c.rl_exact,     c.phi_exact,  c.rb_approx,
                             c.rs_approx,    c.eta_at_approx,
                             c.rl_at_approx, c.rlp_approx, c.phi_approx,
                             c.err_eta,      c.err_rl,     c.err_rb,
                             c.err_rs};
  for (int i = 0; i < 15; ++i) {
    const double parsed = std::strtod(fields[i + 1].c_str(), nullptr);
    EXPECT_NEAR(parsed, expected[i],
                1e-8 * std::max(1.0, std::fabs(expected[i])))
        << "field " << i;
  }
}

TEST(emit_csv, infeasible_cells_print_nan) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE2;
  spec.params_list = {kP10};
  spec.constraint_grid = {2.0};
  const std::string path = testing::TempDir() + "nan.csv";
  report::emit_csv(report::sweep(spec), path);
  const auto lines = split(slurp(path), '\n');
  const auto fields = split(lines[1], ',');
  ASSERT_EQ(fields.size(), 16u);
  for (int i = 1; i < 16; ++i) EXPECT_EQ(fields[i], "nan") << "field " << i;
}

TEST(emit_csv, empty_grid_writes_header_only) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE1;
  spec.params_list = {kP13};
  const SweepTable t = report::sweep(spec);
  const std::string path = testing::TempDir() + "empty.csv";
  report::emit_csv(t, path);
  const auto lines = split(slurp(path), '\n');
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].substr(0, 11), "constraint,");
}

TEST(emit_csv, deterministic_bytes) {
  const SweepTable t = single_point_table();
  const std::string a = testing::TempDir() + "det_a.csv";
  const std::string b = testing::TempDir() + "det_b.csv";
  report::emit_csv(t, a);
  report::emit_csv(t, b);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(emit_csv, unwritable_path_raises) {
  const SweepTable t = single_point_table();
  EXPECT_THROW(report::emit_csv(t, "/nonexistent_dir_zz/x.csv"),
               report::io_error);
}

TEST(emit_svg, well_formed_with_one_polyline_pair_per_params) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE1;
  spec.params_list = {kP10, kP13};
  const double cap = xi_max(kP10);
  for (int i = 1; i <= 6; ++i) spec.constraint_grid.push_back(0.8 * cap * i / 6.0);
  const SweepTable t = report::sweep(spec);
  const std::string path = testing::TempDir() + "pairs.svg";
  report::emit_svg(t, Metric::ETA, path);
  const std::string svg = slurp(path);
  EXPECT_EQ(svg.substr(0, 5), "<?xml");
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  EXPECT_EQ(count_occurrences(svg, "<polyline"), 4);
  EXPECT_EQ(count_occurrences(svg, "exact</text>"), 2);
  EXPECT_EQ(count_occurrences(svg, "approx</text>"), 2);
  // Dashed stroke marks approximate series: two curves plus two legend keys.
  EXPECT_EQ(count_occurrences(svg, "stroke-dasharray=\"6 3\""), 4);
  EXPECT_NE(svg.find("leakage cap"), std::string::npos);
  EXPECT_NE(svg.find("throughput"), std::string::npos);
}

TEST(emit_svg, throughput_curve_is_monotone_in_pixels) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE1;
  spec.params_list = {kP13};
  const double cap = xi_max(kP13);
  for (int i = 1; i <= 6; ++i) spec.constraint_grid.push_back(0.8 * cap * i / 6.0);
  const SweepTable t = report::sweep(spec);
  const std::string path = testing::TempDir() + "mono.svg";
  report::emit_svg(t, Metric::ETA, path);
  const std::string svg = slurp(path);
  const std::size_t poly = svg.find("<polyline");
  ASSERT_NE(poly, std::string::npos);
  const std::size_t open = svg.find("points=\"", poly) + 8;
  const std::size_t close = svg.find('"', open);
  const auto pts = split(svg.substr(open, close - open), ' ');
  ASSERT_EQ(pts.size(), 6u);
  double prev_x = -1e300, prev_y = 1e300;
  for (const auto& pt : pts) {
    const auto xy = split(pt, ',');
    ASSERT_EQ(xy.size(), 2u);
    const double x = std::strtod(xy[0].c_str(), nullptr);
    const double y = std::strtod(xy[1].c_str(), nullptr);
    EXPECT_GT(x, prev_x);
    // Larger throughput plots higher, so the pixel y coordinate shrinks.
    EXPECT_LE(y, prev_y + 1e-6);
    prev_x = x;
    prev_y = y;
  }
}

TEST(emit_svg, skips_infeasible_points) {
  SweepSpec spec;
  spec.case_kind = SweepCase::CASE2;
  spec.params_list = {kP10, kP13};
  spec.constraint_grid = {0.5, 1.0, 2.0};
  const SweepTable t = report::sweep(spec);
  const std::string path = testing::TempDir() + "skip.svg";
  report::emit_svg(t, Metric::RL, path);
  const std::string svg = slurp(path);
  // The 10dB series keeps 2 of 3 points; the 13dB series keeps all 3.
  const std::size_t first = svg.find("points=\"");
  ASSERT_NE(first, std::string::npos);
  const std::size_t close = svg.find('"', first + 8);
  const auto pts = split(svg.substr(first + 8, close - first - 8), ' ');
  EXPECT_EQ(pts.size(), 2u);
}

TEST(emit_svg, rejects_empty_tables_and_bad_paths) {
  SweepTable empty;
  EXPECT_THROW(report::emit_svg(empty, Metric::ETA, "/tmp/x.svg"),
               std::invalid_argument);
  const SweepTable t = single_point_table();
  EXPECT_THROW(report::emit_svg(t, Metric::ETA, "/nonexistent_dir_zz/x.svg"),
               report::io_error);
}
