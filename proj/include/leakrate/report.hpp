#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "leakrate/case1.hpp"
#include "leakrate/case2.hpp"
#include "leakrate/channel.hpp"
#include "leakrate/common.hpp"

namespace leakrate::report {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepCase { CASE1, CASE2 };

enum class Metric { ETA, RL, PHI, RB, RS };

struct SweepSpec {
  SweepCase case_kind = SweepCase::CASE1;
  std::vector<ChannelParams> params_list;
  std::vector<double> constraint_grid;
  specfun::SolverConfig cfg;
};

// One (constraint, params) evaluation. Infeasible cells keep NaN fields and
// are excluded from summary maxima.
struct SweepCell {
  bool feasible = false;
  double rb_exact = std::numeric_limits<double>::quiet_NaN();
  double rs_exact = std::numeric_limits<double>::quiet_NaN();
  double eta_exact = std::numeric_limits<double>::quiet_NaN();
  double rl_exact = std::numeric_limits<double>::quiet_NaN();
  double phi_exact = std::numeric_limits<double>::quiet_NaN();
  double rb_approx = std::numeric_limits<double>::quiet_NaN();
  double rs_approx = std::numeric_limits<double>::quiet_NaN();
  double eta_at_approx = std::numeric_limits<double>::quiet_NaN();
  double rl_at_approx = std::numeric_limits<double>::quiet_NaN();
  double rlp_approx = std::numeric_limits<double>::quiet_NaN();
  double phi_approx = std::numeric_limits<double>::quiet_NaN();
  double err_eta = std::numeric_limits<double>::quiet_NaN();
  double err_rl = std::numeric_limits<double>::quiet_NaN();
  double err_rb = std::numeric_limits<double>::quiet_NaN();
  double err_rs = std::numeric_limits<double>::quiet_NaN();
};

struct SweepRow {
  double constraint = 0.0;
  std::vector<SweepCell> cells;
};

// Max absolute errors over the feasible rows of one params entry. The
// leakage error is carried under both plotted-curve interpretations:
// exact metric at approximate rates, and the approximate metric itself.
struct ParamSummary {
  double gamma_b_db = 0.0;
  double gamma_e_db = 0.0;
  double max_err_eta = 0.0;
  double max_err_rl = 0.0;
  double max_err_rl_alt = 0.0;
  double max_err_rb = 0.0;
  double max_err_rs = 0.0;
  int n_infeasible = 0;
};

struct SweepTable {
  SweepCase case_kind = SweepCase::CASE1;
  std::vector<ChannelParams> params_list;
  std::vector<SweepRow> rows;
  std::vector<ParamSummary> summaries;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string format_g(double v, int precision = 9) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

inline std::string db_label(const ChannelParams& p) {
  return format_g(linear_to_db(p.gamma_bar_b), 6) + "dB";
}

// Labels disambiguate by the eavesdropper SNR only when main SNRs collide.
inline std::vector<std::string> param_labels(
    const std::vector<ChannelParams>& list) {
  std::vector<std::string> labels;
  labels.reserve(list.size());
  for (const auto& p : list) labels.push_back(db_label(p));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (i != j && labels[i] == labels[j]) {
        labels[i] =
            db_label(list[i]) + "_e" +
            format_g(linear_to_db(list[i].gamma_bar_e), 6) + "dB";
        break;
      }
    }
  }
  return labels;
}

}  // namespace detail

// Solve both the exact baseline and the closed form at every grid point,
// evaluating all metrics with the exact formulas at both rate pairs plus the
// approximate leakage at the approximate rates.
inline SweepTable sweep(const SweepSpec& spec) {
  if (spec.params_list.empty()) {
    throw std::invalid_argument("sweep: params_list must be non-empty");
  }
  SweepTable table;
  table.case_kind = spec.case_kind;
  table.params_list = spec.params_list;

  std::vector<double> grid = spec.constraint_grid;
  std::sort(grid.begin(), grid.end());

  const auto labels = detail::param_labels(spec.params_list);
  table.summaries.resize(spec.params_list.size());
  for (std::size_t k = 0; k < spec.params_list.size(); ++k) {
    table.summaries[k].gamma_b_db =
        linear_to_db(spec.params_list[k].gamma_bar_b);
    table.summaries[k].gamma_e_db =
        linear_to_db(spec.params_list[k].gamma_bar_e);
  }

  for (double c : grid) {
    SweepRow row;
    row.constraint = c;
    for (std::size_t k = 0; k < spec.params_list.size(); ++k) {
      const ChannelParams& p = spec.params_list[k];
      SweepCell cell;
      try {
        RatePair exact_rates, approx_rates;
        MetricBundle exact_m, approx_m;
        if (spec.case_kind == SweepCase::CASE1) {
          const Case1Problem prob{p, c};
          const Case1Solution ex = solve_case1_exact(prob, spec.cfg);
          const Case1Solution ap = solve_case1_closed_form(prob);
          exact_rates = ex.rates;
          exact_m = ex.metrics;
          approx_rates = ap.rates;
          approx_m = ap.metrics;
        } else {
          const Case2Problem prob{p, c};
          const Case2Solution ex = solve_case2_exact(prob, spec.cfg);
          const Case2Solution ap = solve_case2_closed_form(prob, spec.cfg);
          exact_rates = ex.rates;
          exact_m = ex.metrics;
          approx_rates = ap.rates;
          approx_m = ap.metrics;
        }
        cell.feasible = true;
        cell.rb_exact = exact_rates.r_b;
        cell.rs_exact = exact_rates.r_s;
        cell.eta_exact = exact_m.eta;
        cell.rl_exact = exact_m.r_l_exact;
        cell.phi_exact = exact_m.phi;
        cell.rb_approx = approx_rates.r_b;
        cell.rs_approx = approx_rates.r_s;
        cell.eta_at_approx = approx_m.eta;
        cell.rl_at_approx = approx_m.r_l_exact;
        cell.rlp_approx = approx_m.r_lp;
        cell.phi_approx = approx_m.phi;
        cell.err_eta = std::fabs(cell.eta_exact - cell.eta_at_approx);
        cell.err_rl = std::fabs(cell.rl_exact - cell.rl_at_approx);
        cell.err_rb = std::fabs(cell.rb_exact - cell.rb_approx);
        cell.err_rs = std::fabs(cell.rs_exact - cell.rs_approx);

        ParamSummary& s = table.summaries[k];
        s.max_err_eta = std::max(s.max_err_eta, cell.err_eta);
        s.max_err_rl = std::max(s.max_err_rl, cell.err_rl);
        s.max_err_rl_alt =
            std::max(s.max_err_rl_alt,
                     std::fabs(cell.rl_exact - cell.rlp_approx));
        s.max_err_rb = std::max(s.max_err_rb, cell.err_rb);
        s.max_err_rs = std::max(s.max_err_rs, cell.err_rs);
      } catch (const infeasible_error& e) {
        cell.feasible = false;
        table.summaries[k].n_infeasible += 1;
        table.warnings.push_back("constraint " + detail::format_g(c) +
                                 " infeasible for " + labels[k] + ": " +
                                 e.what());
      }
      row.cells.push_back(cell);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void emit_csv(const SweepTable& table, const std::string& path) {
  const auto labels = detail::param_labels(table.params_list);
  static constexpr const char* kFields[] = {
      "rb_exact",   "rs_exact",   "eta_exact",     "rl_exact",
      "phi_exact",  "rb_approx",  "rs_approx",     "eta_at_approx",
      "rl_at_approx", "rlp_approx", "phi_approx",  "err_eta",
      "err_rl",     "err_rb",     "err_rs"};
  std::string out = "constraint";
  for (const auto& label : labels) {
    for (const char* f : kFields) {
      out += ',';
      out += f;
      out += '_';
      out += label;
    }
  }
  out += '\n';
  for (const auto& row : table.rows) {
    out += detail::format_g(row.constraint);
    for (const auto& cell : row.cells) {
      const double fields[] = {
          cell.rb_exact,     cell.rs_exact,   cell.eta_exact,
          cell.rl_exact,     cell.phi_exact,  cell.rb_approx,
          cell.rs_approx,    cell.eta_at_approx, cell.rl_at_approx,
          cell.rlp_approx,   cell.phi_approx, cell.err_eta,
          cell.err_rl,       cell.err_rb,     cell.err_rs};
      for (double v : fields) {
        out += ',';
        out += detail::format_g(v);
      }
    }
    out += '\n';
  }
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw io_error("emit_csv: cannot open " + path);
  stream.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!stream) throw io_error("emit_csv: write failed for " + path);
}

namespace detail {

inline std::pair<double, double> cell_metric(const SweepCell& cell,
                                             Metric metric) {
  switch (metric) {
    case Metric::ETA: return {cell.eta_exact, cell.eta_at_approx};
    case Metric::RL: return {cell.rl_exact, cell.rl_at_approx};
    case Metric::PHI: return {cell.phi_exact, cell.phi_approx};
    case Metric::RB: return {cell.rb_exact, cell.rb_approx};
    case Metric::RS: return {cell.rs_exact, cell.rs_approx};
  }
  return {0.0, 0.0};
}

inline const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::ETA: return "throughput";
    case Metric::RL: return "leakage rate";
    case Metric::PHI: return "secrecy cost";
    case Metric::RB: return "codeword rate";
    case Metric::RS: return "secrecy rate";
  }
  return "";
}

}  // namespace detail

// Standalone SVG 1.1 line chart: one polyline per (params, exact/approx)
// series, solid for exact and dashed for the closed form. Pure rendering of
// the table contents.
inline void emit_svg(const SweepTable& table, Metric metric,
                     const std::string& path) {
  if (table.rows.empty() || table.params_list.empty()) {
    throw std::invalid_argument("emit_svg: table must be non-empty");
  }
  struct Series {
    std::string label;
    bool exact = true;
    std::string color;
    std::vector<std::pair<double, double>> pts;
  };
  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#ff7f0e", "#8c564b"};
  const auto labels = detail::param_labels(table.params_list);
  std::vector<Series> series;
  for (std::size_t k = 0; k < table.params_list.size(); ++k) {
    for (bool exact : {true, false}) {
      Series s;
      s.label = labels[k] + (exact ? " exact" : " approx");
      s.exact = exact;
      s.color = kPalette[k % 6];
      for (const auto& row : table.rows) {
        const auto [ye, ya] = detail::cell_metric(row.cells[k], metric);
        const double y = exact ? ye : ya;
        if (row.cells[k].feasible && !std::isnan(y)) {
          s.pts.emplace_back(row.constraint, y);
        }
      }
      series.push_back(std::move(s));
    }
  }

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!(x_min <= x_max)) {
    x_min = 0.0;
    x_max = 1.0;
    y_min = 0.0;
    y_max = 1.0;
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  const double y_pad = (y_max > y_min) ? 0.05 * (y_max - y_min) : 0.5;
  y_min -= y_pad;
  y_max += y_pad;

  const double width = 720.0, height = 480.0;
  const double ml = 80.0, mr = 24.0, mt = 36.0, mb = 56.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) {
    return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph;
  };
  auto num = [](double v) { return detail::format_g(v, 6); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " +
         num(width) + " " + num(height) + "\">\n";
  svg += "<rect width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"white\"/>\n";
  svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" +
         num(ml + pw) + "\" y2=\"" + num(mt + ph) + "\"/>\n";
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" +
         num(ml) + "\" y2=\"" + num(mt + ph) + "\"/>\n";
  svg += "</g>\n";

  const int n_ticks = 6;
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (int i = 0; i < n_ticks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / (n_ticks - 1);
    const double yv = y_min + (y_max - y_min) * i / (n_ticks - 1);
    svg += "<line stroke=\"black\" x1=\"" + num(px(xv)) + "\" y1=\"" +
           num(mt + ph) + "\" x2=\"" + num(px(xv)) + "\" y2=\"" +
           num(mt + ph + 5) + "\"/>\n";
    svg += "<text text-anchor=\"middle\" x=\"" + num(px(xv)) + "\" y=\"" +
           num(mt + ph + 20) + "\">" + detail::format_g(xv, 4) + "</text>\n";
    svg += "<line stroke=\"black\" x1=\"" + num(ml - 5) + "\" y1=\"" +
           num(py(yv)) + "\" x2=\"" + num(ml) + "\" y2=\"" + num(py(yv)) +
           "\"/>\n";
    svg += "<text text-anchor=\"end\" x=\"" + num(ml - 8) + "\" y=\"" +
           num(py(yv) + 4) + "\">" + detail::format_g(yv, 4) + "</text>\n";
  }
  const std::string x_label =
      table.case_kind == SweepCase::CASE1 ? "leakage cap" : "throughput floor";
  svg += "<text text-anchor=\"middle\" x=\"" + num(ml + pw / 2) + "\" y=\"" +
         num(height - 12) + "\">" + x_label + "</text>\n";
  svg += "<text x=\"" + num(8) + "\" y=\"" + num(mt - 14) + "\">" +
         std::string(detail::metric_name(metric)) + "</text>\n";
  svg += "</g>\n";

  for (const auto& s : series) {
    if (s.pts.empty()) continue;
    svg += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"2\"";
    if (!s.exact) svg += " stroke-dasharray=\"6 3\"";
    svg += " points=\"";
    for (std::size_t i = 0; i < s.pts.size(); ++i) {
      if (i) svg += ' ';
      svg += num(px(s.pts[i].first)) + "," + num(py(s.pts[i].second));
    }
    svg += "\"/>\n";
  }

  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double lx = ml + pw - 150.0;
    const double ly = mt + 14.0 + 18.0 * static_cast<double>(i);
    svg += "<line stroke=\"" + series[i].color + "\" stroke-width=\"2\"";
    if (!series[i].exact) svg += " stroke-dasharray=\"6 3\"";
    svg += " x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(lx + 28) + "\" y2=\"" + num(ly - 4) + "\"/>\n";
    svg += "<text x=\"" + num(lx + 34) + "\" y=\"" + num(ly) + "\">" +
           series[i].label + "</text>\n";
  }
  svg += "</g>\n</svg>\n";

  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw io_error("emit_svg: cannot open " + path);
  stream.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!stream) throw io_error("emit_svg: write failed for " + path);
}

}  // namespace leakrate::report
