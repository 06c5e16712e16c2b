#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leakrate/leakrate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

constexpr std::uint64_t kDefaultSeed = 20240915;

struct SolveOptions {
  double gamma_b_db = 13.0;
  double gamma_e_db = 3.0;
  double constraint = 0.0;
  std::string format = "plain";
};

struct SweepOptions {
  std::vector<double> gamma_b_db;
  double gamma_e_db = 3.0;
  int points = 50;
  std::string out_csv;
  std::string out_svg;
  std::string metric;
};

struct ValidateOptions {
  std::size_t mc_n = 1000000;
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  double tol_scale = 1.0;
};

std::uint64_t resolve_seed(const ValidateOptions& opt) {
  if (opt.seed_given) return opt.seed;
  if (const char* env = std::getenv("LEAKRATE_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return kDefaultSeed;
}

const char* branch_name(leakrate::Case1Branch b) {
  return b == leakrate::Case1Branch::AT_RB_MIN ? "AT_RB_MIN" : "AT_RB_INTERIOR";
}

const char* branch_name(leakrate::Case2Branch b) {
  switch (b) {
    case leakrate::Case2Branch::CLAMP_MIN: return "CLAMP_MIN";
    case leakrate::Case2Branch::CLAMP_MAX: return "CLAMP_MAX";
    case leakrate::Case2Branch::INTERIOR: return "INTERIOR";
  }
  return "";
}

nlohmann::json metrics_json(const leakrate::RatePair& rates,
                            const leakrate::MetricBundle& m) {
  return {{"r_b", rates.r_b},   {"r_s", rates.r_s}, {"p_tx", m.p_tx},
          {"eta", m.eta},       {"phi", m.phi},     {"r_l_exact", m.r_l_exact},
          {"r_lp", m.r_lp}};
}

void print_plain_solution(const char* name, const leakrate::RatePair& rates,
                          const leakrate::MetricBundle& m, const char* branch,
                          bool constraint_active) {
  std::printf("%-12s r_b = %.6g  r_s = %.6g  branch = %s%s\n", name, rates.r_b,
              rates.r_s, branch, constraint_active ? "" : " (cap slack)");
  std::printf("             p_tx = %.6g  eta = %.6g  phi = %.6g  r_l = %.6g  "
              "r_lp = %.6g\n",
              m.p_tx, m.eta, m.phi, m.r_l_exact, m.r_lp);
}

void print_csv_solution(const char* name, const leakrate::RatePair& rates,
                        const leakrate::MetricBundle& m) {
  std::printf("%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", name,
              rates.r_b, rates.r_s, m.p_tx, m.eta, m.phi, m.r_l_exact, m.r_lp);
}

int run_solve(bool is_case1, const SolveOptions& opt) {
  const leakrate::ChannelParams params{leakrate::db_to_linear(opt.gamma_b_db),
                                       leakrate::db_to_linear(opt.gamma_e_db)};
  try {
    nlohmann::json doc;
    doc["case"] = is_case1 ? "case1" : "case2";
    doc["params"] = {{"gamma_b_db", opt.gamma_b_db},
                     {"gamma_e_db", opt.gamma_e_db},
                     {"gamma_b", params.gamma_bar_b},
                     {"gamma_e", params.gamma_bar_e}};
    std::string closed_branch, exact_branch;
    bool closed_active = true, exact_active = true;
    leakrate::RatePair closed_rates, exact_rates;
    leakrate::MetricBundle closed_m, exact_m;

    if (is_case1) {
      const leakrate::Case1Problem prob{params, opt.constraint};
      const auto closed = leakrate::solve_case1_closed_form(prob);
      const auto exact = leakrate::solve_case1_exact(prob);
      doc["constraint"] = {{"xi", opt.constraint},
                           {"xi_max", leakrate::xi_max(params)}};
      closed_rates = closed.rates;
      closed_m = closed.metrics;
      closed_branch = branch_name(closed.branch);
      closed_active = closed.constraint_active;
      exact_rates = exact.rates;
      exact_m = exact.metrics;
      exact_branch = branch_name(exact.branch);
      exact_active = exact.constraint_active;
    } else {
      const leakrate::Case2Problem prob{params, opt.constraint};
      const auto closed = leakrate::solve_case2_closed_form(prob);
      const auto exact = leakrate::solve_case2_exact(prob);
      doc["constraint"] = {{"throughput_floor", opt.constraint},
                           {"gamma_max", leakrate::gamma_max(params)}};
      closed_rates = closed.rates;
      closed_m = closed.metrics;
      closed_branch = branch_name(closed.branch);
      exact_rates = exact.rates;
      exact_m = exact.metrics;
      exact_branch = branch_name(exact.branch);
      if (closed.b_root) doc["closed_form_b_root"] = *closed.b_root;
    }

    if (opt.format == "json") {
      doc["closed_form"] = metrics_json(closed_rates, closed_m);
      doc["closed_form"]["branch"] = closed_branch;
      doc["closed_form"]["constraint_active"] = closed_active;
      doc["exact"] = metrics_json(exact_rates, exact_m);
      doc["exact"]["branch"] = exact_branch;
      doc["exact"]["constraint_active"] = exact_active;
      std::printf("%s\n", doc.dump(2).c_str());
    } else if (opt.format == "csv") {
      std::printf("solver,r_b,r_s,p_tx,eta,phi,r_l_exact,r_lp\n");
      print_csv_solution("closed_form", closed_rates, closed_m);
      print_csv_solution("exact", exact_rates, exact_m);
    } else {
      std::printf("%s  gamma_b = %.6g dB  gamma_e = %.6g dB  %s = %.6g\n",
                  is_case1 ? "case1" : "case2", opt.gamma_b_db, opt.gamma_e_db,
                  is_case1 ? "xi" : "throughput floor", opt.constraint);
      print_plain_solution("closed form:", closed_rates, closed_m,
                           closed_branch.c_str(), closed_active);
      print_plain_solution("exact:", exact_rates, exact_m,
                           exact_branch.c_str(), exact_active);
    }
    return kExitOk;
  } catch (const leakrate::infeasible_error& e) {
    std::fprintf(stderr, "infeasible: %s (feasible up to %.9g)\n", e.what(),
                 e.feasible_max());
    return kExitInfeasible;
  }
}

int run_sweep(bool is_case1, const SweepOptions& opt) {
  if (opt.points < 1) {
    std::fprintf(stderr, "error: --points must be at least 1\n");
    return kExitUsage;
  }
  leakrate::report::SweepSpec spec;
  spec.case_kind = is_case1 ? leakrate::report::SweepCase::CASE1
                            : leakrate::report::SweepCase::CASE2;
  std::vector<double> gb = opt.gamma_b_db;
  if (gb.empty()) gb = {10.0, 13.0};
  for (double db : gb) {
    spec.params_list.push_back({leakrate::db_to_linear(db),
                                leakrate::db_to_linear(opt.gamma_e_db)});
  }

  double feasible_max = std::numeric_limits<double>::infinity();
  for (const auto& p : spec.params_list) {
    feasible_max = std::min(feasible_max, is_case1 ? leakrate::xi_max(p)
                                                   : leakrate::gamma_max(p));
  }
  const double lo = 0.02 * feasible_max;
  const double hi = 0.95 * feasible_max;
  for (int i = 0; i < opt.points; ++i) {
    spec.constraint_grid.push_back(
        opt.points == 1 ? lo : lo + (hi - lo) * i / (opt.points - 1));
  }

  try {
    const auto table = leakrate::report::sweep(spec);
    for (const auto& w : table.warnings) {
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    for (const auto& s : table.summaries) {
      std::printf(
          "gamma_b = %g dB: max_err_eta = %.6g  max_err_rl = %.6g  "
          "max_err_rl_alt = %.6g  max_err_rb = %.6g  max_err_rs = %.6g  "
          "infeasible_rows = %d\n",
          s.gamma_b_db, s.max_err_eta, s.max_err_rl, s.max_err_rl_alt,
          s.max_err_rb, s.max_err_rs, s.n_infeasible);
    }
    if (!opt.out_csv.empty()) leakrate::report::emit_csv(table, opt.out_csv);
    if (!opt.out_svg.empty()) {
      leakrate::report::Metric metric =
          is_case1 ? leakrate::report::Metric::ETA
                   : leakrate::report::Metric::RL;
      if (opt.metric == "eta") metric = leakrate::report::Metric::ETA;
      else if (opt.metric == "rl") metric = leakrate::report::Metric::RL;
      else if (opt.metric == "phi") metric = leakrate::report::Metric::PHI;
      else if (opt.metric == "rb") metric = leakrate::report::Metric::RB;
      else if (opt.metric == "rs") metric = leakrate::report::Metric::RS;
      leakrate::report::emit_svg(table, metric, opt.out_svg);
    }
    return kExitOk;
  } catch (const leakrate::report::io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const leakrate::infeasible_error& e) {
    std::fprintf(stderr, "infeasible: %s (feasible up to %.9g)\n", e.what(),
                 e.feasible_max());
    return kExitInfeasible;
  }
}

struct CheckLog {
  bool all_ok = true;
  void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s (%s)\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    all_ok = all_ok && ok;
  }
};

int run_validate(const ValidateOptions& opt) {
  using namespace leakrate;
  const std::uint64_t seed = resolve_seed(opt);
  const double scale = opt.tol_scale;
  CheckLog log;
  char detail[256];

  {
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double x =
          1e-3 * std::pow(50.0 / 1e-3, static_cast<double>(i) / 40.0);
      const double via_series = -specfun::ei_neg(x);
      const double via_quad = specfun::quad_exp_over_t(x, x + 80.0);
      worst = std::max(worst, std::fabs(via_series - via_quad) / via_quad);
    }
    std::snprintf(detail, sizeof(detail), "max rel err %.3g vs tol %.3g", worst,
                  1e-9 * scale);
    log.report("exponential_integral_vs_quadrature", worst < 1e-9 * scale,
               detail);
  }

  {
    std::mt19937_64 eng(seed ^ 0x1);
    std::uniform_real_distribution<double> log_x(std::log(1e-3), std::log(1e6));
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double x = std::exp(log_x(eng));
      const double w = specfun::lambert_w0(x);
      worst = std::max(worst,
                       std::fabs(w * std::exp(w) - x) / std::max(1.0, x));
    }
    std::snprintf(detail, sizeof(detail), "max residual %.3g vs tol %.3g",
                  worst, 1e-12 * scale);
    log.report("lambert_w_residual", worst < 1e-12 * scale, detail);
  }

  {
    bool ok = true;
    double margin = 1.0;
    for (int i = 0; i <= 60; ++i) {
      const double x =
          1e-3 * std::pow(50.0 / 1e-3, static_cast<double>(i) / 60.0);
      const double e1 = -specfun::ei_neg(x);
      const double lo_env = 0.5 * std::exp(-x) * std::log1p(2.0 / x);
      const double hi_env = std::exp(-x) * std::log1p(1.0 / x);
      ok = ok && lo_env <= e1 && e1 <= hi_env;
      margin = std::min({margin, e1 - lo_env, hi_env - e1});
    }
    std::snprintf(detail, sizeof(detail), "envelope margin >= %.3g", margin);
    log.report("exp_integral_envelope", ok, detail);
  }

  {
    std::mt19937_64 eng(seed ^ 0x2);
    std::uniform_real_distribution<double> db(3.0, 16.0);
    std::uniform_real_distribution<double> log_lambda(std::log(0.05),
                                                      std::log(3.0));
    double worst_sigma = 0.0;
    for (int i = 0; i < 20; ++i) {
      const ChannelParams p{db_to_linear(db(eng)), 1.0};
      const double lambda = std::exp(log_lambda(eng));
      const double r_b = std::log2(1.0 + lambda * p.gamma_bar_b);
      const auto [est, se] =
          oracle::mc_tx_probability(p, r_b, opt.mc_n, seed + 100 + i);
      const double p_true = tx_probability(p, r_b);
      worst_sigma = std::max(worst_sigma, std::fabs(est - p_true) / se);
    }
    std::snprintf(detail, sizeof(detail),
                  "worst deviation %.3g sigma vs limit %.3g", worst_sigma,
                  4.0 * scale);
    log.report("monte_carlo_tx_probability", worst_sigma < 4.0 * scale,
               detail);
  }

  {
    std::mt19937_64 eng(seed ^ 0x3);
    std::uniform_real_distribution<double> db_b(6.0, 16.0);
    std::uniform_real_distribution<double> db_e(0.0, 6.0);
    std::uniform_real_distribution<double> rb_u(0.2, 8.0);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const ChannelParams p{db_to_linear(db_b(eng)), db_to_linear(db_e(eng))};
      const double r_b = rb_u(eng);
      const RatePair pair{r_b, r_b * frac(eng)};
      const double closed = leakage_exact(p, pair);
      const double quad = oracle::quad_leakage(p, pair);
      worst = std::max(worst,
                       std::fabs(closed - quad) / std::max(1e-30, quad));
    }
    std::snprintf(detail, sizeof(detail), "max rel err %.3g vs tol %.3g", worst,
                  1e-9 * scale);
    log.report("leakage_closed_form_vs_quadrature", worst < 1e-9 * scale,
               detail);
  }

  {
    const ChannelParams p13{db_to_linear(13.0), db_to_linear(3.0)};
    const ChannelParams p10{db_to_linear(10.0), db_to_linear(3.0)};
    struct Probe {
      const char* name;
      oracle::ProblemKind kind;
      ChannelParams params;
      double constraint;
      bool closed_form;
    };
    const Probe probes[] = {
        {"case1_closed_vs_grid_13dB", oracle::ProblemKind::CASE1_APPROX, p13,
         0.1, true},
        {"case1_closed_vs_grid_10dB", oracle::ProblemKind::CASE1_APPROX, p10,
         0.6, true},
        {"case2_closed_vs_grid_13dB", oracle::ProblemKind::CASE2_APPROX, p13,
         0.5, true},
        {"case1_exact_vs_grid_13dB", oracle::ProblemKind::CASE1_EXACT, p13,
         0.1, false},
        {"case2_exact_vs_grid_13dB", oracle::ProblemKind::CASE2_EXACT, p13,
         0.5, false},
    };
    for (const auto& probe : probes) {
      oracle::GridSpec grid = oracle::default_grid(probe.params);
      grid.n_rb = 1000;
      grid.n_rs = 1000;
      const auto res =
          oracle::grid_optimize(probe.kind, probe.params, probe.constraint, grid);
      double obj = 0.0;
      switch (probe.kind) {
        case oracle::ProblemKind::CASE1_APPROX:
          obj = solve_case1_closed_form({probe.params, probe.constraint})
                    .metrics.eta;
          break;
        case oracle::ProblemKind::CASE1_EXACT:
          obj = solve_case1_exact({probe.params, probe.constraint}).metrics.eta;
          break;
        case oracle::ProblemKind::CASE2_APPROX:
          obj = solve_case2_closed_form({probe.params, probe.constraint})
                    .metrics.r_lp;
          break;
        case oracle::ProblemKind::CASE2_EXACT:
          obj = solve_case2_exact({probe.params, probe.constraint})
                    .metrics.r_l_exact;
          break;
      }
      const double gap = std::fabs(obj - res.objective);
      const double tol = (2.0 * res.obj_step_bound + 1e-9) * scale;
      std::snprintf(detail, sizeof(detail), "|gap| %.3g vs bound %.3g", gap,
                    tol);
      log.report(probe.name, gap < tol, detail);
    }
  }

  if (!log.all_ok) {
    std::printf("validation FAILED\n");
    return kExitValidation;
  }
  std::printf("validation OK\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal wiretap-code rates over quasi-static Rayleigh fading"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file with key=value lines");

  SolveOptions solve_opt;
  SweepOptions sweep_opt;
  ValidateOptions validate_opt;
  bool solve_case1_sel = false, sweep_case1_sel = false;

  auto* solve = app.add_subcommand("solve", "Solve one design instance");
  solve->require_subcommand(1);
  auto add_solve_common = [&](CLI::App* sub) {
    sub->add_option("--gamma-b-db", solve_opt.gamma_b_db,
                    "Main-channel average SNR in dB")
        ->capture_default_str();
    sub->add_option("--gamma-e-db", solve_opt.gamma_e_db,
                    "Eavesdropper average SNR in dB")
        ->capture_default_str();
    sub->add_option("--format", solve_opt.format, "Output format")
        ->check(CLI::IsMember({"plain", "json", "csv"}))
        ->capture_default_str();
  };
  auto* solve1 = solve->add_subcommand("case1",
                                       "Max throughput under a leakage cap");
  add_solve_common(solve1);
  solve1->add_option("--xi", solve_opt.constraint, "Average leakage cap")
      ->required();
  solve1->callback([&] { solve_case1_sel = true; });
  auto* solve2 = solve->add_subcommand("case2",
                                       "Min leakage under a throughput floor");
  add_solve_common(solve2);
  solve2->add_option("--throughput", solve_opt.constraint, "Throughput floor")
      ->required();

  auto* sweep = app.add_subcommand("sweep", "Constraint sweep to CSV/SVG");
  sweep->require_subcommand(1);
  auto add_sweep_common = [&](CLI::App* sub) {
    sub->add_option("--gamma-b-db", sweep_opt.gamma_b_db,
                    "Main-channel SNR(s) in dB (repeatable; default 10 13)");
    sub->add_option("--gamma-e-db", sweep_opt.gamma_e_db,
                    "Eavesdropper SNR in dB")
        ->capture_default_str();
    sub->add_option("--points", sweep_opt.points, "Constraint grid size")
        ->capture_default_str();
    sub->add_option("--out-csv", sweep_opt.out_csv, "CSV output path");
    sub->add_option("--out-svg", sweep_opt.out_svg, "SVG output path");
    sub->add_option("--metric", sweep_opt.metric,
                    "SVG metric: eta, rl, phi, rb, rs")
        ->check(CLI::IsMember({"eta", "rl", "phi", "rb", "rs"}));
  };
  auto* sweep1 = sweep->add_subcommand("case1", "Sweep the leakage cap");
  add_sweep_common(sweep1);
  sweep1->callback([&] { sweep_case1_sel = true; });
  auto* sweep2 = sweep->add_subcommand("case2", "Sweep the throughput floor");
  add_sweep_common(sweep2);

  auto* validate =
      app.add_subcommand("validate", "Run the oracle cross-check battery");
  validate->add_option("--mc-n", validate_opt.mc_n,
                       "Monte-Carlo sample count (>= 1e4)")
      ->capture_default_str();
  auto* seed_opt = validate->add_option("--seed", validate_opt.seed,
                                        "RNG seed (overrides LEAKRATE_SEED)");
  validate->add_option("--tol-scale", validate_opt.tol_scale,
                       "Multiplier applied to every tolerance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  validate_opt.seed_given = seed_opt->count() > 0;

  try {
    if (solve->parsed()) return run_solve(solve_case1_sel, solve_opt);
    if (sweep->parsed()) return run_sweep(sweep_case1_sel, sweep_opt);
    if (validate->parsed()) return run_validate(validate_opt);
  } catch (const leakrate::report::io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
