// Command-line experiment runner: parameter sweeps, design optimization,
// invariant validation and baseline comparisons, all emitting deterministic
// CSV keyed by an explicit seed.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hybridpilot/designer.hpp"
#include "hybridpilot/sim.hpp"

using namespace hp;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct Output {
  std::ofstream file;
  bool to_file = false;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      to_file = true;
    }
  }
  std::ostream& stream() { return to_file ? file : std::cout; }
};

void write_meta(const std::string& out_path, const NetworkScenario& sc,
                const std::string& invocation) {
  if (out_path.empty()) return;
  std::ofstream meta(out_path + ".meta");
  meta << "# experiment metadata\n" << "command = " << invocation << "\n";
  save_scenario(sc, meta);
}

struct BaselineRow {
  std::string name;
  FrameDesign design;
  bool contaminated = false;
  bool feasible = true;
  std::string reason;
};

// tm_only: alpha pinned to 0, (lambda, tau) optimized per point.
// ts_only: alpha = 1, tau = T, lambda optimized.
FrameDesign optimize_pinned(const NetworkScenario& sc, FrameDesign d, bool pin_tau) {
  RateInputs in = RateInputs::make(sc, d);
  for (int round = 0; round < 4; ++round) {
    int worst = 0;
    double w = std::numeric_limits<double>::infinity();
    in.design = d;
    for (int k = 0; k < sc.K; ++k) {
      double r = rate_approx(in, k);
      if (r < w) { w = r; worst = k; }
    }
    DesignConstants c = DesignConstants::from(in, worst);
    d.lambda = lambda_opt(c, d.alpha, d.tau).lambda;
    d.lambda = std::clamp(d.lambda, 0.01, 0.99);
    if (!pin_tau) d.tau = static_cast<int>(optimize_tau(c, d.alpha, d.lambda).arg);
  }
  return d;
}

std::vector<BaselineRow> baseline_designs(const NetworkScenario& sc, const FrameDesign& hybrid,
                                          const std::vector<std::string>& names) {
  std::vector<BaselineRow> rows;
  for (const std::string& b : names) {
    BaselineRow row;
    row.name = b;
    if (b == "hybrid") {
      row.design = hybrid;
    } else if (b == "tm_only") {
      row.design = hybrid;
      row.design.alpha = 0.0;
      row.design = optimize_pinned(sc, row.design, /*pin_tau=*/false);
    } else if (b == "ts_only") {
      row.design = hybrid;
      row.design.alpha = 1.0;
      row.design.tau = hybrid.T;
      row.design = optimize_pinned(sc, row.design, /*pin_tau=*/true);
    } else if (b == "contaminated_reuse") {
      row.design = hybrid;
      row.design.alpha = 0.0;
      row.design.tau = sc.K;  // K orthogonal pilots reused in every cell
      row.contaminated = true;
      if (row.design.tau > row.design.T) {
        row.feasible = false;
        row.reason = "tau > T";
      }
    } else {
      throw CLI::ValidationError("unknown baseline: " + b);
    }
    rows.push_back(row);
  }
  return rows;
}

const char* kHeader =
    "baseline,axis,axis_value,alpha,lambda,tau,T,M,"
    "rate_closed,rate_emp,rate_emp_lo,rate_emp_hi,mse_closed,mse_emp,mse_emp_se,trials";

void emit_row(std::ostream& os, const std::string& baseline, const std::string& axis,
              double axis_value, const NetworkScenario& sc, const BaselineRow& row,
              const std::string& mode, int trials, std::uint64_t seed) {
  const FrameDesign& d = row.design;
  double rate_closed = NAN, mse_closed = NAN;
  if (!row.contaminated) {
    rate_closed = min_rate(sc, d);
    mse_closed = 0.0;
    double denom = 0.0;
    for (int k = 0; k < sc.K; ++k) {
      mse_closed += mse_theoretical(d, sc, k) * sc.beta(0, k);
      denom += sc.beta(0, k);
    }
    mse_closed /= denom;
  }

  double rate_emp = NAN, lo = NAN, hi = NAN, mse_emp = NAN, mse_se = NAN;
  int used_trials = 0;
  if (mode != "closed_form") {
    SimOptions opts;
    opts.reuse_pilots = row.contaminated;
    SimSummary sum = run_trials(sc, d, opts, trials, seed);
    used_trials = trials;
    mse_emp = sum.mse_empirical;
    double m = 0.0, s2 = 0.0;
    for (const TrialResult& t : sum.per_trial) m += t.sum_dh2 / t.sum_h2;
    m /= trials;
    for (const TrialResult& t : sum.per_trial) {
      double dd = t.sum_dh2 / t.sum_h2 - m;
      s2 += dd * dd;
    }
    mse_se = trials > 1 ? std::sqrt(s2 / (trials - 1) / trials) : 0.0;

    SinrEstimate se;
    se.inv_gamma_I_mean = sum.inv_gamma_I_mean;
    se.inv_gamma_II_mean = sum.inv_gamma_II_mean;
    se.inv_gamma_I_se = sum.inv_gamma_I_se;
    se.inv_gamma_II_se = sum.inv_gamma_II_se;
    se.trials = trials;
    rate_emp = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sc.K; ++k) {
      EmpiricalRate er = empirical_rate(se, d, k);
      if (er.rate < rate_emp) {
        rate_emp = er.rate;
        lo = er.ci_lo;
        hi = er.ci_hi;
      }
    }
  }
  if (mode == "closed_form") {
    rate_emp = lo = hi = mse_emp = mse_se = NAN;
  }

  os << baseline << ',' << axis << ',' << num(axis_value) << ',' << num(d.alpha) << ','
     << num(d.lambda) << ',' << d.tau << ',' << d.T << ',' << sc.M << ',' << num(rate_closed)
     << ',' << num(rate_emp) << ',' << num(lo) << ',' << num(hi) << ',' << num(mse_closed) << ','
     << num(mse_emp) << ',' << num(mse_se) << ',' << used_trials << '\n';
}

int cmd_sweep(const std::string& config, const std::string& axis, double from, double to,
              double step, FrameDesign base, const std::vector<std::string>& baselines,
              const std::string& mode, int trials, std::uint64_t seed, const std::string& out,
              const std::string& invocation) {
  NetworkScenario sc0 = load_scenario_file(config);
  Output output(out);
  std::ostream& os = output.stream();
  os << kHeader << '\n';
  write_meta(out, sc0, invocation);

  if (step <= 0.0) throw CLI::ValidationError("--step must be positive");
  for (double v = from; v <= to + 1e-12; v += step) {
    NetworkScenario sc = sc0;
    FrameDesign d = base;
    d.T = sc.T;
    if (axis == "alpha") d.alpha = v;
    else if (axis == "lambda") d.lambda = v;
    else if (axis == "tau") d.tau = static_cast<int>(std::lround(v));
    else if (axis == "T") {
      sc = make_scenario(sc0.L, sc0.K, sc0.M, static_cast<int>(std::lround(v)), sc0.gamma,
                         sc0.snr_db, sc0.seed);
      d.T = sc.T;
    } else if (axis == "M") {
      sc = make_scenario(sc0.L, sc0.K, static_cast<int>(std::lround(v)), sc0.T, sc0.gamma,
                         sc0.snr_db, sc0.seed);
    } else {
      throw CLI::ValidationError("unknown sweep axis: " + axis);
    }
    if (d.tau > d.T) d.tau = d.T;

    const int KL = sc.num_users();
    if (d.alpha < 0.0 || d.alpha > 1.0 || d.lambda <= 0.0 || d.lambda >= 1.0 || d.tau < KL ||
        d.tau > d.T) {
      std::cerr << "skipping " << axis << "=" << num(v) << ": infeasible design\n";
      continue;
    }
    for (const BaselineRow& row : baseline_designs(sc, d, baselines)) {
      if (!row.feasible) {
        std::cerr << "skipping " << row.name << " at " << axis << "=" << num(v) << ": "
                  << row.reason << "\n";
        continue;
      }
      emit_row(os, row.name, axis, v, sc, row, mode, trials, seed);
    }
  }
  return 0;
}

int cmd_optimize(const std::string& config, int trials, std::uint64_t seed, bool couple_pe,
                 const std::string& out, const std::string& invocation) {
  NetworkScenario sc = load_scenario_file(config);
  FrameDesign init{0.5, 0.5, sc.num_users(), sc.T};
  P1Options opts;
  opts.couple_p_e = couple_pe;
  opts.trials = trials;
  opts.seed = seed;
  P1Result res = solve_p1(sc, init, opts);

  RateInputs in = RateInputs::make(sc, res.design);
  int worst = 0;
  double w = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sc.K; ++k) {
    double r = rate_approx(in, k);
    if (r < w) { w = r; worst = k; }
  }
  DesignConstants c = DesignConstants::from(in, worst);
  AlphaClassification ac = classify_alpha(c, res.design.lambda, res.design.tau);
  TauClassification tc = classify_tau(c, std::max(res.design.alpha, 1e-6), res.design.lambda);

  Output output(out);
  std::ostream& os = output.stream();
  os << "key,value\n"
     << "alpha," << num(res.design.alpha) << "\n"
     << "lambda," << num(res.design.lambda) << "\n"
     << "tau," << res.design.tau << "\n"
     << "T," << res.design.T << "\n"
     << "min_rate," << num(res.min_rate) << "\n"
     << "rounds," << res.rounds << "\n"
     << "p_e," << num(res.p_e) << "\n"
     << "alpha_case,"
     << (ac.shape == AlphaCase::Convex ? "convex"
                                       : ac.shape == AlphaCase::Concave ? "concave" : "mixed")
     << "\n"
     << "tau_case,"
     << (tc.shape == TauCase::AtMinimum ? "minimum_overhead" : "interior_or_full") << "\n";
  write_meta(out, sc, invocation);
  return 0;
}

bool check(std::ostream& os, const std::string& name, bool ok) {
  os << (ok ? "PASS " : "FAIL ") << name << "\n";
  return ok;
}

int cmd_validate(const std::string& config, int trials, std::uint64_t seed, bool corrupt_pilots,
                 const std::string& out, const std::string& invocation) {
  NetworkScenario sc = load_scenario_file(config);
  Output output(out);
  std::ostream& os = output.stream();
  write_meta(out, sc, invocation);
  bool all = true;

  // pilot orthogonality: Gram matrix of the book is lambda*tau*I
  {
    const int KL = sc.num_users();
    const int tau = std::max(KL, std::min(sc.T, 2 * KL));
    PilotBook book = build_pilot_book(KL, tau, 0.5);
    if (corrupt_pilots) book.P.row(0) = book.P.row(KL > 1 ? 1 : 0);
    Eigen::MatrixXcd gram = book.P * book.P.adjoint();
    Eigen::MatrixXcd target =
        book.row_energy() * Eigen::MatrixXcd::Identity(KL, KL);
    all &= check(os, "pilot orthogonality", (gram - target).cwiseAbs().maxCoeff() < 1e-9);
  }

  // detector power ordering: signal power scales ~M^2, noise ~M
  {
    FrameDesign d{1.0, 0.5, std::max(sc.num_users(), std::min(sc.T, 20)), sc.T};
    std::vector<double> ps, pn;
    for (int M : {64, 128}) {
      NetworkScenario s = make_scenario(sc.L, sc.K, M, sc.T, sc.gamma, sc.snr_db, sc.seed);
      SimOptions o;
      SimSummary sum = run_trials(s, d, o, std::max(50, trials / 8), seed);
      ps.push_back(sum.p_S);
      pn.push_back(sum.p_N);
    }
    double slope_s = std::log2(ps[1] / ps[0]);
    double slope_n = std::log2(pn[1] / pn[0]);
    all &= check(os, "signal power ~ M^2", slope_s > 1.8 && slope_s < 2.2);
    all &= check(os, "noise power ~ M", slope_n > 0.8 && slope_n < 1.2);
  }

  // closed-form derivatives vs central finite differences
  {
    RateInputs in = RateInputs::make(sc, FrameDesign{0.5, 0.5, sc.num_users(), sc.T});
    DesignConstants c = DesignConstants::from(in, 0);
    bool ok = true;
    TrialRng rng(seed, 0xde);
    for (int i = 0; i < 20; ++i) {
      double a = rng.uniform(0.05, 0.95), l = rng.uniform(0.1, 0.9);
      double t = rng.uniform(sc.num_users(), sc.T);
      double h = 1e-6;
      double fda = (closed_rate(c, a + h, l, t) - closed_rate(c, a - h, l, t)) / (2 * h);
      double fdt = (closed_rate(c, a, l, t + h) - closed_rate(c, a, l, t - h)) / (2 * h);
      ok &= std::abs(fda - d_rate_d_alpha(c, a, l, t)) < 1e-4 * (1.0 + std::abs(fda));
      ok &= std::abs(fdt - d_rate_d_tau(c, a, l, t)) < 1e-4 * (1.0 + std::abs(fdt));
    }
    all &= check(os, "analytic derivatives", ok);
  }

  // determinism: two runs with the same seed agree exactly
  {
    FrameDesign d{0.5, 0.5, sc.num_users(), sc.T};
    SimOptions o;
    SimSummary a = run_trials(sc, d, o, std::max(20, trials / 20), seed);
    SimSummary b = run_trials(sc, d, o, std::max(20, trials / 20), seed);
    all &= check(os, "seeded determinism",
                 a.mse_empirical == b.mse_empirical &&
                     a.inv_gamma_I_mean == b.inv_gamma_I_mean);
  }

  os << (all ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return all ? 0 : 1;
}

int cmd_compare(const std::string& config, const std::string& mode, int trials,
                std::uint64_t seed, const std::string& out, const std::string& invocation) {
  NetworkScenario sc = load_scenario_file(config);
  FrameDesign init{0.5, 0.5, sc.num_users(), sc.T};
  P1Result hybrid = solve_p1(sc, init);

  Output output(out);
  std::ostream& os = output.stream();
  os << kHeader << '\n';
  write_meta(out, sc, invocation);
  for (const BaselineRow& row : baseline_designs(
           sc, hybrid.design, {"hybrid", "tm_only", "ts_only", "contaminated_reuse"})) {
    if (!row.feasible) {
      std::cerr << "skipping " << row.name << ": " << row.reason << "\n";
      continue;
    }
    emit_row(os, row.name, "none", 0.0, sc, row, row.contaminated ? "monte_carlo" : mode, trials,
             seed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid-pilot design and simulation toolkit"};
  app.require_subcommand(1);

  std::string config, out, mode = "closed_form", axis = "lambda";
  int trials = 1000;
  std::uint64_t seed = 1;
  double from = 0.05, to = 0.95, step = 0.05;
  FrameDesign base{0.5, 0.5, 1, 1};
  bool base_tau_set = false;
  std::vector<std::string> baselines{"hybrid"};
  bool couple_pe = false, corrupt_pilots = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario config file")->required();
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out, "output CSV path (default: stdout)");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "sweep a design axis");
  add_common(sweep);
  sweep->add_option("--mode", mode, "closed_form | monte_carlo | both");
  sweep->add_option("--axis", axis, "alpha | lambda | tau | T | M");
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--step", step);
  sweep->add_option("--alpha", base.alpha, "fixed alpha");
  sweep->add_option("--lambda", base.lambda, "fixed lambda");
  sweep->add_option("--tau", base.tau, "fixed tau (default: K*L)")->each([&](const std::string&) {
    base_tau_set = true;
  });
  sweep->add_option("--baselines", baselines,
                    "subset of hybrid,tm_only,ts_only,contaminated_reuse");

  CLI::App* optimize = app.add_subcommand("optimize", "solve the max-min design problem");
  add_common(optimize);
  optimize->add_flag("--couple-pe", couple_pe, "iterate design with measured symbol errors");

  CLI::App* validate = app.add_subcommand("validate", "run the invariant suites");
  add_common(validate);
  validate->add_flag("--corrupt-pilots", corrupt_pilots, "negative control");

  CLI::App* compare = app.add_subcommand("compare", "optimized hybrid vs pure baselines");
  add_common(compare);
  compare->add_option("--mode", mode, "closed_form | monte_carlo | both");

  CLI11_PARSE(app, argc, argv);

  std::ostringstream inv;
  for (int i = 0; i < argc; ++i) inv << (i ? " " : "") << argv[i];

  try {
    if (sweep->parsed()) {
      NetworkScenario sc = load_scenario_file(config);
      if (!base_tau_set) base.tau = sc.num_users();
      return cmd_sweep(config, axis, from, to, step, base, baselines, mode, trials, seed, out,
                       inv.str());
    }
    if (optimize->parsed()) return cmd_optimize(config, trials, seed, couple_pe, out, inv.str());
    if (validate->parsed())
      return cmd_validate(config, trials, seed, corrupt_pilots, out, inv.str());
    if (compare->parsed()) return cmd_compare(config, mode, trials, seed, out, inv.str());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
