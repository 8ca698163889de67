#include "hybridpilot/sim.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hp {

namespace {

TrialResult one_trial(const NetworkScenario& sc, const FrameDesign& design,
                      const SimOptions& opts, const PilotBook& book,
                      std::uint64_t master_seed, std::uint64_t trial_index) {
  TrialRng rng(master_seed, trial_index + 1);
  const int M = sc.M;
  const int K = sc.K;
  const int U = sc.num_users();
  const int tau = design.tau;
  const int T = design.T;
  const double data_power = opts.resolved_data_power(design);

  ChannelRealization ch = sample_channel(sc, rng);

  std::vector<TransmitFrame> frames;
  frames.reserve(U);
  for (int u = 0; u < U; ++u)
    frames.push_back(assemble_frame(book.P.row(u), design, rng, data_power));

  Eigen::MatrixXcd X(U, T), S(U, T);
  for (int u = 0; u < U; ++u) {
    X.row(u) = frames[u].x.transpose();
    S.row(u) = frames[u].s.transpose();
  }
  Eigen::MatrixXcd noise(M, T);
  const double nstd = std::sqrt(sc.sigma_n2);
  for (int t = 0; t < T; ++t)
    for (int m = 0; m < M; ++m) noise(m, t) = nstd * rng.cgaussian();
  Eigen::MatrixXcd Y = ch.H * X + noise;

  TrialResult res;
  res.inv_gamma_I = Eigen::VectorXd::Zero(K);
  res.inv_gamma_II = Eigen::VectorXd::Zero(K);

  Eigen::MatrixXcd h_hat(M, K);
  for (int k = 0; k < K; ++k)
    h_hat.col(k) = ls_estimate(Y.leftCols(tau), book.P.row(k)).h_hat;

  res.sum_dh2 = (h_hat - ch.H.leftCols(K)).squaredNorm();
  res.sum_h2 = ch.H.leftCols(K).squaredNorm();

  GenieData genie{&ch.H, &X, &S, &noise, K};
  const bool have_phase1 = design.n_ts() > 0;
  const bool have_phase2 = !opts.skip_data_phase && T > tau;

  std::vector<DetectionOutput> phase1(K);
  for (int k = 0; k < K; ++k) {
    ChannelEstimate est;
    est.h_hat = h_hat.col(k);
    if (have_phase1) {
      DetectionOutput d = mf_detect(Y, est, k, book, design, Phase::I, &genie);
      double denom = d.p_I1 + d.p_I2 + d.p_I3 + d.p_N;
      res.inv_gamma_I(k) = denom / d.p_S;
      if (k == 0) {
        res.p_S = d.p_S;
        res.p_I1 = d.p_I1;
        res.p_I2 = d.p_I2;
        res.p_I3 = d.p_I3;
        res.p_N = d.p_N;
        res.corr_S_I1 = d.corr_S_I1;
      }
      phase1[k] = std::move(d);
    }
    if (have_phase2) {
      DetectionOutput d = mf_detect(Y, est, k, book, design, Phase::II, &genie);
      double denom = d.p_I1 + d.p_I2 + d.p_I3 + d.p_N;
      res.inv_gamma_II(k) = denom / d.p_S;
      if (k == 0) {
        res.p_Sp = d.p_S;
        res.p_I1p = d.p_I1;
        res.p_I2p = d.p_I2;
        res.p_I3p = d.p_I3;
        res.p_Np = d.p_N;
      }
    }
  }

  if (opts.data_aided && have_phase1) {
    const int n_tm = design.n_tm();
    const int n_ts = design.n_ts();
    const double ts_power = 1.0 - design.lambda;
    Eigen::MatrixXcd s_hat = Eigen::MatrixXcd::Zero(K, tau);
    for (int k = 0; k < K; ++k) {
      HardDecision dec = hard_decide(phase1[k].soft, ts_power);
      s_hat.row(k).segment(n_tm, n_ts) = dec.symbols.transpose();
      res.symbol_errors +=
          count_symbol_errors(dec.symbols, S.row(k).segment(n_tm, n_ts).transpose());
      res.symbols += n_ts;
    }
    Eigen::MatrixXcd refined = data_aided_iterate(Y.leftCols(tau), h_hat, s_hat, book, design);
    res.sum_dh2_refined = (refined - ch.H.leftCols(K)).squaredNorm();
    res.refined_improved = res.sum_dh2_refined < res.sum_dh2;
  }
  return res;
}

SimSummary reduce(std::vector<TrialResult> per_trial, int K) {
  SimSummary sum;
  const int n = static_cast<int>(per_trial.size());
  sum.trials = n;
  double dh2 = 0, h2 = 0, dh2r = 0;
  long long wins = 0, errs = 0, syms = 0;
  Eigen::VectorXd g1 = Eigen::VectorXd::Zero(K), g2 = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd g1sq = Eigen::VectorXd::Zero(K), g2sq = Eigen::VectorXd::Zero(K);
  for (const TrialResult& r : per_trial) {
    dh2 += r.sum_dh2;
    h2 += r.sum_h2;
    dh2r += r.sum_dh2_refined;
    wins += r.refined_improved ? 1 : 0;
    errs += r.symbol_errors;
    syms += r.symbols;
    g1 += r.inv_gamma_I;
    g2 += r.inv_gamma_II;
    g1sq += r.inv_gamma_I.cwiseAbs2();
    g2sq += r.inv_gamma_II.cwiseAbs2();
    sum.p_S += r.p_S;
    sum.p_I1 += r.p_I1;
    sum.p_I2 += r.p_I2;
    sum.p_I3 += r.p_I3;
    sum.p_N += r.p_N;
    sum.p_Sp += r.p_Sp;
    sum.p_I1p += r.p_I1p;
    sum.p_I2p += r.p_I2p;
    sum.p_I3p += r.p_I3p;
    sum.p_Np += r.p_Np;
    sum.corr_S_I1 += r.corr_S_I1;
  }
  sum.mse_empirical = h2 > 0 ? dh2 / h2 : 0.0;
  sum.mse_refined = h2 > 0 ? dh2r / h2 : 0.0;
  sum.refined_win_fraction = n > 0 ? static_cast<double>(wins) / n : 0.0;
  sum.symbol_error_rate = syms > 0 ? static_cast<double>(errs) / syms : 0.0;
  const double inv_n = n > 0 ? 1.0 / n : 0.0;
  sum.inv_gamma_I_mean = g1 * inv_n;
  sum.inv_gamma_II_mean = g2 * inv_n;
  sum.inv_gamma_I_se.resize(K);
  sum.inv_gamma_II_se.resize(K);
  for (int k = 0; k < K; ++k) {
    double v1 = std::max(0.0, g1sq(k) * inv_n - sum.inv_gamma_I_mean(k) * sum.inv_gamma_I_mean(k));
    double v2 =
        std::max(0.0, g2sq(k) * inv_n - sum.inv_gamma_II_mean(k) * sum.inv_gamma_II_mean(k));
    sum.inv_gamma_I_se(k) = n > 1 ? std::sqrt(v1 / (n - 1)) : 0.0;
    sum.inv_gamma_II_se(k) = n > 1 ? std::sqrt(v2 / (n - 1)) : 0.0;
  }
  for (double* p : {&sum.p_S, &sum.p_I1, &sum.p_I2, &sum.p_I3, &sum.p_N, &sum.p_Sp, &sum.p_I1p,
                    &sum.p_I2p, &sum.p_I3p, &sum.p_Np})
    *p *= inv_n;
  sum.corr_S_I1 *= inv_n;
  sum.per_trial = std::move(per_trial);
  return sum;
}

FrameDesign effective_design(const FrameDesign& design, const SimOptions& opts) {
  FrameDesign d = design;
  if (opts.skip_data_phase) d.T = d.tau;
  return d;
}

PilotBook book_for(const NetworkScenario& sc, const FrameDesign& design, const SimOptions& opts) {
  return opts.reuse_pilots ? build_reused_pilot_book(sc.L, sc.K, design.tau, design.lambda)
                           : build_pilot_book(sc.num_users(), design.tau, design.lambda);
}

}  // namespace

double SimSummary::zeta() const {
  double denom = p_S * p_I1;
  return denom > 0 ? std::norm(corr_S_I1) / denom : 0.0;
}

TrialResult simulate_trial(const NetworkScenario& sc, const FrameDesign& design,
                           const SimOptions& opts, std::uint64_t master_seed,
                           std::uint64_t trial_index) {
  FrameDesign d = effective_design(design, opts);
  d.validate(opts.reuse_pilots ? sc.K : sc.num_users());
  PilotBook book = book_for(sc, d, opts);
  return one_trial(sc, d, opts, book, master_seed, trial_index);
}

SimSummary run_trials_serial(const NetworkScenario& sc, const FrameDesign& design,
                             const SimOptions& opts, int trials, std::uint64_t seed) {
  FrameDesign d = effective_design(design, opts);
  d.validate(opts.reuse_pilots ? sc.K : sc.num_users());
  PilotBook book = book_for(sc, d, opts);
  std::vector<TrialResult> per_trial(trials);
  for (int i = 0; i < trials; ++i) per_trial[i] = one_trial(sc, d, opts, book, seed, i);
  return reduce(std::move(per_trial), sc.K);
}

SimSummary run_trials(const NetworkScenario& sc, const FrameDesign& design,
                      const SimOptions& opts, int trials, std::uint64_t seed) {
  if (!opts.parallel) return run_trials_serial(sc, design, opts, trials, seed);
  FrameDesign d = effective_design(design, opts);
  d.validate(opts.reuse_pilots ? sc.K : sc.num_users());
  PilotBook book = book_for(sc, d, opts);
  std::vector<TrialResult> per_trial(trials);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < trials; ++i) per_trial[i] = one_trial(sc, d, opts, book, seed, i);
  return reduce(std::move(per_trial), sc.K);
}

MseEstimate mse_empirical(const NetworkScenario& sc, const FrameDesign& design, int trials,
                          std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  SimOptions opts;
  opts.skip_data_phase = true;
  SimSummary sum = run_trials(sc, design, opts, trials, seed);
  MseEstimate est;
  est.mse = sum.mse_empirical;
  est.trials = trials;
  // spread of the per-trial ratios as a dispersion proxy
  double m = 0, s2 = 0;
  for (const TrialResult& r : sum.per_trial) m += r.sum_dh2 / r.sum_h2;
  m /= trials;
  for (const TrialResult& r : sum.per_trial) {
    double d = r.sum_dh2 / r.sum_h2 - m;
    s2 += d * d;
  }
  est.std_error = trials > 1 ? std::sqrt(s2 / (trials - 1) / trials) : 0.0;
  return est;
}

SinrEstimate empirical_sinr(const NetworkScenario& sc, const FrameDesign& design, int trials,
                            std::uint64_t seed) {
  SimOptions opts;
  SimSummary sum = run_trials(sc, design, opts, trials, seed);
  SinrEstimate est;
  est.inv_gamma_I_mean = sum.inv_gamma_I_mean;
  est.inv_gamma_II_mean = sum.inv_gamma_II_mean;
  est.inv_gamma_I_se = sum.inv_gamma_I_se;
  est.inv_gamma_II_se = sum.inv_gamma_II_se;
  est.trials = trials;
  return est;
}

ZetaEstimate correlation_zeta(const NetworkScenario& sc, const FrameDesign& design, int trials,
                              std::uint64_t seed) {
  ZetaEstimate est;
  est.trials = trials;
  if (design.n_ts() == 0) {
    est.degenerate = true;
    return est;
  }
  SimOptions opts;
  opts.skip_data_phase = true;
  SimSummary sum = run_trials(sc, design, opts, trials, seed);
  if (sum.p_I1 <= 0.0) {
    est.degenerate = true;
    return est;
  }
  est.zeta = sum.zeta();
  return est;
}

}  // namespace hp
