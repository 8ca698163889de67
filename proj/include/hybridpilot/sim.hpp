#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "hybridpilot/pilot_frame.hpp"
#include "hybridpilot/receiver.hpp"
#include "hybridpilot/scenario.hpp"

namespace hp {

/// Knobs for the link-level Monte Carlo engine.
struct SimOptions {
  // Data power on the pure-data phase (t > tau). The rate approximations
  // carry a (1-lambda) factor there, so the default tracks the design's
  // lambda; set >= 0 to override (1.0 restores unit power).
  double data_phase_power = -1.0;
  bool data_aided = false;    // run one decision-feedback refinement
  bool reuse_pilots = false;  // contaminated baseline (pilot reuse, alpha = 0 frame)
  bool skip_data_phase = false;  // training-only runs (MSE, zeta)
  bool parallel = true;

  double resolved_data_power(const FrameDesign& d) const {
    return data_phase_power >= 0.0 ? data_phase_power : 1.0 - d.lambda;
  }
};

/// Per-trial statistics. Fields are plain sums/averages so trial results can
/// be reduced in a fixed order independent of the execution schedule.
struct TrialResult {
  double sum_dh2 = 0.0;  // sum ||h - h_hat||^2 over target-cell users
  double sum_h2 = 0.0;   // sum ||h||^2 over target-cell users

  Eigen::VectorXd inv_gamma_I;   // per target-cell user
  Eigen::VectorXd inv_gamma_II;

  // user-0 ledger powers (symbol-averaged within the trial)
  double p_S = 0, p_I1 = 0, p_I2 = 0, p_I3 = 0, p_N = 0;
  double p_Sp = 0, p_I1p = 0, p_I2p = 0, p_I3p = 0, p_Np = 0;
  std::complex<double> corr_S_I1{0.0, 0.0};

  // data-aided refinement
  double sum_dh2_refined = 0.0;
  bool refined_improved = false;
  long long symbol_errors = 0;
  long long symbols = 0;
};

struct SimSummary {
  int trials = 0;
  std::vector<TrialResult> per_trial;  // in trial order

  double mse_empirical = 0.0;          // E||dh||^2 / E||h||^2
  double mse_refined = 0.0;
  double refined_win_fraction = 0.0;
  double symbol_error_rate = 0.0;

  Eigen::VectorXd inv_gamma_I_mean, inv_gamma_II_mean;
  Eigen::VectorXd inv_gamma_I_se, inv_gamma_II_se;

  // trial-averaged user-0 ledger powers
  double p_S = 0, p_I1 = 0, p_I2 = 0, p_I3 = 0, p_N = 0;
  double p_Sp = 0, p_I1p = 0, p_I2p = 0, p_I3p = 0, p_Np = 0;
  std::complex<double> corr_S_I1{0.0, 0.0};
  double zeta() const;
};

/// One full link-level trial: channel draw, frame assembly, reception, LS
/// estimation, matched-filter ledger, optional data-aided refinement.
TrialResult simulate_trial(const NetworkScenario& sc, const FrameDesign& design,
                           const SimOptions& opts, std::uint64_t master_seed,
                           std::uint64_t trial_index);

/// Runs `trials` independent trials and reduces them in trial order. The
/// OpenMP path and the serial reference produce identical summaries.
SimSummary run_trials(const NetworkScenario& sc, const FrameDesign& design,
                      const SimOptions& opts, int trials, std::uint64_t seed);

/// Serial reference implementation of run_trials.
SimSummary run_trials_serial(const NetworkScenario& sc, const FrameDesign& design,
                             const SimOptions& opts, int trials, std::uint64_t seed);

}  // namespace hp
