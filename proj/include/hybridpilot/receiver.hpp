#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hybridpilot/estimator.hpp"
#include "hybridpilot/pilot_frame.hpp"
#include "hybridpilot/scenario.hpp"

namespace hp {

enum class Phase { I, II };

/// Ground truth handed to the detector for term-by-term decomposition of the
/// matched-filter output. Only the test/measurement paths use this.
struct GenieData {
  const Eigen::MatrixXcd* H = nullptr;      // true channels, M x U
  const Eigen::MatrixXcd* X = nullptr;      // transmitted rows, U x T
  const Eigen::MatrixXcd* S = nullptr;      // data rows, U x T
  const Eigen::MatrixXcd* noise = nullptr;  // M x T
  int K = 0;                                // users per cell; cell 0 owns columns [0, K)
};

struct DetectionOutput {
  Eigen::VectorXcd soft;  // h_hat^H y / ||h_hat||^2 per symbol of the phase

  // Genie ledger: raw matched-filter terms per symbol. Their sum equals the
  // raw matched-filter output exactly.
  bool has_ledger = false;
  Eigen::VectorXcd S, I1, I2, I3, N;
  double p_S = 0, p_I1 = 0, p_I2 = 0, p_I3 = 0, p_N = 0;  // symbol-averaged powers
  std::complex<double> corr_S_I1{0.0, 0.0};               // symbol-averaged conj(S)*I1
};

/// Matched-filter detection for target-cell user k over one phase. Phase I
/// first strips the user's own pilot from the received symbols.
DetectionOutput mf_detect(const Eigen::Ref<const Eigen::MatrixXcd>& Y,
                          const ChannelEstimate& est, int user_k, const PilotBook& book,
                          const FrameDesign& design, Phase phase,
                          const GenieData* genie = nullptr);

struct HardDecision {
  std::vector<unsigned> index;   // QPSK quadrant per symbol
  Eigen::VectorXcd symbols;      // nearest constellation points at the given power
};

/// Nearest-point QPSK decision at the given per-symbol power.
HardDecision hard_decide(const Eigen::Ref<const Eigen::VectorXcd>& soft, double power);

int count_symbol_errors(const Eigen::Ref<const Eigen::VectorXcd>& decided,
                        const Eigen::Ref<const Eigen::VectorXcd>& truth);

/// One data-aided refinement: subtract the detected target-cell data from the
/// overhead, then re-run LS. prior is M x K, s_hat is K x tau (zero on the
/// pilot-only segment).
Eigen::MatrixXcd data_aided_iterate(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                                    const Eigen::Ref<const Eigen::MatrixXcd>& prior,
                                    const Eigen::Ref<const Eigen::MatrixXcd>& s_hat,
                                    const PilotBook& book, const FrameDesign& design);

struct SinrEstimate {
  Eigen::VectorXd inv_gamma_I_mean;   // per target-cell user, E[1/gamma^I]
  Eigen::VectorXd inv_gamma_II_mean;  // per target-cell user, E[1/gamma^II]
  Eigen::VectorXd inv_gamma_I_se;
  Eigen::VectorXd inv_gamma_II_se;
  int trials = 0;
};

struct ZetaEstimate {
  double zeta = 0.0;
  bool degenerate = false;  // alpha == 0 or vanishing self-interference
  int trials = 0;
};

// Monte Carlo wrappers (see sim.hpp for the underlying engine).
SinrEstimate empirical_sinr(const NetworkScenario& sc, const FrameDesign& design, int trials,
                            std::uint64_t seed);
ZetaEstimate correlation_zeta(const NetworkScenario& sc, const FrameDesign& design, int trials,
                              std::uint64_t seed);

}  // namespace hp
