#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "hybridpilot/rng.hpp"
#include "hybridpilot/scenario.hpp"

namespace hp {

/// The design triple (alpha, lambda, tau) plus the frame length T.
/// alpha splits the tau-symbol training overhead into (1-alpha)*tau
/// pilot-only symbols followed by alpha*tau superimposed symbols.
struct FrameDesign {
  double alpha = 0.0;   // TM/TS time ratio in [0, 1]
  double lambda = 0.5;  // pilot power ratio in (0, 1)
  int tau = 1;          // training length (symbols)
  int T = 1;            // frame length (symbols)

  int n_tm() const { return static_cast<int>(std::lround((1.0 - alpha) * tau)); }
  int n_ts() const { return tau - n_tm(); }

  void validate(int KL) const;
};

/// Mutually orthogonal constant-modulus pilots: row (j,k) has per-symbol
/// power lambda and ||p||^2 = tau * lambda.
struct PilotBook {
  Eigen::MatrixXcd P;  // (K*L) x tau
  double lambda = 0.0;

  double row_energy() const { return lambda * static_cast<double>(P.cols()); }
};

/// Per-user transmit sequence over a whole frame. x = s + p on the training
/// overhead and x = s beyond it; s is zero on the pilot-only segment.
struct TransmitFrame {
  Eigen::VectorXcd x;  // length T
  Eigen::VectorXcd s;  // length T, zero on [0, n_tm)
  Eigen::VectorXcd p;  // length T, zero beyond tau
};

/// First KL rows of a tau-point harmonic (DFT) basis scaled by sqrt(lambda).
/// Throws std::invalid_argument when tau < KL ("insufficient training length
/// for orthogonality").
PilotBook build_pilot_book(int KL, int tau, double lambda);

/// Pilot book for the contaminated baseline: the same K orthogonal pilots
/// reused in every cell (row (j,k) equals row (0,k)). Requires tau >= K.
PilotBook build_reused_pilot_book(int L, int K, int tau, double lambda);

/// Assembles one user's frame: QPSK data at power (1-lambda) on the TS
/// segment and `data_phase_power` on the pure-data phase (t > tau).
/// The closed-form rate model carries a (1-lambda) data-power factor in both
/// phases, so the default matches it; 1.0 restores unit power beyond the
/// overhead.
TransmitFrame assemble_frame(const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row,
                             const FrameDesign& design, TrialRng& rng,
                             double data_phase_power);

inline TransmitFrame assemble_frame(const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row,
                                    const FrameDesign& design, TrialRng& rng) {
  return assemble_frame(pilot_row, design, rng, 1.0 - design.lambda);
}

/// Y = sum_{j,k} h_{j,k} x_{j,k} + N with AWGN of per-entry variance sigma_n2.
Eigen::MatrixXcd received_matrix(const ChannelRealization& channel,
                                 const std::vector<TransmitFrame>& frames, double sigma_n2,
                                 TrialRng& rng);

/// QPSK point for a 2-bit index, scaled so |point|^2 == power.
std::complex<double> qpsk_point(unsigned index, double power);

}  // namespace hp
