#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "hybridpilot/pilot_frame.hpp"
#include "hybridpilot/receiver.hpp"
#include "hybridpilot/scenario.hpp"

namespace hp {

/// Inputs to the closed-form SINR/rate approximations. The derived constants
/// fold the whole fading table into per-user scalars:
///   b1        = sum_{j,k'} beta_{j,k'}^2
///   b2(k)     = beta_{0,k} * (sum of every other user's beta toward cell 0)
/// When per-user symbol-error probabilities p_e are supplied, the detected
/// target-cell data is assumed cancelled and only residual errors interfere:
///   c1(k)     = 4 p_e(k) sum_{k'} beta_{0,k'}^2 + sum_{j!=0,k'} beta_{j,k'}^2
///   c2(k)     = beta_{0,k} (sum_{j!=0,k'} beta_{j,k'}
///               + sum_{k'!=k} 4 p_e(k') beta_{0,k'})
struct RateInputs {
  FrameDesign design;
  int M = 1;
  Eigen::MatrixXd beta;  // L x K
  double sigma_n2 = 0.0;
  std::optional<Eigen::VectorXd> p_e;  // per target-cell user

  double b1 = 0.0;
  Eigen::VectorXd b2;
  Eigen::VectorXd c1;  // only filled when p_e is set
  Eigen::VectorXd c2;

  // Effective interference constants: (b1, b2) without p_e, (c1, c2) with.
  double C1(int k) const { return p_e ? c1(k) : b1; }
  double C2(int k) const { return p_e ? c2(k) : b2(k); }

  static RateInputs make(const NetworkScenario& sc, const FrameDesign& design,
                         std::optional<Eigen::VectorXd> p_e = std::nullopt);
  static RateInputs make(const NetworkScenario& sc, const FrameDesign& design, double p_e_scalar);
};

/// Closed-form per-phase SINR approximations for target-cell user k.
std::pair<double, double> sinr_approx(const RateInputs& inputs, int k);

/// Weighted two-phase rate built on sinr_approx:
///   (alpha tau / T) log2(1 + gI) + (1 - tau/T) log2(1 + gII).
double rate_approx(const RateInputs& inputs, int k);

struct AsymptoticRate {
  double rate = 0.0;
  bool unbounded = false;  // alpha = 0: no self-interference floor, grows with M
};

/// Large-M limit: noise terms dropped, only the self-interference floor left.
AsymptoticRate asymptotic_rate(const RateInputs& inputs, int k);

struct EmpiricalRate {
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Jensen-bound rate from measured mean inverse SINRs, with a 95% confidence
/// interval propagated through log2(1 + 1/x) by the delta method.
EmpiricalRate empirical_rate(const SinrEstimate& est, const FrameDesign& design, int k);

struct RateReport {
  Eigen::VectorXd gamma_I, gamma_II;  // per target-cell user
  Eigen::VectorXd rate;               // closed form
  Eigen::VectorXd rate_asymptotic;
  std::vector<bool> asymptotic_unbounded;
};

RateReport rate_report(const RateInputs& inputs);

}  // namespace hp
