#pragma once

#include <Eigen/Dense>

#include "hybridpilot/pilot_frame.hpp"
#include "hybridpilot/scenario.hpp"

namespace hp {

struct ChannelEstimate {
  Eigen::VectorXcd h_hat;
  // Residual h - h_hat; filled only when the true column is supplied (genie).
  Eigen::VectorXcd delta_h;
};

/// LS estimate from the training overhead: h_hat = Y p^H / ||p||^2.
ChannelEstimate ls_estimate(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                            const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row);

/// Same, with the true channel column for residual bookkeeping.
ChannelEstimate ls_estimate_genie(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                                  const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row,
                                  const Eigen::Ref<const Eigen::VectorXcd>& h_true);

/// Pilot-reuse baseline: identical pilots in every cell, so the estimate is
/// biased by the interfering cells' channels.
ChannelEstimate contaminated_ls_estimate(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                                         const Eigen::Ref<const Eigen::RowVectorXcd>& reused_pilot_row);

/// Closed-form normalized channel MSE:
///   (1/tau) * [ alpha(1-lambda)/lambda * sum(beta)/beta_{1,k} + sigma_n2/(lambda beta_{1,k}) ].
double mse_theoretical(const FrameDesign& design, const NetworkScenario& sc, int k);

struct MseEstimate {
  double mse = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

/// Monte Carlo E||dh||^2 / E||h||^2 over the target cell's users.
MseEstimate mse_empirical(const NetworkScenario& sc, const FrameDesign& design, int trials,
                          std::uint64_t seed);

}  // namespace hp
