#include "hybridpilot/estimator.hpp"

#include <stdexcept>

namespace hp {

ChannelEstimate ls_estimate(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                            const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row) {
  const double energy = pilot_row.squaredNorm();
  if (energy <= 0.0) throw std::invalid_argument("zero pilot energy");
  if (Y_overhead.cols() != pilot_row.size())
    throw std::invalid_argument("overhead width != pilot length");
  ChannelEstimate est;
  est.h_hat = (Y_overhead * pilot_row.adjoint()) / energy;
  return est;
}

ChannelEstimate ls_estimate_genie(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                                  const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row,
                                  const Eigen::Ref<const Eigen::VectorXcd>& h_true) {
  ChannelEstimate est = ls_estimate(Y_overhead, pilot_row);
  est.delta_h = h_true - est.h_hat;
  return est;
}

ChannelEstimate contaminated_ls_estimate(
    const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
    const Eigen::Ref<const Eigen::RowVectorXcd>& reused_pilot_row) {
  // Same closed form; the bias comes from the reused pilots in Y.
  return ls_estimate(Y_overhead, reused_pilot_row);
}

double mse_theoretical(const FrameDesign& design, const NetworkScenario& sc, int k) {
  if (design.lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
  const double beta_k = sc.beta(0, k);
  const double beta_sum = sc.beta.sum();
  const double tau = static_cast<double>(design.tau);
  return (design.alpha * (1.0 - design.lambda) / design.lambda * beta_sum / beta_k +
          sc.sigma_n2 / (design.lambda * beta_k)) /
         tau;
}

}  // namespace hp
