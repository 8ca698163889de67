#include "hybridpilot/pilot_frame.hpp"

#include <cmath>
#include <stdexcept>

namespace hp {

void FrameDesign::validate(int KL) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must be in (0,1)");
  if (tau < KL) throw std::invalid_argument("tau must be >= K*L");
  if (tau > T) throw std::invalid_argument("tau must be <= T");
}

PilotBook build_pilot_book(int KL, int tau, double lambda) {
  if (tau < KL) throw std::invalid_argument("insufficient training length for orthogonality");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in (0,1]");
  PilotBook book;
  book.lambda = lambda;
  book.P.resize(KL, tau);
  const double amp = std::sqrt(lambda);
  for (int r = 0; r < KL; ++r) {
    for (int t = 0; t < tau; ++t) {
      double phase = 2.0 * M_PI * static_cast<double>(r) * static_cast<double>(t) / tau;
      book.P(r, t) = amp * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return book;
}

PilotBook build_reused_pilot_book(int L, int K, int tau, double lambda) {
  if (tau < K) throw std::invalid_argument("insufficient training length for orthogonality");
  PilotBook base = build_pilot_book(K, tau, lambda);
  PilotBook book;
  book.lambda = lambda;
  book.P.resize(L * K, tau);
  for (int j = 0; j < L; ++j) book.P.middleRows(j * K, K) = base.P;
  return book;
}

std::complex<double> qpsk_point(unsigned index, double power) {
  const double amp = std::sqrt(power);
  const double phase = M_PI / 4.0 + (index & 3u) * (M_PI / 2.0);
  return {amp * std::cos(phase), amp * std::sin(phase)};
}

TransmitFrame assemble_frame(const Eigen::Ref<const Eigen::RowVectorXcd>& pilot_row,
                             const FrameDesign& design, TrialRng& rng,
                             double data_phase_power) {
  const int T = design.T;
  const int tau = design.tau;
  if (pilot_row.size() != tau) throw std::invalid_argument("pilot row length != tau");
  TransmitFrame f;
  f.x = Eigen::VectorXcd::Zero(T);
  f.s = Eigen::VectorXcd::Zero(T);
  f.p = Eigen::VectorXcd::Zero(T);
  const int n_tm = design.n_tm();
  const double ts_power = 1.0 - design.lambda;
  for (int t = 0; t < tau; ++t) f.p(t) = pilot_row(t);
  for (int t = n_tm; t < tau; ++t)
    f.s(t) = qpsk_point(static_cast<unsigned>(rng.uniform_int(4)), ts_power);
  for (int t = tau; t < T; ++t)
    f.s(t) = qpsk_point(static_cast<unsigned>(rng.uniform_int(4)), data_phase_power);
  f.x = f.s + f.p;
  return f;
}

Eigen::MatrixXcd received_matrix(const ChannelRealization& channel,
                                 const std::vector<TransmitFrame>& frames, double sigma_n2,
                                 TrialRng& rng) {
  const int M = static_cast<int>(channel.H.rows());
  const int U = static_cast<int>(channel.H.cols());
  if (static_cast<int>(frames.size()) != U)
    throw std::invalid_argument("one frame per user required");
  const int T = static_cast<int>(frames.front().x.size());
  Eigen::MatrixXcd X(U, T);
  for (int u = 0; u < U; ++u) {
    if (frames[u].x.size() != T) throw std::invalid_argument("frame length mismatch");
    X.row(u) = frames[u].x.transpose();
  }
  Eigen::MatrixXcd Y = channel.H * X;
  const double nstd = std::sqrt(sigma_n2);
  for (int t = 0; t < T; ++t)
    for (int m = 0; m < M; ++m) Y(m, t) += nstd * rng.cgaussian();
  return Y;
}

}  // namespace hp
