#include "hybridpilot/receiver.hpp"

#include <cmath>
#include <stdexcept>

namespace hp {

DetectionOutput mf_detect(const Eigen::Ref<const Eigen::MatrixXcd>& Y,
                          const ChannelEstimate& est, int user_k, const PilotBook& book,
                          const FrameDesign& design, Phase phase, const GenieData* genie) {
  const Eigen::VectorXcd& h_hat = est.h_hat;
  const double nrm2 = h_hat.squaredNorm();
  if (nrm2 <= 0.0) throw std::invalid_argument("zero channel estimate");

  const int n_tm = design.n_tm();
  const int begin = (phase == Phase::I) ? n_tm : design.tau;
  const int end = (phase == Phase::I) ? design.tau : design.T;
  const int nsym = end - begin;
  if (nsym <= 0) throw std::invalid_argument("phase contains no symbols");
  if (Y.cols() < end) throw std::invalid_argument("received matrix too short for phase");

  DetectionOutput out;
  Eigen::MatrixXcd Yp = Y.middleCols(begin, nsym);
  if (phase == Phase::I) {
    // strip the user's own pilot before combining
    Yp.noalias() -= h_hat * book.P.row(user_k).segment(begin, nsym);
  }
  Eigen::RowVectorXcd raw = h_hat.adjoint() * Yp;
  out.soft = (raw / nrm2).transpose();

  if (genie != nullptr) {
    const Eigen::MatrixXcd& H = *genie->H;
    const Eigen::MatrixXcd& X = *genie->X;
    const Eigen::MatrixXcd& S = *genie->S;
    const int U = static_cast<int>(H.cols());
    const int K = genie->K;
    // In phase II every user transmits pure data, so the per-user symbol
    // sequence is the data row in both phases.
    const Eigen::MatrixXcd& seq = (phase == Phase::I) ? X : S;

    out.has_ledger = true;
    out.S.resize(nsym);
    out.I1.resize(nsym);
    out.I2.resize(nsym);
    out.I3.resize(nsym);
    out.N.resize(nsym);

    Eigen::RowVectorXcd cross = h_hat.adjoint() * H;       // 1 x U
    const std::complex<double> own_gap = cross(user_k) - nrm2;  // h_hat^H (h - h_hat)
    Eigen::RowVectorXcd noise_row = h_hat.adjoint() * genie->noise->middleCols(begin, nsym);

    for (int t = 0; t < nsym; ++t) {
      const int col = begin + t;
      out.S(t) = nrm2 * S(user_k, col);
      out.I1(t) = own_gap * seq(user_k, col);
      std::complex<double> i2{0.0, 0.0}, i3{0.0, 0.0};
      for (int u = 0; u < U; ++u) {
        if (u == user_k) continue;
        const std::complex<double> term = cross(u) * seq(u, col);
        if (u < K)
          i2 += term;
        else
          i3 += term;
      }
      out.I2(t) = i2;
      out.I3(t) = i3;
      out.N(t) = noise_row(t);
    }
    out.p_S = out.S.squaredNorm() / nsym;
    out.p_I1 = out.I1.squaredNorm() / nsym;
    out.p_I2 = out.I2.squaredNorm() / nsym;
    out.p_I3 = out.I3.squaredNorm() / nsym;
    out.p_N = out.N.squaredNorm() / nsym;
    out.corr_S_I1 = (out.S.conjugate().cwiseProduct(out.I1)).sum() / static_cast<double>(nsym);
  }
  return out;
}

HardDecision hard_decide(const Eigen::Ref<const Eigen::VectorXcd>& soft, double power) {
  HardDecision dec;
  const int n = static_cast<int>(soft.size());
  dec.index.resize(n);
  dec.symbols.resize(n);
  for (int t = 0; t < n; ++t) {
    double ang = std::arg(soft(t)) - M_PI / 4.0;
    long q = std::lround(ang / (M_PI / 2.0));
    unsigned idx = static_cast<unsigned>(((q % 4) + 4) % 4);
    dec.index[t] = idx;
    dec.symbols(t) = qpsk_point(idx, power);
  }
  return dec;
}

int count_symbol_errors(const Eigen::Ref<const Eigen::VectorXcd>& decided,
                        const Eigen::Ref<const Eigen::VectorXcd>& truth) {
  if (decided.size() != truth.size()) throw std::invalid_argument("length mismatch");
  int errors = 0;
  for (int t = 0; t < decided.size(); ++t)
    if (std::abs(decided(t) - truth(t)) > 1e-9) ++errors;
  return errors;
}

Eigen::MatrixXcd data_aided_iterate(const Eigen::Ref<const Eigen::MatrixXcd>& Y_overhead,
                                    const Eigen::Ref<const Eigen::MatrixXcd>& prior,
                                    const Eigen::Ref<const Eigen::MatrixXcd>& s_hat,
                                    const PilotBook& book, const FrameDesign& design) {
  const int K = static_cast<int>(prior.cols());
  if (s_hat.rows() != K) throw std::invalid_argument("s_hat must have one row per user");
  if (s_hat.cols() != design.tau || Y_overhead.cols() != design.tau)
    throw std::invalid_argument("overhead width != tau");
  Eigen::MatrixXcd cleaned = Y_overhead - prior * s_hat;
  Eigen::MatrixXcd refined(prior.rows(), K);
  for (int k = 0; k < K; ++k)
    refined.col(k) = ls_estimate(cleaned, book.P.row(k).head(design.tau)).h_hat;
  return refined;
}

}  // namespace hp
