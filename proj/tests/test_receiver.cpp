#include <doctest.h>

#include "hybridpilot/receiver.hpp"
#include "hybridpilot/sim.hpp"

using namespace hp;

namespace {

struct Link {
  NetworkScenario sc;
  FrameDesign d;
  PilotBook book;
  ChannelRealization ch;
  Eigen::MatrixXcd X, S, noise, Y;
  Eigen::MatrixXcd h_hat;

  Link(double alpha, int seed)
      : sc(make_scenario(3, 2, 16, 40, 3.8, 20.0, 2)), d{alpha, 0.6, 20, 40} {
    const int U = sc.num_users();
    book = build_pilot_book(U, d.tau, d.lambda);
    TrialRng rng(seed, 1);
    ch = sample_channel(sc, rng);
    X.resize(U, d.T);
    S.resize(U, d.T);
    for (int u = 0; u < U; ++u) {
      TransmitFrame f = assemble_frame(book.P.row(u), d, rng);
      X.row(u) = f.x.transpose();
      S.row(u) = f.s.transpose();
    }
    noise.resize(sc.M, d.T);
    const double nstd = std::sqrt(sc.sigma_n2);
    for (int t = 0; t < d.T; ++t)
      for (int m = 0; m < sc.M; ++m) noise(m, t) = nstd * rng.cgaussian();
    Y = ch.H * X + noise;
    h_hat.resize(sc.M, sc.K);
    for (int k = 0; k < sc.K; ++k)
      h_hat.col(k) = ls_estimate(Y.leftCols(d.tau), book.P.row(k)).h_hat;
  }
};

}  // namespace

TEST_CASE("genie ledger reconstructs the matched-filter output exactly") {
  Link link(0.5, 3);
  GenieData genie{&link.ch.H, &link.X, &link.S, &link.noise, link.sc.K};
  for (int k = 0; k < link.sc.K; ++k) {
    ChannelEstimate est;
    est.h_hat = link.h_hat.col(k);
    const double nrm2 = est.h_hat.squaredNorm();
    for (Phase phase : {Phase::I, Phase::II}) {
      DetectionOutput out = mf_detect(link.Y, est, k, link.book, link.d, phase, &genie);
      REQUIRE(out.has_ledger);
      Eigen::VectorXcd sum = out.S + out.I1 + out.I2 + out.I3 + out.N;
      Eigen::VectorXcd raw = out.soft * nrm2;
      CHECK((sum - raw).cwiseAbs().maxCoeff() < 1e-8 * raw.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("phase boundaries and pilot stripping") {
  Link link(0.5, 4);
  ChannelEstimate est;
  est.h_hat = link.h_hat.col(0);
  DetectionOutput p1 = mf_detect(link.Y, est, 0, link.book, link.d, Phase::I);
  DetectionOutput p2 = mf_detect(link.Y, est, 0, link.book, link.d, Phase::II);
  CHECK(p1.soft.size() == link.d.n_ts());
  CHECK(p2.soft.size() == link.d.T - link.d.tau);
  CHECK_FALSE(p1.has_ledger);

  // a frame with no superimposed symbols has no phase-I output
  FrameDesign tm = link.d;
  tm.alpha = 0.0;
  CHECK_THROWS(mf_detect(link.Y, est, 0, link.book, tm, Phase::I));
}

TEST_CASE("hard decisions recover clean QPSK and count errors") {
  const double power = 0.4;
  Eigen::VectorXcd truth(4);
  for (unsigned i = 0; i < 4; ++i) truth(i) = qpsk_point(i, power);
  // small rotation keeps every symbol inside its quadrant
  Eigen::VectorXcd noisy = truth * std::polar(1.0, 0.2);
  HardDecision dec = hard_decide(noisy, power);
  CHECK(count_symbol_errors(dec.symbols, truth) == 0);
  for (unsigned i = 0; i < 4; ++i) CHECK(dec.index[i] == i);

  Eigen::VectorXcd flipped = truth;
  flipped(0) = -truth(0);
  CHECK(count_symbol_errors(flipped, truth) == 1);
  Eigen::VectorXcd shorter(3);
  CHECK_THROWS(count_symbol_errors(shorter, truth));
}

TEST_CASE("data-aided refinement with perfect decisions cleans the overhead") {
  Link link(0.5, 5);
  const int K = link.sc.K;
  // feed the true transmitted data as the decisions
  Eigen::MatrixXcd s_hat = link.S.topRows(K).leftCols(link.d.tau);
  Eigen::MatrixXcd refined =
      data_aided_iterate(link.Y.leftCols(link.d.tau), link.h_hat, s_hat, link.book, link.d);
  double before = (link.h_hat - link.ch.H.leftCols(K)).squaredNorm();
  double after = (refined - link.ch.H.leftCols(K)).squaredNorm();
  CHECK(after < before);
}

TEST_CASE("monte carlo SINR wrapper returns sane per-user estimates") {
  NetworkScenario sc = make_scenario(3, 2, 32, 40, 3.8, 20.0, 2);
  FrameDesign d{0.5, 0.6, 20, 40};
  SinrEstimate est = empirical_sinr(sc, d, 200, 7);
  REQUIRE(est.inv_gamma_I_mean.size() == sc.K);
  CHECK((est.inv_gamma_I_mean.array() > 0.0).all());
  CHECK((est.inv_gamma_II_mean.array() > 0.0).all());
  // phase II sees less pilot-induced interference
  CHECK(est.inv_gamma_II_mean.mean() < est.inv_gamma_I_mean.mean());
  CHECK(est.trials == 200);
}

TEST_CASE("zeta wrapper flags the degenerate pilot-only case") {
  NetworkScenario sc = make_scenario(1, 1, 16, 40, 3.8, 20.0, 2);
  ZetaEstimate z = correlation_zeta(sc, FrameDesign{0.0, 0.5, 20, 40}, 10, 1);
  CHECK(z.degenerate);
  ZetaEstimate ok = correlation_zeta(sc, FrameDesign{1.0, 0.5, 20, 40}, 50, 1);
  CHECK_FALSE(ok.degenerate);
  CHECK(ok.zeta >= 0.0);
}
