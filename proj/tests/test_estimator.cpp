#include <doctest.h>

#include "hybridpilot/estimator.hpp"
#include "hybridpilot/sim.hpp"

using namespace hp;

TEST_CASE("noiseless pilot-only LS recovers the channel exactly") {
  const int M = 8, tau = 4;
  PilotBook book = build_pilot_book(2, tau, 0.7);
  TrialRng rng(11, 0);
  Eigen::VectorXcd h(M);
  for (int m = 0; m < M; ++m) h(m) = rng.cgaussian();
  Eigen::MatrixXcd Y = h * book.P.row(0);
  ChannelEstimate est = ls_estimate(Y, book.P.row(0));
  CHECK((est.h_hat - h).cwiseAbs().maxCoeff() < 1e-12);

  // an orthogonal user's pilot contributes nothing
  Eigen::VectorXcd h2(M);
  for (int m = 0; m < M; ++m) h2(m) = rng.cgaussian();
  Y += h2 * book.P.row(1);
  est = ls_estimate(Y, book.P.row(0));
  CHECK((est.h_hat - h).cwiseAbs().maxCoeff() < 1e-9);

  ChannelEstimate genie = ls_estimate_genie(Y, book.P.row(0), h);
  CHECK(genie.delta_h.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("LS input validation") {
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(2, 4);
  Eigen::RowVectorXcd zero = Eigen::RowVectorXcd::Zero(4);
  CHECK_THROWS(ls_estimate(Y, zero));
  Eigen::RowVectorXcd wrong = Eigen::RowVectorXcd::Ones(3);
  CHECK_THROWS(ls_estimate(Y, wrong));
}

TEST_CASE("pilot reuse biases the estimate by the interfering channels") {
  // noiseless, one user per cell, identical pilots: LS returns the sum of
  // all three channels
  const int M = 6, tau = 4;
  PilotBook book = build_reused_pilot_book(3, 1, tau, 0.5);
  TrialRng rng(5, 0);
  Eigen::MatrixXcd H(M, 3);
  for (int u = 0; u < 3; ++u)
    for (int m = 0; m < M; ++m) H(m, u) = rng.cgaussian();
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(M, tau);
  for (int u = 0; u < 3; ++u) Y += H.col(u) * book.P.row(u);
  ChannelEstimate est = contaminated_ls_estimate(Y, book.P.row(0));
  Eigen::VectorXcd expect = H.rowwise().sum();
  CHECK((est.h_hat - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("closed-form MSE matches a hand evaluation") {
  NetworkScenario sc;
  sc.L = 1;
  sc.K = 1;
  sc.M = 4;
  sc.T = 20;
  sc.sigma_n2 = 0.01;
  sc.beta = Eigen::MatrixXd::Ones(1, 1);

  // pilot-only training: only the noise term survives
  FrameDesign tm{0.0, 0.5, 10, 20};
  CHECK(mse_theoretical(tm, sc, 0) == doctest::Approx(0.01 / (0.5 * 10.0)));

  // fully superimposed: data leakage plus noise
  FrameDesign ts{1.0, 0.5, 10, 20};
  CHECK(mse_theoretical(ts, sc, 0) == doctest::Approx((1.0 + 0.01 / 0.5) / 10.0));
}

TEST_CASE("empirical MSE tracks the closed form") {
  NetworkScenario sc = make_scenario(3, 2, 32, 40, 3.8, 20.0, 7);
  FrameDesign d{0.5, 0.5, 20, 40};
  MseEstimate emp = mse_empirical(sc, d, 1500, 3);
  double th = 0.0, denom = 0.0;
  for (int k = 0; k < sc.K; ++k) {
    th += mse_theoretical(d, sc, k) * sc.beta(0, k);
    denom += sc.beta(0, k);
  }
  th /= denom;
  CHECK(emp.mse == doctest::Approx(th).epsilon(0.10));
  CHECK(emp.std_error > 0.0);
  CHECK(emp.trials == 1500);
  CHECK_THROWS(mse_empirical(sc, d, 0, 1));
}
