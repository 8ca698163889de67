#include <doctest.h>

#include <cmath>

#include "hybridpilot/rate_model.hpp"

using namespace hp;

namespace {

NetworkScenario single_user(int M, double sigma_n2) {
  NetworkScenario sc;
  sc.L = 1;
  sc.K = 1;
  sc.M = M;
  sc.T = 20;
  sc.sigma_n2 = sigma_n2;
  sc.beta = Eigen::MatrixXd::Ones(1, 1);
  return sc;
}

}  // namespace

TEST_CASE("single-user SINR closed form at the textbook point") {
  // alpha=1, lambda=0.5, tau=10: with no interferers and no noise the phase-I
  // SINR is 0.5 / (0.5/0.5 * 1/10) = 5
  FrameDesign d{1.0, 0.5, 10, 20};
  {
    RateInputs in = RateInputs::make(single_user(1000000000, 1e-30), d);
    auto [gI, gII] = sinr_approx(in, 0);
    CHECK(gI == doctest::Approx(5.0).epsilon(1e-6));
  }
  {
    RateInputs in = RateInputs::make(single_user(100, 0.01), d);
    auto [gI, gII] = sinr_approx(in, 0);
    CHECK(gI == doctest::Approx(0.5 / (0.1 + 0.0001)).epsilon(1e-12));
  }
}

TEST_CASE("alpha = 0 removes the self-interference term") {
  FrameDesign d{0.0, 0.4, 10, 20};
  RateInputs in = RateInputs::make(make_scenario(3, 2, 64, 20, 3.8, 20.0, 1), d);
  auto [gI, gII] = sinr_approx(in, 0);
  const double om = 0.6;
  const double expect = om * 1.0 / ((om * in.b2(0) + in.sigma_n2) / in.M);
  CHECK(gII == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rate weights collapse at the pure designs") {
  NetworkScenario sc = make_scenario(3, 2, 64, 20, 3.8, 20.0, 1);
  {
    FrameDesign d{1.0, 0.5, 20, 20};  // full-frame superimposed
    RateInputs in = RateInputs::make(sc, d);
    auto [gI, gII] = sinr_approx(in, 0);
    CHECK(rate_approx(in, 0) == doctest::Approx(std::log2(1.0 + gI)).epsilon(1e-12));
  }
  {
    FrameDesign d{0.0, 0.5, 10, 20};  // pilot-only training
    RateInputs in = RateInputs::make(sc, d);
    auto [gI, gII] = sinr_approx(in, 0);
    CHECK(rate_approx(in, 0) == doctest::Approx(0.5 * std::log2(1.0 + gII)).epsilon(1e-12));
  }
}

TEST_CASE("perfect data cancellation upper-bounds the plain rate") {
  NetworkScenario sc = make_scenario(7, 5, 128, 100, 3.8, 20.0, 2);
  FrameDesign d{0.5, 0.6, 40, 100};
  RateInputs plain = RateInputs::make(sc, d);
  RateInputs aided = RateInputs::make(sc, d, 0.0);
  for (int k = 0; k < sc.K; ++k) {
    CHECK(aided.c1(k) <= plain.b1);
    CHECK(aided.c2(k) <= plain.b2(k));
    CHECK(rate_approx(aided, k) >= rate_approx(plain, k));
  }
}

TEST_CASE("invalid power splits are rejected") {
  NetworkScenario sc = make_scenario(1, 1, 8, 20, 3.8, 20.0, 1);
  RateInputs in = RateInputs::make(sc, FrameDesign{0.5, 0.0, 10, 20});
  CHECK_THROWS(sinr_approx(in, 0));
  in.design.lambda = 1.0;
  CHECK_THROWS(sinr_approx(in, 0));
  in.design.lambda = 0.5;
  CHECK_THROWS(sinr_approx(in, 3));
}

TEST_CASE("large-M limit") {
  NetworkScenario sc = make_scenario(3, 2, 64, 40, 3.8, 20.0, 1);
  FrameDesign d{0.6, 0.5, 20, 40};

  // alpha = 0 has no interference floor: flagged unbounded
  RateInputs in0 = RateInputs::make(sc, FrameDesign{0.0, 0.5, 20, 40});
  CHECK(asymptotic_rate(in0, 0).unbounded);

  // convergence: the finite-M rate approaches the limit like 1/M
  auto gap = [&](int M) {
    NetworkScenario s = make_scenario(3, 2, M, 40, 3.8, 20.0, 1);
    RateInputs in = RateInputs::make(s, d);
    return std::abs(rate_approx(in, 0) - asymptotic_rate(in, 0).rate);
  };
  CHECK(gap(1000000) < 0.01 * asymptotic_rate(RateInputs::make(sc, d), 0).rate);
  const double g1 = gap(1000), g2 = gap(2000), g4 = gap(4000);
  CHECK(g2 / g1 == doctest::Approx(0.5).epsilon(0.1));
  CHECK(g4 / g2 == doctest::Approx(0.5).epsilon(0.1));

  // the limit rate is strictly increasing in lambda at fixed (alpha, tau)
  double prev = 0.0;
  for (double l : {0.2, 0.4, 0.6, 0.8, 0.95}) {
    RateInputs in = RateInputs::make(sc, FrameDesign{0.6, l, 20, 40});
    double r = asymptotic_rate(in, 0).rate;
    CHECK(r > prev);
    prev = r;
  }

  // single-term closed form at alpha=1, tau=T
  RateInputs in = RateInputs::make(sc, FrameDesign{1.0, 0.5, 40, 40});
  double expect = std::log2(1.0 + 1.0 * 0.5 * 40.0 / in.b1);
  CHECK(asymptotic_rate(in, 0).rate == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("empirical Jensen rate and its confidence interval") {
  FrameDesign d{1.0, 0.5, 10, 20};
  SinrEstimate est;
  est.inv_gamma_I_mean = Eigen::VectorXd::Constant(1, 1.0);
  est.inv_gamma_II_mean = Eigen::VectorXd::Constant(1, 1.0);
  est.inv_gamma_I_se = Eigen::VectorXd::Constant(1, 0.01);
  est.inv_gamma_II_se = Eigen::VectorXd::Constant(1, 0.01);
  EmpiricalRate er = empirical_rate(est, d, 0);
  CHECK(er.rate == doctest::Approx(1.0).epsilon(1e-12));  // 0.5 + 0.5 bits
  CHECK(er.ci_lo < er.rate);
  CHECK(er.ci_hi > er.rate);
  CHECK_THROWS(empirical_rate(est, d, 2));
}

TEST_CASE("report carries every user consistently") {
  NetworkScenario sc = make_scenario(3, 4, 64, 40, 3.8, 20.0, 3);
  RateInputs in = RateInputs::make(sc, FrameDesign{0.5, 0.6, 20, 40});
  RateReport rep = rate_report(in);
  REQUIRE(rep.rate.size() == sc.K);
  for (int k = 0; k < sc.K; ++k) {
    CHECK(rep.rate(k) == doctest::Approx(rate_approx(in, k)));
    CHECK(rep.gamma_II(k) >= rep.gamma_I(k));  // lighter interference in phase II
    CHECK(rep.rate(k) >= 0.0);
  }
}
