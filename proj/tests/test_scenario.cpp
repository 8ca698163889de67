#include <doctest.h>

#include <cmath>

#include "hybridpilot/scenario.hpp"

#include <sstream>

using namespace hp;

namespace {

// Independent point-in-hexagon oracle: a vertex-up hexagon with circumradius
// 1 is the intersection of six half-planes with outward normals at 60k
// degrees and apothem sqrt(3)/2.
bool hex_oracle(double x, double y) {
  const double apothem = std::sqrt(3.0) / 2.0;
  for (int k = 0; k < 6; ++k) {
    double ang = k * M_PI / 3.0;
    if (x * std::cos(ang) + y * std::sin(ang) > apothem + 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cell centers form the expected hexagonal ring") {
  auto c1 = cell_centers(1);
  CHECK(c1.size() == 1);
  auto c7 = cell_centers(7);
  REQUIRE(c7.size() == 7);
  for (int i = 1; i < 7; ++i) {
    CHECK(std::hypot(c7[i].x, c7[i].y) == doctest::Approx(std::sqrt(3.0)));
  }
  // neighbors are sqrt(3) apart as well
  for (int i = 1; i < 7; ++i) {
    int j = i == 6 ? 1 : i + 1;
    CHECK(std::hypot(c7[i].x - c7[j].x, c7[i].y - c7[j].y) == doctest::Approx(std::sqrt(3.0)));
  }
  CHECK_THROWS(cell_centers(4));
}

TEST_CASE("user drops stay inside their cell and off the base station") {
  TrialRng rng(42, 0);
  auto pos = place_users(7, 30, rng);
  auto centers = cell_centers(7);
  for (int j = 0; j < 7; ++j) {
    for (const Point& u : pos[j]) {
      double dx = u.x - centers[j].x, dy = u.y - centers[j].y;
      CHECK(hex_oracle(dx, dy));
      CHECK(std::hypot(dx, dy) >= kMinUserDistance);
    }
  }
}

TEST_CASE("large-scale fading pins own-cell users and stays positive") {
  NetworkScenario sc = make_scenario(7, 10, 64, 140, 3.8, 20.0, 3);
  for (int k = 0; k < sc.K; ++k) CHECK(sc.beta(0, k) == 1.0);
  CHECK((sc.beta.array() > 0.0).all());
  // interferers are (much) weaker on average than own-cell users
  CHECK(sc.beta.bottomRows(6).mean() < 0.5);
}

TEST_CASE("scenario construction is deterministic in the seed") {
  NetworkScenario a = make_scenario(3, 2, 16, 40, 3.8, 20.0, 9);
  NetworkScenario b = make_scenario(3, 2, 16, 40, 3.8, 20.0, 9);
  NetworkScenario c = make_scenario(3, 2, 16, 40, 3.8, 20.0, 10);
  CHECK(a.beta == b.beta);
  CHECK(a.beta != c.beta);
  CHECK(a.sigma_n2 == doctest::Approx(0.01));
}

TEST_CASE("config round trip") {
  NetworkScenario a = make_scenario(7, 4, 32, 100, 3.6, 15.0, 5);
  std::stringstream ss;
  save_scenario(a, ss);
  NetworkScenario b = load_scenario(ss);
  CHECK(b.L == a.L);
  CHECK(b.K == a.K);
  CHECK(b.M == a.M);
  CHECK(b.T == a.T);
  CHECK(b.gamma == a.gamma);
  CHECK(b.beta == a.beta);
}

TEST_CASE("config rejects bad input") {
  std::stringstream missing("L = 3\nK = 2\nM = 8\n");
  CHECK_THROWS(load_scenario(missing));
  std::stringstream mismatch("L = 3\nK = 2\nM = 8\nT = 40\nlayout = hex7\n");
  CHECK_THROWS(load_scenario(mismatch));
  NetworkScenario sc = make_scenario(3, 2, 8, 40, 3.8, 20.0, 1);
  sc.T = 5;  // below K*L
  CHECK_THROWS(sc.validate());
}

TEST_CASE("channel columns carry the per-user fading power") {
  NetworkScenario sc = make_scenario(3, 2, 2000, 40, 3.8, 20.0, 1);
  TrialRng rng(4, 1);
  ChannelRealization ch = sample_channel(sc, rng);
  for (int j = 0; j < sc.L; ++j) {
    for (int k = 0; k < sc.K; ++k) {
      double p = ch.H.col(sc.user_index(j, k)).squaredNorm() / sc.M;
      CHECK(p == doctest::Approx(sc.beta(j, k)).epsilon(0.15));
    }
  }
}
