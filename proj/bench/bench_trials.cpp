// Compares the OpenMP trial loop against the serial reference and verifies
// the two reductions agree exactly.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "hybridpilot/sim.hpp"

using namespace hp;
using clk = std::chrono::steady_clock;

int main(int argc, char** argv) {
  const int trials = argc > 1 ? std::atoi(argv[1]) : 400;
  NetworkScenario sc = make_scenario(3, 2, 64, 100, 3.8, 20.0, 7);
  FrameDesign d{0.5, 0.6, 30, 100};
  SimOptions opts;

  auto t0 = clk::now();
  SimSummary serial = run_trials_serial(sc, d, opts, trials, 1);
  auto t1 = clk::now();
  SimSummary parallel = run_trials(sc, d, opts, trials, 1);
  auto t2 = clk::now();

  const double ts = std::chrono::duration<double>(t1 - t0).count();
  const double tp = std::chrono::duration<double>(t2 - t1).count();
  std::printf("trials          : %d\n", trials);
  std::printf("serial          : %8.3f s  (%.1f trials/s)\n", ts, trials / ts);
  std::printf("openmp          : %8.3f s  (%.1f trials/s)\n", tp, trials / tp);
  std::printf("speedup         : %8.2fx\n", ts / tp);

  const bool identical = serial.mse_empirical == parallel.mse_empirical &&
                         serial.inv_gamma_I_mean == parallel.inv_gamma_I_mean &&
                         serial.inv_gamma_II_mean == parallel.inv_gamma_II_mean &&
                         serial.p_S == parallel.p_S && serial.p_N == parallel.p_N;
  std::printf("results identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
