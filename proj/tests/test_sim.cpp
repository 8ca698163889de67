#include <doctest.h>

#include "hybridpilot/sim.hpp"

using namespace hp;

TEST_CASE("openmp and serial trial loops produce identical summaries") {
  NetworkScenario sc = make_scenario(3, 2, 16, 60, 3.8, 20.0, 4);
  FrameDesign d{0.5, 0.6, 20, 60};
  SimOptions opts;
  opts.data_aided = true;
  SimSummary par = run_trials(sc, d, opts, 80, 9);
  SimSummary ser = run_trials_serial(sc, d, opts, 80, 9);
  CHECK(par.mse_empirical == ser.mse_empirical);
  CHECK(par.mse_refined == ser.mse_refined);
  CHECK(par.inv_gamma_I_mean == ser.inv_gamma_I_mean);
  CHECK(par.inv_gamma_II_mean == ser.inv_gamma_II_mean);
  CHECK(par.p_S == ser.p_S);
  CHECK(par.p_N == ser.p_N);
  CHECK(par.corr_S_I1 == ser.corr_S_I1);
  CHECK(par.symbol_error_rate == ser.symbol_error_rate);
}

TEST_CASE("trials are independent of the batch they run in") {
  NetworkScenario sc = make_scenario(3, 2, 16, 60, 3.8, 20.0, 4);
  FrameDesign d{0.5, 0.6, 20, 60};
  SimOptions opts;
  SimSummary sum = run_trials(sc, d, opts, 20, 9);
  TrialResult alone = simulate_trial(sc, d, opts, 9, 13);
  CHECK(alone.sum_dh2 == sum.per_trial[13].sum_dh2);
  CHECK(alone.inv_gamma_I == sum.per_trial[13].inv_gamma_I);
}

TEST_CASE("different seeds give different realizations") {
  NetworkScenario sc = make_scenario(3, 2, 16, 60, 3.8, 20.0, 4);
  FrameDesign d{0.5, 0.6, 20, 60};
  SimOptions opts;
  SimSummary a = run_trials(sc, d, opts, 10, 1);
  SimSummary b = run_trials(sc, d, opts, 10, 2);
  CHECK(a.mse_empirical != b.mse_empirical);
}

TEST_CASE("training-only runs skip the data phase") {
  NetworkScenario sc = make_scenario(3, 2, 16, 60, 3.8, 20.0, 4);
  FrameDesign d{0.5, 0.6, 20, 60};
  SimOptions opts;
  opts.skip_data_phase = true;
  SimSummary sum = run_trials(sc, d, opts, 10, 1);
  CHECK(sum.inv_gamma_II_mean.isZero());
  CHECK(sum.p_Sp == 0.0);
  CHECK(sum.mse_empirical > 0.0);
}

TEST_CASE("pilot reuse degrades the estimate") {
  NetworkScenario sc = make_scenario(3, 2, 32, 60, 3.8, 20.0, 4);
  FrameDesign d{0.0, 0.6, 6, 60};
  SimOptions clean;
  clean.skip_data_phase = true;
  SimOptions reused = clean;
  reused.reuse_pilots = true;
  // reuse only needs tau >= K
  FrameDesign dr = d;
  dr.tau = 2;
  SimSummary a = run_trials(sc, d, clean, 150, 3);
  SimSummary b = run_trials(sc, dr, reused, 150, 3);
  CHECK(b.mse_empirical > a.mse_empirical);
}

TEST_CASE("resolved data power follows lambda unless overridden") {
  FrameDesign d{0.5, 0.7, 20, 40};
  SimOptions opts;
  CHECK(opts.resolved_data_power(d) == doctest::Approx(0.3));
  opts.data_phase_power = 1.0;
  CHECK(opts.resolved_data_power(d) == 1.0);
}
