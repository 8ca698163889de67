#pragma once

#include <string>

#include "hybridpilot/rate_model.hpp"

namespace hp {

/// Scalar constants for one target-cell user, folding the fading table into
/// the quantities the closed-form optima are written in:
///   g = lambda tau (C2 + beta sigma^2) / (M (1-lambda) C1)
///   f = (C2 + beta sigma^2) / (M C1)
///   h = lambda (C2 + beta sigma^2) / ((1-lambda) alpha M C1)
struct DesignConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double beta = 0.0;  // target user's own large-scale coefficient
  double sigma_n2 = 0.0;
  int M = 1;
  int T = 1;
  int KL = 1;  // minimum training length

  double f() const { return (C2 + beta * sigma_n2) / (M * C1); }
  double g(double lambda, double tau) const { return lambda * tau * f() / (1.0 - lambda); }
  double h(double alpha, double lambda) const { return lambda * f() / ((1.0 - lambda) * alpha); }

  static DesignConstants from(const RateInputs& inputs, int k);
};

/// Two-phase closed-form rate as a smooth function of the design triple
/// (tau treated as continuous), plus its exact partial derivatives.
double closed_rate(const DesignConstants& c, double alpha, double lambda, double tau);
double d_rate_d_alpha(const DesignConstants& c, double alpha, double lambda, double tau);
double d_rate_d_tau(const DesignConstants& c, double alpha, double lambda, double tau);

enum class AlphaCase { Convex, Concave, Mixed };

struct AlphaClassification {
  AlphaCase shape = AlphaCase::Convex;
  double alpha_inflection = 0.0;  // meaningful for Mixed only
};

/// Shape of the rate in alpha at fixed (lambda, tau):
///   tau/T < 1/(2+2g)  -> convex on [0,1]
///   tau/T > 1/(1+2g)  -> concave on [0,1]
///   otherwise         -> convex then concave, inflection at T/tau - 1 - 2g.
AlphaClassification classify_alpha(const DesignConstants& c, double lambda, double tau);

struct OptimizerResult {
  double arg = 0.0;          // final argmax (tau: rounded to integer)
  double arg_continuous = 0.0;
  double value = 0.0;        // objective at arg
  std::string case_label;
  int iterations = 0;
  double derivative_residual = 0.0;  // |dR| at an interior optimum, 0 at endpoints
  bool endpoint = false;
};

/// Maximize the rate over alpha in [0,1] at fixed (lambda, tau): endpoint
/// comparison when convex, derivative bisection when concave, and the
/// concave-branch optimum versus the alpha=0 endpoint in the mixed case.
/// Ties prefer the smaller alpha.
OptimizerResult optimize_alpha(const DesignConstants& c, double lambda, double tau,
                               double eps = 1e-6);

struct LambdaOpt {
  double lambda = 0.0;
  bool degenerate = false;  // quadratic collapsed to linear (alpha = tau f)
};

/// Closed-form pilot power ratio: root of
///   (alpha tau - tau^2 f) l^2 - (T - tau + 2 alpha tau) l + (T - tau + alpha tau) = 0
/// clamped into (0,1). When the leading coefficient vanishes the linear
/// equation is solved instead and the result flagged.
LambdaOpt lambda_opt(const DesignConstants& c, double alpha, double tau);

enum class TauCase { AtMinimum, InteriorOrFull };

struct TauClassification {
  TauCase shape = TauCase::AtMinimum;
  bool between_thresholds = false;  // fell between the two printed conditions
  bool full_frame = false;          // alpha = 1 in the InteriorOrFull case
};

/// Case split for the optimal training length: above the lambda threshold
/// the rate decreases in tau everywhere and tau* = KL; below it the optimum
/// is interior (or T when alpha = 1). The sufficient conditions for the two
/// cases use slightly different thresholds; designs between them are flagged.
TauClassification classify_tau(const DesignConstants& c, double alpha, double lambda);

/// Maximize the rate over tau in [KL, T] at fixed (alpha, lambda): the rate is
/// strictly concave in tau, so endpoint derivative tests followed by bisection
/// find the continuous optimum; it is then rounded to the better of
/// floor/ceil. Ties prefer the smaller tau.
OptimizerResult optimize_tau(const DesignConstants& c, double alpha, double lambda,
                             double eps = 1e-6);

struct P1Options {
  double eps = 1e-4;       // stop when the min-rate improves by less
  int max_rounds = 20;
  bool couple_p_e = false;  // iterate design <-> measured symbol-error rate
  int trials = 400;         // Monte Carlo budget for the coupling
  std::uint64_t seed = 1;
};

struct P1Result {
  FrameDesign design;
  double min_rate = 0.0;
  int rounds = 0;
  double p_e = 0.0;  // measured SER when coupling is on
};

/// Max-min design search: cyclic coordinate ascent (alpha, lambda, tau) on the
/// current worst user's constants, restarted from the given init and from the
/// two pure baselines (alpha=0 and alpha=1 with tau=T). Returns the best
/// design visited; the objective never decreases across accepted steps.
P1Result solve_p1(const NetworkScenario& sc, const FrameDesign& init,
                  const P1Options& opts = {});

/// Worst-user closed-form rate of a design (the (P1) objective).
double min_rate(const NetworkScenario& sc, const FrameDesign& design,
                const std::optional<Eigen::VectorXd>& p_e = std::nullopt);

}  // namespace hp
