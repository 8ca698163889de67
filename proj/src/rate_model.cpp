#include "hybridpilot/rate_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hp {

namespace {

void check_user(const RateInputs& in, int k) {
  if (k < 0 || k >= in.beta.cols()) throw std::out_of_range("user index out of range");
}

double weight_I(const FrameDesign& d) { return d.alpha * d.tau / d.T; }
double weight_II(const FrameDesign& d) { return 1.0 - static_cast<double>(d.tau) / d.T; }

}  // namespace

RateInputs RateInputs::make(const NetworkScenario& sc, const FrameDesign& design,
                            std::optional<Eigen::VectorXd> p_e) {
  RateInputs in;
  in.design = design;
  in.M = sc.M;
  in.beta = sc.beta;
  in.sigma_n2 = sc.sigma_n2;
  in.p_e = std::move(p_e);

  const int L = sc.L, K = sc.K;
  in.b1 = in.beta.cwiseAbs2().sum();
  in.b2.resize(K);
  const double total = in.beta.sum();
  for (int k = 0; k < K; ++k) in.b2(k) = in.beta(0, k) * (total - in.beta(0, k));

  if (in.p_e) {
    if (in.p_e->size() != K) throw std::invalid_argument("p_e must have one entry per user");
    const double own_sq = in.beta.row(0).cwiseAbs2().sum();
    const double other_sq = in.b1 - own_sq;
    const double other_lin = total - in.beta.row(0).sum();
    in.c1.resize(K);
    in.c2.resize(K);
    for (int k = 0; k < K; ++k) {
      in.c1(k) = 4.0 * (*in.p_e)(k)*own_sq + other_sq;
      double own_cross = 0.0;
      for (int kp = 0; kp < K; ++kp)
        if (kp != k) own_cross += 4.0 * (*in.p_e)(kp)*in.beta(0, kp);
      in.c2(k) = in.beta(0, k) * (other_lin + own_cross);
    }
  }
  if (!(in.b1 > 0) || L < 1) throw std::invalid_argument("degenerate fading table");
  return in;
}

RateInputs RateInputs::make(const NetworkScenario& sc, const FrameDesign& design,
                            double p_e_scalar) {
  return make(sc, design, Eigen::VectorXd::Constant(sc.K, p_e_scalar));
}

std::pair<double, double> sinr_approx(const RateInputs& in, int k) {
  check_user(in, k);
  const FrameDesign& d = in.design;
  if (d.lambda <= 0.0 || d.lambda >= 1.0)
    throw std::invalid_argument("lambda must lie strictly inside (0,1)");
  if (d.tau <= 0 || in.M < 1) throw std::invalid_argument("tau and M must be positive");

  const double beta = in.beta(0, k);
  const double om = 1.0 - d.lambda;
  const double num = om * beta * beta;
  const double self = om * d.alpha / (d.lambda * d.tau) * in.C1(k);
  const double den_I = self + (in.C2(k) + in.sigma_n2 * beta) / in.M;
  const double den_II = om * self + (om * in.C2(k) + in.sigma_n2 * beta) / in.M;
  return {num / den_I, num / den_II};
}

double rate_approx(const RateInputs& in, int k) {
  auto [gI, gII] = sinr_approx(in, k);
  return weight_I(in.design) * std::log2(1.0 + gI) +
         weight_II(in.design) * std::log2(1.0 + gII);
}

AsymptoticRate asymptotic_rate(const RateInputs& in, int k) {
  check_user(in, k);
  const FrameDesign& d = in.design;
  if (d.lambda <= 0.0 || d.lambda >= 1.0)
    throw std::invalid_argument("lambda must lie strictly inside (0,1)");
  AsymptoticRate out;
  if (d.alpha <= 0.0) {
    out.unbounded = true;
    out.rate = std::numeric_limits<double>::infinity();
    return out;
  }
  const double beta = in.beta(0, k);
  const double floor_I = d.alpha / (d.lambda * d.tau) * in.C1(k);
  const double floor_II = (1.0 - d.lambda) * floor_I;
  out.rate = weight_I(d) * std::log2(1.0 + beta * beta / floor_I) +
             weight_II(d) * std::log2(1.0 + beta * beta / floor_II);
  return out;
}

EmpiricalRate empirical_rate(const SinrEstimate& est, const FrameDesign& design, int k) {
  if (k < 0 || k >= est.inv_gamma_I_mean.size())
    throw std::out_of_range("user index out of range");
  const double w1 = weight_I(design);
  const double w2 = weight_II(design);
  const double x1 = est.inv_gamma_I_mean(k);
  const double x2 = est.inv_gamma_II_mean(k);

  EmpiricalRate out;
  double var = 0.0;
  if (w1 > 0.0 && x1 > 0.0) {
    out.rate += w1 * std::log2(1.0 + 1.0 / x1);
    const double dRdx = w1 / (std::log(2.0) * x1 * (1.0 + x1));
    var += dRdx * dRdx * est.inv_gamma_I_se(k) * est.inv_gamma_I_se(k);
  }
  if (w2 > 0.0 && x2 > 0.0) {
    out.rate += w2 * std::log2(1.0 + 1.0 / x2);
    const double dRdx = w2 / (std::log(2.0) * x2 * (1.0 + x2));
    var += dRdx * dRdx * est.inv_gamma_II_se(k) * est.inv_gamma_II_se(k);
  }
  const double half = 1.96 * std::sqrt(var);
  out.ci_lo = out.rate - half;
  out.ci_hi = out.rate + half;
  return out;
}

RateReport rate_report(const RateInputs& in) {
  const int K = static_cast<int>(in.beta.cols());
  RateReport rep;
  rep.gamma_I.resize(K);
  rep.gamma_II.resize(K);
  rep.rate.resize(K);
  rep.rate_asymptotic.resize(K);
  rep.asymptotic_unbounded.resize(K);
  for (int k = 0; k < K; ++k) {
    auto [gI, gII] = sinr_approx(in, k);
    rep.gamma_I(k) = gI;
    rep.gamma_II(k) = gII;
    rep.rate(k) = rate_approx(in, k);
    AsymptoticRate a = asymptotic_rate(in, k);
    rep.rate_asymptotic(k) = a.rate;
    rep.asymptotic_unbounded[k] = a.unbounded;
  }
  return rep;
}

}  // namespace hp
