// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/metrics.hpp"

#include <cmath>

#include "pstorm/estimator.hpp"

namespace pstorm {

MultiplierRule MultiplierRule::given(const Vec& lambda) {
  MultiplierRule r;
  r.lambda = lambda;
  return r;
}

MultiplierRule MultiplierRule::qp(double rho_k) {
  MultiplierRule r;
  r.qp_implied = true;
  r.rho_k = rho_k;
  return r;
}

MultiplierRule MultiplierRule::dual_plus_qp(const Vec& lambda, double rho_k) {
  MultiplierRule r;
  r.lambda = lambda;
  r.qp_implied = true;
  r.rho_k = rho_k;
  return r;
}

StationarityReading stationarity(const ProblemSpec& p, const Vec& x,
                                 const MultiplierRule& rule) {
  StationarityReading out;
  Vec v = exact_grad_f(p, x);
  if (p.constraints.m > 0) {
    ConstraintEval ce = constraints_eval(p, x, EvalMode::Exact);
    out.feas = ce.value.norm();
    Vec lambda = rule.lambda.size() > 0 ? rule.lambda : Vec(Vec::Zero(p.constraints.m));
    if (rule.qp_implied) lambda += rule.rho_k * ce.value;
    v += ce.jacobian.transpose() * lambda;
    out.lambda_used = lambda;
  }
  out.cone_dist = normal_cone_distance(p.set, x, v);
  return out;
}

double tracking_error(const ProblemSpec& p, const Vec& x, const Vec& g,
                      double rho, const Vec& lambda) {
  if (p.constraints.m == 0 || (rho == 0.0 && lambda.size() == 0))
    return (g - exact_grad_f(p, x)).norm();
  return (g - penalty_grad_exact(p, x, lambda, rho)).norm();
}

double penalty_value_exact(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                           double rho) {
  double v = exact_value_f(p, x);
  if (p.constraints.m > 0) {
    ConstraintEval ce = constraints_eval(p, x, EvalMode::Exact);
    if (lambda.size() > 0) v += lambda.dot(ce.value);
    v += 0.5 * rho * ce.value.squaredNorm();
  }
  return v;
}

PotentialReading potential_case1(const ProblemSpec& p, const Case1Pair& pair,
                                 const Case1Schedule& s, long k) {
  check(k >= 0, "potential_case1: k must be >= 0");  // k = 0 gives Y_1
  check(p.constraints.kind == ConstraintKind::Linear,
        "potential_case1: needs linear constraints");
  const Mat& A = p.constraints.A;
  const Vec& b = p.constraints.b;
  const double eta_k = s.eta(k), eta_k1 = s.eta(k + 1), eta_k2 = s.eta(k + 2);
  const double c_eff = s.alpha_scale * s.c;

  Vec r = A * pair.x_k1 - b;
  double L_rho = exact_value_f(p, pair.x_k1) + pair.lambda_k1.dot(r) +
                 0.5 * s.rho * r.squaredNorm();

  Vec dx = pair.x_k1 - pair.x_k;
  double q_norm2 = dx.squaredNorm() / eta_k1 - s.rho * (A * dx).squaredNorm();

  double beta1_k1 =
      (1.0 + s.c2 + s.c3) * s.L_f * s.m_const / eta_k2 +
      (6.0 + s.c4) * (1.0 + s.c1) * s.L_f * s.L_f / (s.rho * s.delta) +
      42.0 * (1.0 + s.c1) * s.L_f * s.L_f / (s.rho * s.delta) +
      28.0 * s.m_const * s.L_f / eta_k1;

  double e1 = (pair.g_k1 - exact_grad_f(p, pair.x_k1)).squaredNorm();
  double e0 = (pair.g_k - exact_grad_f(p, pair.x_k)).squaredNorm();

  PotentialReading out;
  out.Y = L_rho + s.rho * s.m_const / (2.0 * eta_k2) * r.squaredNorm() +
          s.m_const / (2.0 * eta_k1) * q_norm2 + beta1_k1 * dx.squaredNorm() +
          2.0 / (c_eff * eta_k1) * e1 +
          (6.0 * (1.0 + s.c1) / (s.rho * s.delta) +
           4.0 * s.m_const / (s.L_f * eta_k)) * e0;
  out.allowance = s.allowance_v(k) * p.constants.V * p.constants.V;
  return out;
}

namespace {

// Shared body of the penalty-family potential; the two schedules differ only
// in the (eta, rho, alpha) power laws.
template <typename Sched>
PotentialReading potential_qp(const ProblemSpec& p, const Vec& x, const Vec& g,
                              const Vec& lambda, const Sched& s, long k) {
  check(k >= 1, "potential: k must be >= 1");
  const double lt = s.l_tilde;
  const double rho_k = s.rho(k), rho_k1 = s.rho(k + 1);
  const double eta_k = s.eta(k);  // the eta of the step that produced x
  const double alpha_k1 = s.alpha(k + 1);

  double coef = 1.0 / (72.0 * lt * lt * rho_k1 * rho_k1 * eta_k);
  double track = (g - penalty_grad_exact(p, x, lambda, rho_k1)).squaredNorm();

  PotentialReading out;
  out.Y = penalty_value_exact(p, x, lambda, rho_k1) + coef * track;

  const auto& c = p.constants;
  const double m = static_cast<double>(p.constraints.m);
  double drho = rho_k1 - rho_k;
  double term1 = 7.0 * m * m * c.Ct_grad_c * c.Ct_grad_c * c.Ct_c * c.Ct_c *
                 drho * drho / (12.0 * lt * lt * rho_k1 * rho_k1 * eta_k);
  double term2 = alpha_k1 * alpha_k1 *
                 (c.sigma_f * c.sigma_f +
                  2.0 * m * m * rho_k * rho_k *
                      (c.C_c * c.C_c * c.sigma_grad_c * c.sigma_grad_c +
                       c.Ct_grad_c * c.Ct_grad_c * c.sigma_c * c.sigma_c)) /
                 (12.0 * lt * lt * rho_k1 * rho_k1 * eta_k);
  out.allowance = term1 + term2;
  return out;
}

}  // namespace

PotentialReading potential_case3(const ProblemSpec& p, const Vec& x, const Vec& g,
                                 const Vec& lambda, const Case3Schedule& sched,
                                 long k) {
  return potential_qp(p, x, g, lambda, sched, k);
}

PotentialReading potential_case2det(const ProblemSpec& p, const Vec& x, const Vec& g,
                                    const Vec& lambda, const Case2DetSchedule& sched,
                                    long k) {
  return potential_qp(p, x, g, lambda, sched, k);
}

}  // namespace pstorm
