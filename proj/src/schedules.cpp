// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/schedules.hpp"

#include <algorithm>
#include <cmath>

namespace pstorm {

Case1Schedule Case1Schedule::from_constants(double L_f, double delta, double A_norm,
                                            const Case1Params& params) {
  check(L_f > 0, "case1: L_f must be positive");
  check(delta > 0, "case1: delta must be positive");
  check(A_norm >= 0, "case1: bad A norm");
  check(params.c1 > 0 && params.c2 > 0 && params.c3 > 0 && params.c4 > 0,
        "case1: c1..c4 must be positive");
  check(params.alpha_scale > 0, "case1: alpha_scale must be positive");

  Case1Schedule s;
  s.c1 = params.c1; s.c2 = params.c2; s.c3 = params.c3; s.c4 = params.c4;
  s.L_f = L_f; s.delta = delta; s.A_norm = A_norm;
  s.alpha_scale = params.alpha_scale;

  s.c = 121.0 * L_f * L_f;
  s.m_const = std::min({1.0 / (448.0 * L_f),
                        1.0 / (32.0 * (1.0 + s.c2 + s.c3) * L_f),
                        1.0 / (8.0 * (1.0 + 2.0 * s.c3) * L_f)});
  s.rho = params.rho_override.value_or(
      std::max({7.0 * (1.0 + s.c1) / (s.m_const * delta),
                4.0 * (6.0 + s.c4) * (1.0 + s.c1) * L_f / delta,
                168.0 * (1.0 + s.c1) * L_f / delta}));
  check(s.rho > 0, "case1: rho must be positive");
  s.eta_base = 1.0 / (11.0 * (L_f + s.rho * A_norm * A_norm));

  const double eta = s.eta_base, c = s.c;
  const double t1 = std::pow(10.0 * s.m_const / (3.0 * s.c1 * eta), 2.0);
  const double t2 = std::pow(20.0 / (3.0 * eta * s.c2 * L_f), 2.0);
  const double t3 = std::pow(10.0 / (3.0 * s.c3 * L_f), 2.0);
  const double t4 = 400.0 / (3.0 * eta * eta * s.c4 * L_f * L_f);
  const double t5 = std::pow(20.0 / (c * eta * eta), 4.0);
  const double t6 = std::pow(50.0 / (3.0 * c * eta * eta), 6.0);
  s.k0_formula = std::max({t1, t2, t3, t4, t5, t6, 2.0});
  s.k0 = params.k0_override.value_or(s.k0_formula);
  check(s.k0 >= 1.0, "case1: k0 must be >= 1");
  return s;
}

double Case1Schedule::eta(long k) const {
  double u = static_cast<double>(k) + k0;
  return eta_base / (std::cbrt(u) * std::log(u));
}

double Case1Schedule::inv_eta(long k) const {
  double u = static_cast<double>(k) + k0;
  return std::cbrt(u) * std::log(u) / eta_base;
}

double Case1Schedule::alpha(long k) const {
  double e = eta(k);
  return std::min(1.0, alpha_scale * c * e * e);
}

Case1At Case1Schedule::at(long k) const {
  check(k >= 0, "case1_at: k must be >= 0");
  return {eta(k), alpha(k), rho};
}

double Case1Schedule::allowance_v(long k) const {
  const double a_k = alpha(k), a_k1 = alpha(k + 1);
  const double e_k = eta(k), e_k1 = eta(k + 1);
  const double c_eff = alpha_scale * c;
  return 6.0 * (1.0 + c1) * a_k * a_k / (delta * rho) +
         a_k * a_k * m_const / (L_f * e_k1) +
         6.0 * a_k1 * a_k1 / (c_eff * e_k1) +
         18.0 * (1.0 + c1) * a_k * a_k / (rho * delta) +
         12.0 * m_const * a_k * a_k / (L_f * e_k);
}

namespace {

// u(x) = x^{1/3} log x evaluated at x = k + k0; 1/eta_k = u(k+k0)/eta_base.
inline double u_of(double x) { return std::cbrt(x) * std::log(x); }

// Upper bound on u(x+1) - u(x) via the derivative at the left endpoint
// (u is concave increasing for x >= e^2, so u' monotonically decreases).
inline double u_diff_upper(double x) {
  return std::pow(x, -2.0 / 3.0) * (std::log(x) / 3.0 + 1.0);
}

// u(x + step) - u(x), computed directly when the direct subtraction has
// enough bits, otherwise through the derivative bound. Direct subtraction
// at x ~ 1e53 would be pure cancellation noise.
inline double u_diff(double x, double step) {
  if (x < 1e12) return u_of(x + step) - u_of(x);
  double ub = 0;
  for (double s = 0; s < step; s += 1.0) ub += u_diff_upper(x + s);
  return ub;
}

}  // namespace

ScheduleValidation validate_case1(const Case1Schedule& s, long k_max) {
  check(k_max >= 2, "validate_case1: k_max must be >= 2");
  ScheduleValidation report;

  // Log-spaced grid of at most 10^4 distinct ks; always includes 1 and k_max.
  std::vector<long> ks;
  const int max_points = 10000;
  double lk = std::log(static_cast<double>(k_max));
  long prev = 0;
  for (int i = 0; i < max_points; ++i) {
    long k = static_cast<long>(std::llround(std::exp(lk * i / (max_points - 1))));
    k = std::max<long>(1, std::min(k, k_max));
    if (k != prev) ks.push_back(k);
    prev = k;
  }

  bool seen[7] = {false, false, false, false, false, false, false};
  auto record = [&](int ineq, long k, double lhs, double rhs) {
    bool ok = lhs <= rhs;
    if (!ok && !seen[ineq]) {
      report.first_violations.push_back({ineq, k, lhs, rhs, false});
      report.pass = false;
      seen[ineq] = true;
    }
  };

  const double eta = s.eta_base, c = s.c, L = s.L_f;
  for (long k : ks) {
    const double x = static_cast<double>(k) + s.k0;
    const double inv_eta_k1 = u_of(x + 1.0) / eta;          // 1/eta_{k+1}
    const double d_k_k1 = u_diff(x, 1.0) / eta;             // 1/eta_{k+1} - 1/eta_k
    const double d_k1_k2 = u_diff(x + 1.0, 1.0) / eta;      // 1/eta_{k+2} - 1/eta_{k+1}

    // (1) (1/(2 rho)) (1/eta_{k+2} - 1/eta_{k+1}) <= c1/(rho m)
    record(1, k, d_k1_k2 / (2.0 * s.rho), s.c1 / (s.rho * s.m_const));
    // (2) (eta_{k+1}^{-2} - eta_k^{-2})/2 <= c2 L / eta_{k+1}
    {
      double sum = (u_of(x + 1.0) + u_of(x)) / eta;
      record(2, k, d_k_k1 * sum / 2.0, s.c2 * L * inv_eta_k1);
    }
    // (3) (eta_{k+1}^{-1} - eta_k^{-1}) / (2 eta_{k+1}) <= c3 L / eta_{k+1}
    record(3, k, d_k_k1 * inv_eta_k1 / 2.0, s.c3 * L * inv_eta_k1);
    // (4) 3 (eta_k^{-1} - eta_{k+1}^{-1})^2 <= c4 L^2
    record(4, k, 3.0 * d_k_k1 * d_k_k1, s.c4 * L * L);
    // (5) 1/eta_{k+1} - 1/eta_k <= eta_{k+1} c / 2
    record(5, k, d_k_k1, c / (2.0 * inv_eta_k1));
    // (6) eta_{k+1} <= 2 eta_{k+2}, i.e. u(x+2) <= 2 u(x+1)
    record(6, k, u_of(x + 2.0), 2.0 * u_of(x + 1.0));

    ++report.points_checked;
  }
  return report;
}

// ---------------------------------------------------------------------------

Case3Schedule Case3Schedule::make(double rho, double lt) {
  check(lt > 0, "case3: l_tilde must be positive");
  Case3Schedule s;
  s.rho_base = std::max(1.0 + 1e-6, rho);  // must exceed 1
  s.l_tilde = lt;
  return s;
}

double Case3Schedule::eta(long k) const {
  check(k >= 0, "case3: k must be >= 0");
  return 1.0 / (9.0 * l_tilde * rho_base * std::pow(static_cast<double>(k + 1), 0.6));
}

double Case3Schedule::rho(long k) const {
  check(k >= 1, "case3: k must be >= 1");
  return rho_base * std::pow(static_cast<double>(k), 0.2);
}

double Case3Schedule::alpha(long k) const {
  check(k >= 1, "case3: k must be >= 1");
  if (alpha_override) return *alpha_override;
  return (72.0 / 81.0) * std::pow(static_cast<double>(k), -0.8);
}

Case2DetSchedule Case2DetSchedule::make(double rho, double lt) {
  check(lt > 0, "case2det: l_tilde must be positive");
  Case2DetSchedule s;
  s.rho_base = std::max(1.0 + 1e-6, rho);
  s.l_tilde = lt;
  return s;
}

double Case2DetSchedule::eta(long k) const {
  check(k >= 0, "case2det: k must be >= 0");
  return 1.0 / (9.0 * l_tilde * rho_base * std::sqrt(static_cast<double>(k + 1)));
}

double Case2DetSchedule::rho(long k) const {
  check(k >= 1, "case2det: k must be >= 1");
  return rho_base * std::pow(static_cast<double>(k), 0.25);
}

double Case2DetSchedule::alpha(long k) const {
  check(k >= 1, "case2det: k must be >= 1");
  if (alpha_override) return *alpha_override;
  return (72.0 / 81.0) / std::sqrt(static_cast<double>(k));
}

DualSchedule DualSchedule::make(double gamma) {
  check(gamma > 0, "dual: gamma must be positive");
  return DualSchedule{gamma};
}

double dual_gamma(const DualSchedule& sched, long k, double c_tilde_i) {
  check(k >= 1, "dual_gamma: k must be >= 1");
  double a = std::abs(c_tilde_i);
  if (a <= 1e-14) return 0.0;  // skip: the increment's limit at c~ -> 0 is 0
  double lg = std::log(static_cast<double>(k + 1));
  return sched.gamma / (static_cast<double>(k) * lg * lg * a);
}

double l_tilde(const AssumptionConstants& cst, int m, LTildeRegime regime,
               double lambda1_norm) {
  check(m >= 0, "l_tilde: bad constraint count");
  const double md = static_cast<double>(m);
  const double cross = cst.Ct_c * cst.Ct_c * cst.Lt_grad_c * cst.Lt_grad_c +
                       cst.Ct_grad_c * cst.Ct_grad_c * cst.Lt_c * cst.Lt_c;
  double sq = 0;
  switch (regime) {
    case LTildeRegime::Case3:
    case LTildeRegime::Case2Det:
      check(cst.Lt_grad_f > 0, "l_tilde: missing Lt_grad_f");
      sq = 4.0 * cst.Lt_grad_f * cst.Lt_grad_f + 4.0 * md * md * cross;
      break;
    case LTildeRegime::Dual: {
      check(cst.Lt_grad_f > 0, "l_tilde: missing Lt_grad_f");
      double lam = lambda1_norm + 4.0;
      sq = 0.75 * cst.Lt_grad_f * cst.Lt_grad_f +
           0.75 * md * md * lam * lam * cst.Lt_grad_c * cst.Lt_grad_c +
           1.5 * md * md * cross;
      break;
    }
  }
  check(sq > 0, "l_tilde: degenerate constants");
  return std::sqrt(sq);
}

}  // namespace pstorm
