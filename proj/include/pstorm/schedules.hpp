// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <optional>
#include <vector>

#include "pstorm/core.hpp"

namespace pstorm {

// ---------------------------------------------------------------------------
// Linear-constraint (Case I) schedule.
//
// Derived constants, term for term:
//   c    = 121 L_f^2
//   m    = min( 1/(448 L_f), 1/(32(1+c2+c3) L_f), 1/(8(1+2c3) L_f) )
//   rho  = max( 7(1+c1)/(m delta), 4(6+c4)(1+c1) L_f/delta, 168(1+c1) L_f/delta )
//   eta  = 1/(11 (L_f + rho ||A||^2))
//   k0   = max( (10m/(3 c1 eta))^2, (20/(3 eta c2 L_f))^2, (10/(3 c3 L_f))^2,
//               400/(3 eta^2 c4 L_f^2), (20/(c eta^2))^4, (50/(3 c eta^2))^6, 2 )
//   eta_k   = eta / ((k+k0)^{1/3} log(k+k0)),   alpha_k = min(1, c eta_k^2)
//
// The derived k0 exceeds 1e7 for every instance (the (50/(3 c eta^2))^6 term
// alone guarantees it, since c eta^2 <= (1/6273)^2 by construction), which
// freezes eta_k at any feasible iteration count. Desk-scale experiment
// configs therefore override k0 / rho / alpha_scale while keeping the
// functional forms; the defaults stay literal.
// ---------------------------------------------------------------------------
struct Case1Params {
  double c1 = 1, c2 = 1, c3 = 1, c4 = 1;
  std::optional<double> k0_override;
  std::optional<double> rho_override;
  double alpha_scale = 1.0;  // multiplies c in alpha_k = min(1, scale*c*eta_k^2)
};

struct Case1At {
  double eta;
  double alpha;
  double rho;
};

class Case1Schedule {
 public:
  static Case1Schedule from_constants(double L_f, double delta, double A_norm,
                                      const Case1Params& params = {});

  Case1At at(long k) const;          // k >= 0
  double eta(long k) const;
  double inv_eta(long k) const;      // (k+k0)^{1/3} log(k+k0) / eta_base
  double alpha(long k) const;

  // v_k of the one-step potential inequality: the allowance multiplying V^2
  // in E Y_{k+1} <= E Y_k + v_k V^2.
  double allowance_v(long k) const;

  double c1 = 1, c2 = 1, c3 = 1, c4 = 1;
  double L_f = 0, delta = 0, A_norm = 0;
  double c = 0;          // 121 L_f^2
  double m_const = 0;    // step-weighting constant (named m_const: plain m
                         // collides with the constraint count)
  double rho = 0;
  double eta_base = 0;
  double k0 = 0;
  double alpha_scale = 1.0;
  double k0_formula = 0;  // the literal 7-way max, before any override
};

// One Fact-A.1 style inequality check at a given k.
struct ScheduleCheck {
  int inequality = 0;  // 1..6
  long k = 0;
  double lhs = 0, rhs = 0;
  bool pass = true;
};

struct ScheduleValidation {
  bool pass = true;
  std::vector<ScheduleCheck> first_violations;  // at most one per inequality
  long points_checked = 0;
};

// Numerically checks the six step-size inequalities for k in [1, k_max] on a
// log-spaced grid of at most 10^4 points. Violations are report entries.
ScheduleValidation validate_case1(const Case1Schedule& sched, long k_max);

// ---------------------------------------------------------------------------
// Stochastic-constraint (Case III) schedule:
//   eta_k = 1/(9 Lt rho (k+1)^{3/5}), rho_k = rho k^{1/5},
//   alpha_{k+1} = 72/(81 (k+1)^{4/5}).
// ---------------------------------------------------------------------------
// What one iteration of the penalty family consumes: the step size and
// penalty of step k plus the estimator weight alpha_{k+1}.
struct QpAt {
  double eta;
  double rho;
  double alpha_next;
};

struct Case3Schedule {
  double rho_base = 1.0 + 1e-6;  // must exceed 1
  double l_tilde = 1.0;
  std::optional<double> alpha_override;  // test hook (zero-noise degeneracy)

  static Case3Schedule make(double rho, double l_tilde);
  double eta(long k) const;    // k >= 1
  double rho(long k) const;
  double alpha(long k) const;  // alpha_k = 72/(81 k^{4/5}), k >= 1
  QpAt at(long k) const { return {eta(k), rho(k), alpha(k + 1)}; }
};

// Deterministic-constraint schedule: exponents (1/2, 1/4, 1/2).
struct Case2DetSchedule {
  double rho_base = 1.0 + 1e-6;
  double l_tilde = 1.0;
  std::optional<double> alpha_override;

  static Case2DetSchedule make(double rho, double l_tilde);
  double eta(long k) const;
  double rho(long k) const;
  double alpha(long k) const;
  QpAt at(long k) const { return {eta(k), rho(k), alpha(k + 1)}; }
};

// Dual-update step sizes gamma_{k,i} = gamma / (k log^2(k+1) |c~_i|).
struct DualSchedule {
  double gamma = 1.0;
  static DualSchedule make(double gamma);
};

// Returns gamma_{k,i}; 0 when |c_tilde_i| <= 1e-14 (the increment's natural
// limit, since gamma_{k,i} * c~_i -> 0).
double dual_gamma(const DualSchedule& sched, long k, double c_tilde_i);

// ---------------------------------------------------------------------------
// The variance-reduction smoothness constant Lt for each regime.
// ---------------------------------------------------------------------------
enum class LTildeRegime { Case3, Case2Det, Dual };

// For Dual, lambda1_norm is ||lambda_1|| of the run's initial dual.
double l_tilde(const AssumptionConstants& constants, int m, LTildeRegime regime,
               double lambda1_norm = 0.0);

}  // namespace pstorm
