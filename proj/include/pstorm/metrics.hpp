// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <optional>

#include "pstorm/core.hpp"
#include "pstorm/schedules.hpp"

namespace pstorm {

struct StationarityReading {
  double cone_dist = 0;  // d(grad f + J^T lambda, -N_X(x))
  double feas = 0;       // ||c(x)||
  Vec lambda_used;
};

// Multiplier choice for a reading: an explicit vector, or the QP-implied
// lambda = rho_k c(x) from the run's current penalty (optionally on top of
// an iterate dual, the dual-update regime's stationarity certificate).
struct MultiplierRule {
  Vec lambda;              // zero-length => none
  bool qp_implied = false;
  double rho_k = 0;

  static MultiplierRule given(const Vec& lambda);
  static MultiplierRule qp(double rho_k);
  static MultiplierRule dual_plus_qp(const Vec& lambda, double rho_k);
};

// Exact-oracle stationarity pair at x under the multiplier rule.
StationarityReading stationarity(const ProblemSpec& p, const Vec& x,
                                 const MultiplierRule& rule);

// ||g - grad f(x)|| (linear-constraint runs, lambda empty and rho = 0) or
// ||g - grad Q_rho(x, lambda)|| (penalty-family runs), exact oracles.
double tracking_error(const ProblemSpec& p, const Vec& x, const Vec& g,
                      double rho, const Vec& lambda);

struct PotentialReading {
  double Y = 0;
  double allowance = 0;  // v_k V^2 (Case I) or E_{k+1} (penalty family)
};

// Consecutive-iterate pair needed to evaluate the Case-I potential Y_{k+1}.
struct Case1Pair {
  Vec x_k, x_k1;
  Vec lambda_k1;
  Vec g_k, g_k1;
};

// Y_{k+1} of the linear-constraint potential, term for term:
//   L_rho(x_{k+1}, lambda_{k+1}) + rho m/(2 eta_{k+2}) ||A x_{k+1} - b||^2
//   + m/(2 eta_{k+1}) ||x_{k+1} - x_k||^2_{Q_{k+1}}
//   + beta_{1,k+1} ||x_{k+1} - x_k||^2 + 2/(c eta_{k+1}) ||g_{k+1} - grad f(x_{k+1})||^2
//   + (6(1+c1)/(rho delta) + 4 m/(L_f eta_k)) ||g_k - grad f(x_k)||^2
// with Q_{k+1} = eta_{k+1}^{-1} I - rho A^T A. Allowance is v_k V^2.
PotentialReading potential_case1(const ProblemSpec& p, const Case1Pair& pair,
                                 const Case1Schedule& sched, long k);

// Y_{k+1} = Q_{rho_{k+1}}(x_{k+1}) + 1/(72 Lt^2 rho_{k+1}^2 eta_k) ||g - grad Q||^2
// evaluated with exact oracles at the state after step k; the allowance is
// the explicit two-term E_{k+1}. Works for both penalty-family schedules.
PotentialReading potential_case3(const ProblemSpec& p, const Vec& x, const Vec& g,
                                 const Vec& lambda, const Case3Schedule& sched,
                                 long k);
PotentialReading potential_case2det(const ProblemSpec& p, const Vec& x, const Vec& g,
                                    const Vec& lambda, const Case2DetSchedule& sched,
                                    long k);

// Q_rho(x, lambda) = f(x) + <lambda, c(x)> + rho/2 ||c(x)||^2, exact oracles.
double penalty_value_exact(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                           double rho);

}  // namespace pstorm
