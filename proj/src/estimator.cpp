// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/estimator.hpp"

namespace pstorm {

SampleBundle draw_bundle(const ProblemSpec& p, Rng& rng) {
  SampleBundle b;
  b.xi0 = rng.sample_cdf(p.objective.cdf);
  if (p.constraints.kind == ConstraintKind::StochNonlinear) {
    b.zeta1 = rng.sample_cdf(p.constraints.cdf);
    b.zeta2 = rng.sample_cdf(p.constraints.cdf);
  }
  return b;
}

Vec storm_update(const Vec& g, const Vec& g_new_at_new, const Vec& g_old_at_old,
                 double alpha) {
  check(alpha > 0.0 && alpha <= 1.0, "storm_update: alpha must be in (0, 1]");
  check(g.size() == g_new_at_new.size() && g.size() == g_old_at_old.size(),
        "storm_update: dimension mismatch");
  return g_new_at_new + (1.0 - alpha) * (g - g_old_at_old);
}

Vec penalty_grad_sample(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                        double rho, const SampleBundle& bundle) {
  check(p.constraints.kind == ConstraintKind::StochNonlinear,
        "penalty_grad_sample: needs stochastic constraints");
  check(rho >= 0.0, "penalty_grad_sample: rho must be nonnegative");
  const ConstraintSystem& cs = p.constraints;
  check(bundle.zeta1 >= 0 && bundle.zeta1 < cs.num_outcomes() &&
        bundle.zeta2 >= 0 && bundle.zeta2 < cs.num_outcomes(),
        "penalty_grad_sample: unknown constraint outcome");

  Vec g = sample_grad_f(p, x, bundle.xi0);
  Mat J1 = cs.jac_sample(x, bundle.zeta1);
  if (lambda.size() > 0) {
    check(lambda.size() == cs.m, "penalty_grad_sample: lambda size mismatch");
    g += J1.transpose() * lambda;
  }
  if (rho != 0.0) {
    Vec c2 = cs.c_sample(x, bundle.zeta2);
    g += rho * (J1.transpose() * c2);
  }
  return g;
}

Vec penalty_grad_sample_det(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                            double rho, int xi0) {
  check(p.constraints.kind != ConstraintKind::StochNonlinear,
        "penalty_grad_sample_det: needs deterministic constraints");
  ConstraintEval ce = constraints_eval(p, x, EvalMode::Exact);
  Vec g = sample_grad_f(p, x, xi0);
  if (lambda.size() > 0) g += ce.jacobian.transpose() * lambda;
  if (rho != 0.0) g += rho * (ce.jacobian.transpose() * ce.value);
  return g;
}

Vec penalty_grad_exact(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                       double rho) {
  ConstraintEval ce = constraints_eval(p, x, EvalMode::Exact);
  Vec g = exact_grad_f(p, x);
  if (lambda.size() > 0) {
    check(lambda.size() == ce.value.size(), "penalty_grad_exact: lambda size mismatch");
    g += ce.jacobian.transpose() * lambda;
  }
  if (rho != 0.0) g += rho * (ce.jacobian.transpose() * ce.value);
  return g;
}

}  // namespace pstorm
