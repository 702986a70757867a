// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include "pstorm/core.hpp"
#include "pstorm/rng.hpp"

namespace pstorm {

// Recursive variance-reduced estimate g plus the anchor at which the next
// correction term must be evaluated. The anchor is what the previous fresh
// sample bundle saw, so reusing it keeps the single-bundle contract explicit.
struct EstimatorState {
  Vec g;
  Vec last_x;
  double last_rho = 0.0;
  Vec last_lambda;  // zero-length when unused
};

// One iteration's samples: one objective outcome and two independent
// constraint outcomes (zeta1 for all Jacobian rows, zeta2 for all values).
struct SampleBundle {
  int xi0 = 0;
  int zeta1 = -1;
  int zeta2 = -1;
};

SampleBundle draw_bundle(const ProblemSpec& p, Rng& rng);

// g' = g_new_at_new + (1 - alpha) * (g - g_old_at_old).
// Both oracle evaluations must come from the SAME sample bundle; the API
// takes pre-evaluated vectors to make that caller contract testable.
Vec storm_update(const Vec& g, const Vec& g_new_at_new, const Vec& g_old_at_old,
                 double alpha);

// Two-sample unbiased oracle for grad Q_rho(x, lambda):
//   grad_f(x, xi0) + J(x, zeta1)^T lambda + rho * J(x, zeta1)^T c(x, zeta2).
// Requires StochNonlinear constraints. Pass a zero-length lambda for the
// plain quadratic-penalty form.
Vec penalty_grad_sample(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                        double rho, const SampleBundle& bundle);

// Same shape with exact constraint evaluations and a sampled objective
// gradient; this is the oracle of the deterministic-constraint regime.
Vec penalty_grad_sample_det(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                            double rho, int xi0);

// Diagnostic reference: grad f + J^T lambda + rho J^T c with exact oracles.
Vec penalty_grad_exact(const ProblemSpec& p, const Vec& x, const Vec& lambda,
                       double rho);

}  // namespace pstorm
