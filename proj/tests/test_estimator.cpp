// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include <catch2/catch_amalgamated.hpp>

#include "pstorm/estimator.hpp"
#include "pstorm/schedules.hpp"
#include "test_util.hpp"

using namespace pstorm;
using Catch::Approx;

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("storm_update: direct substitution") {
  CHECK(storm_update(v1(5), v1(3), v1(7), 1.0)[0] == 3.0);   // alpha=1 resets
  CHECK(storm_update(v1(2), v1(3), v1(2), 0.25)[0] == 3.0);  // zero correction
  CHECK(storm_update(v1(2), v1(3), v1(1), 0.5)[0] == Approx(3.5));
  CHECK_THROWS(storm_update(v1(1), v1(1), v1(1), 0.0));
  CHECK_THROWS(storm_update(v1(1), v1(1), v1(1), 1.5));
  CHECK_THROWS(storm_update(v1(1), Vec::Zero(2), v1(1), 0.5));
}

TEST_CASE("storm_update is affine in g") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    Vec g(3), h(3), gn(3), go(3);
    for (int i = 0; i < 3; ++i) {
      g[i] = rng.next_gaussian();
      h[i] = rng.next_gaussian();
      gn[i] = rng.next_gaussian();
      go[i] = rng.next_gaussian();
    }
    double alpha = 0.3;
    Vec diff = storm_update(g + h, gn, go, alpha) - storm_update(g, gn, go, alpha);
    CHECK((diff - (1.0 - alpha) * h).norm() <= 8 * 1e-16 * h.norm());
  }
}

TEST_CASE("penalty_grad_sample: two-sample oracle on the 1-d toy") {
  ProblemSpec p = testutil::stoch1d_problem();
  Vec x = v1(1.0);

  // lambda = 0, rho = 0 -> the objective sample alone (zero here)
  CHECK(penalty_grad_sample(p, x, Vec(), 0.0, {0, 0, 1})[0] == 0.0);

  // enumeration over the four (zeta1, zeta2) pairs at rho = 1:
  // mean of J(zeta1) * c(zeta2) = mean{1,3} * mean{1,3} = 4.
  double mean = 0;
  for (int z1 = 0; z1 < 2; ++z1)
    for (int z2 = 0; z2 < 2; ++z2)
      mean += 0.25 * penalty_grad_sample(p, x, Vec(), 1.0, {0, z1, z2})[0];
  CHECK(mean == Approx(4.0));

  // lambda = (1), rho = 0: mean of J^T lambda = mean{1,3} = 2.
  mean = 0;
  for (int z1 = 0; z1 < 2; ++z1)
    mean += 0.5 * penalty_grad_sample(p, x, v1(1.0), 0.0, {0, z1, 0})[0];
  CHECK(mean == Approx(2.0));

  ProblemSpec det = testutil::quadratic_problem(v1(0));
  CHECK_THROWS(penalty_grad_sample(det, x, Vec(), 1.0, {0, 0, 0}));
}

TEST_CASE("penalty_grad_exact: sphere hand evaluation") {
  // c = ||x||^2 - 1, f == 0, lambda = 0, rho = 1, x = (2,0): grad = (12, 0)
  ProblemSpec p = testutil::quadratic_problem(Vec::Zero(2));
  p.objective.grad_sample = [](const Vec&, int) -> Vec { return Vec::Zero(2); };
  p.objective.value_sample = nullptr;
  p.objective.finalize();
  p.constraints.kind = ConstraintKind::DetNonlinear;
  p.constraints.m = 1;
  p.constraints.c = [](const Vec& x) -> Vec { return v1(x.squaredNorm() - 1.0); };
  p.constraints.jac = [](const Vec& x) -> Mat {
    Mat J(1, 2);
    J.row(0) = 2.0 * x.transpose();
    return J;
  };
  p.constraints.finalize();
  Vec x(2);
  x << 2, 0;
  Vec g = penalty_grad_exact(p, x, Vec(), 1.0);
  CHECK(g[0] == Approx(12.0));
  CHECK(g[1] == 0.0);

  // rho = 0, lambda = 0 reduces to the exact objective gradient
  CHECK((penalty_grad_exact(p, x, Vec(), 0.0) - exact_grad_f(p, x)).norm() == 0.0);
}

TEST_CASE("full-bundle enumeration mean equals penalty_grad_exact") {
  ProblemSpec p = testutil::stoch1d_problem();
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    Vec x = v1(3 * rng.next_gaussian());
    Vec lam = v1(rng.next_gaussian());
    double rho = 0.5 + rng.next_double();
    Vec mean = Vec::Zero(1);
    for (int xi = 0; xi < 1; ++xi)
      for (int z1 = 0; z1 < 2; ++z1)
        for (int z2 = 0; z2 < 2; ++z2)
          mean += 0.25 * penalty_grad_sample(p, x, lam, rho, {xi, z1, z2});
    Vec exact = penalty_grad_exact(p, x, lam, rho);
    CHECK((mean - exact).norm() <= 1e-10);
  }
}

TEST_CASE("zero-noise contraction follows the (1-alpha) product") {
  // Deterministic oracle (|Xi| = |Z| = 1), fixed x: the tracking error
  // contracts by exactly (1 - alpha_k) per update.
  ProblemSpec p = testutil::quadratic_problem(v1(2.0));
  Vec x = v1(0.5);
  Vec target = exact_grad_f(p, x);
  Case3Schedule sched = Case3Schedule::make(1.0, 1.0);

  Vec g = v1(10.0);
  const double init = (g - target).norm();
  double expected = init;
  for (long k = 1; k <= 1000; ++k) {
    double alpha = sched.alpha(k);
    Vec at_x = sample_grad_f(p, x, 0);
    g = storm_update(g, at_x, at_x, alpha);
    expected *= (1.0 - alpha);
    REQUIRE(std::abs((g - target).norm() - expected) <= 1e-12 * init);
  }
}
