// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include <catch2/catch_amalgamated.hpp>

#include "pstorm/core.hpp"
#include "pstorm/rng.hpp"
#include "test_util.hpp"

using namespace pstorm;
using Catch::Approx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("project: closed forms per variant") {
  CHECK(testutil::same(project(FeasibleSet::full_space(), v2(3, -2)), v2(3, -2)));

  FeasibleSet box = FeasibleSet::box(v2(0, 0), v2(1, 1));
  CHECK(testutil::same(project(box, v2(1.5, -0.2)), v2(1.0, 0.0)));

  FeasibleSet ball = FeasibleSet::ball(v2(0, 0), 1.0);
  Vec p = project(ball, v2(3, 4));
  CHECK(p[0] == Approx(0.6).margin(1e-15));
  CHECK(p[1] == Approx(0.8).margin(1e-15));

  CHECK(testutil::same(project(FeasibleSet::nonnegative_orthant(), v2(-1, 2)), v2(0, 2)));
  CHECK_THROWS(project(box, Vec::Zero(3)));
}

TEST_CASE("project: idempotent, membership, nonexpansive") {
  Rng rng(7);
  std::vector<FeasibleSet> sets = {
      FeasibleSet::full_space(), FeasibleSet::box(v2(-1, 0), v2(2, 0.5)),
      FeasibleSet::nonnegative_orthant(), FeasibleSet::ball(v2(1, -1), 2.0)};
  for (const auto& set : sets) {
    for (int t = 0; t < 100; ++t) {
      Vec x = v2(5 * rng.next_gaussian(), 5 * rng.next_gaussian());
      Vec y = v2(5 * rng.next_gaussian(), 5 * rng.next_gaussian());
      Vec px = project(set, x), py = project(set, y);
      CHECK(testutil::same(project(set, px), px));  // exact idempotence
      CHECK(set.contains(px, 1e-12));
      CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("normal_cone_distance: closed forms") {
  CHECK(normal_cone_distance(FeasibleSet::full_space(), v2(0, 0), v2(3, 4)) ==
        Approx(5.0));

  FeasibleSet orthant = FeasibleSet::nonnegative_orthant();
  CHECK(normal_cone_distance(orthant, v2(0, 2), v2(1, 0)) == 0.0);
  CHECK(normal_cone_distance(orthant, v2(0, 2), v2(-1, 3)) ==
        Approx(std::sqrt(10.0)));

  // box: at an upper-active coordinate -N_X admits the nonpositive part
  FeasibleSet box = FeasibleSet::box(v2(0, 0), v2(1, 1));
  CHECK(normal_cone_distance(box, v2(1, 0.5), v2(-2, 0)) == 0.0);
  CHECK(normal_cone_distance(box, v2(1, 0.5), v2(2, 0)) == Approx(2.0));

  // ball boundary: inward-normal vectors sit inside -N_X
  FeasibleSet ball = FeasibleSet::ball(v2(0, 0), 1.0);
  CHECK(normal_cone_distance(ball, v2(1, 0), v2(-3, 0)) == 0.0);
  CHECK(normal_cone_distance(ball, v2(1, 0), v2(2, 0)) == Approx(2.0));
  CHECK(normal_cone_distance(ball, v2(1, 0), v2(0, 1.5)) == Approx(1.5));
  CHECK(normal_cone_distance(ball, v2(0.2, 0), v2(0.3, 0.4)) == Approx(0.5));

  // membership precondition
  CHECK_THROWS(normal_cone_distance(orthant, v2(-1, 0), v2(1, 1)));
  // snapping tolerance: 1e-10 outside is fine
  CHECK(normal_cone_distance(orthant, v2(-1e-10, 2), v2(1, 0)) == 0.0);
}

TEST_CASE("normal_cone_distance: zero whenever v lies in -N_X(x)") {
  Rng rng(11);
  FeasibleSet box = FeasibleSet::box(v2(-1, -1), v2(1, 1));
  for (int t = 0; t < 50; ++t) {
    // active at both lower bounds; -N_X = [0,inf)^2 there
    Vec v = v2(std::abs(rng.next_gaussian()), std::abs(rng.next_gaussian()));
    CHECK(normal_cone_distance(box, v2(-1, -1), v) == 0.0);
    // and inward-pointing vectors at an upper corner
    CHECK(normal_cone_distance(box, v2(1, 1), Vec(-v)) == 0.0);
  }
}

TEST_CASE("sample_grad_f / exact_grad_f") {
  Vec a = v2(1.0, -2.0);
  ProblemSpec p = testutil::quadratic_problem(a);

  // single-outcome space: the sample equals the exact gradient
  Vec x = v2(0.5, 0.5);
  CHECK(testutil::same(sample_grad_f(p, x, 0), exact_grad_f(p, x)));
  CHECK_THROWS(sample_grad_f(p, x, 1));

  // two outcomes with grads (1,0) and (0,1), equal weights -> (0.5, 0.5)
  ProblemSpec q = p;
  q.objective.weights = {0.5, 0.5};
  q.objective.grad_sample = [](const Vec&, int i) -> Vec {
    Vec g = Vec::Zero(2);
    g[i] = 1.0;
    return g;
  };
  q.objective.value_sample = nullptr;
  q.objective.finalize();
  CHECK(testutil::same(exact_grad_f(q, x), v2(0.5, 0.5)));

  // finite-sum component gradient under uniform weights
  std::vector<Vec> centers = {v2(1, 0), v2(0, 1), v2(-1, -1)};
  ProblemSpec r = p;
  r.objective.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  r.objective.grad_sample = [centers](const Vec& xx, int i) -> Vec {
    return xx - centers[i];
  };
  r.objective.value_sample = nullptr;
  r.objective.finalize();
  CHECK(testutil::same(sample_grad_f(r, x, 1), Vec(x - centers[1])));
}

TEST_CASE("objective weights must sum to one") {
  ProblemSpec p = testutil::quadratic_problem(v2(0, 0));
  p.objective.weights = {0.5, 0.4};
  CHECK_THROWS(p.objective.finalize());
}

TEST_CASE("constraints_eval: all variants") {
  // Linear A = I2, b = 0
  ProblemSpec p = testutil::quadratic_problem(v2(0, 0));
  p.constraints.kind = ConstraintKind::Linear;
  p.constraints.A = Mat::Identity(2, 2);
  p.constraints.b = Vec::Zero(2);
  p.constraints.finalize();
  ConstraintEval ce = constraints_eval(p, v2(1, 2), EvalMode::Exact);
  CHECK(testutil::same(ce.value, v2(1, 2)));
  CHECK(testutil::same(ce.jacobian, Mat::Identity(2, 2)));
  CHECK_THROWS(constraints_eval(p, v2(1, 2), EvalMode::Sampled, 0));

  // sphere constraint on the sphere
  ProblemSpec q = testutil::quadratic_problem(v2(0, 0));
  q.constraints.kind = ConstraintKind::DetNonlinear;
  q.constraints.m = 1;
  q.constraints.c = [](const Vec& x) -> Vec {
    Vec v(1);
    v[0] = x.squaredNorm() - 1.0;
    return v;
  };
  q.constraints.jac = [](const Vec& x) -> Mat {
    Mat J(1, 2);
    J.row(0) = 2.0 * x.transpose();
    return J;
  };
  q.constraints.finalize();
  ce = constraints_eval(q, v2(1, 0), EvalMode::Exact);
  CHECK(ce.value[0] == 0.0);
  CHECK(testutil::same(Vec(ce.jacobian.row(0).transpose()), v2(2, 0)));

  // stochastic: enumeration mean of {x1, 3x1}
  ProblemSpec s = testutil::stoch1d_problem();
  Vec x1(1);
  x1 << 1.0;
  ce = constraints_eval(s, x1, EvalMode::Exact);
  CHECK(ce.value[0] == Approx(2.0));
  CHECK(ce.jacobian(0, 0) == Approx(2.0));
  ce = constraints_eval(s, x1, EvalMode::Sampled, 1);
  CHECK(ce.value[0] == 3.0);
  CHECK_THROWS(constraints_eval(s, x1, EvalMode::Sampled, 5));
}

TEST_CASE("enumeration gradient is unbiased against the registered map") {
  ProblemSpec p = testutil::stoch1d_problem();
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Vec x(1);
    x << 4 * rng.next_gaussian();
    CHECK((exact_grad_f(p, x) - p.exact_grad_ref(x)).norm() <= 1e-10);
  }
}
