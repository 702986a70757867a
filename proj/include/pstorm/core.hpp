// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pstorm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// Objective oracle: a finite sample space Xi with explicit weights, and a
// per-outcome gradient map. Finite spaces make unbiasedness checkable by
// enumeration; continuous noise is emulated by a large table.
// ---------------------------------------------------------------------------
struct ObjectiveOracle {
  std::vector<double> weights;  // P_Xi, sums to 1
  std::function<Vec(const Vec&, int)> grad_sample;
  std::function<double(const Vec&, int)> value_sample;  // optional, may be null

  std::vector<double> cdf;  // cumulative weights, built by finalize()

  int num_outcomes() const { return static_cast<int>(weights.size()); }
  bool has_values() const { return static_cast<bool>(value_sample); }
  void finalize();  // validates weights, builds cdf
};

// ---------------------------------------------------------------------------
// Constraint system: Linear (Ax - b), deterministic nonlinear, or stochastic
// nonlinear with a finite sample space Z.
// ---------------------------------------------------------------------------
enum class ConstraintKind { Linear, DetNonlinear, StochNonlinear };

struct ConstraintSystem {
  ConstraintKind kind = ConstraintKind::Linear;
  int m = 0;  // number of constraint rows

  // Linear
  Mat A;
  Vec b;
  double delta = 0.0;  // smallest nonzero eigenvalue of A^T A

  // DetNonlinear
  std::function<Vec(const Vec&)> c;
  std::function<Mat(const Vec&)> jac;

  // StochNonlinear
  std::vector<double> weights;  // P_Z
  std::function<Vec(const Vec&, int)> c_sample;
  std::function<Mat(const Vec&, int)> jac_sample;
  std::vector<double> cdf;

  // Registered exact maps, the independent side of the enumeration
  // unbiasedness check for stochastic systems. Optional.
  std::function<Vec(const Vec&)> c_ref;
  std::function<Mat(const Vec&)> jac_ref;

  int num_outcomes() const { return static_cast<int>(weights.size()); }
  void finalize();
};

// ---------------------------------------------------------------------------
// Feasible set X: the four closed convex variants with exact projections.
// General convex X is rejected at construction by design; the normal-cone
// distance has no generic closed form.
// ---------------------------------------------------------------------------
enum class SetKind { FullSpace, Box, NonnegativeOrthant, Ball };

struct FeasibleSet {
  SetKind kind = SetKind::FullSpace;
  Vec lower, upper;   // Box
  Vec center;         // Ball
  double radius = 0;  // Ball

  static FeasibleSet full_space();
  static FeasibleSet box(const Vec& lower, const Vec& upper);
  static FeasibleSet nonnegative_orthant();
  static FeasibleSet ball(const Vec& center, double radius);

  bool contains(const Vec& x, double tol = 1e-9) const;
};

Vec project(const FeasibleSet& set, const Vec& x);

// d(v, -N_X(x)). Points within 1e-9 of X are snapped by projection first;
// farther points are a precondition error.
double normal_cone_distance(const FeasibleSet& set, const Vec& x, const Vec& v);

// ---------------------------------------------------------------------------
// Assumption constants (A1)-(A5). Zero means "not set"; the schedule
// constructors reject missing constants they need.
// ---------------------------------------------------------------------------
struct AssumptionConstants {
  double L_f = 0;       // A1 mean-square smoothness of the objective oracle
  double V = 0;         // A1 gradient-noise variance bound
  double Lt_grad_f = 0; // A2
  double Lt_grad_c = 0; // A2
  double Lt_c = 0;      // A2
  double sigma_f = 0;   // A3
  double sigma_grad_c = 0;
  double sigma_c = 0;
  double C_grad_c = 0;  // A4
  double C_c = 0;
  double Ct_grad_c = 0;
  double Ct_c = 0;
  double B_f = 0;
  double C_grad_f = 0;
  double Q_lower = 0;
  double delta_reg = 0; // A5 regularity constant

  void validate() const;
};

// Region on which constants were estimated (and where runs are expected to
// live). Box bounds, optionally restricted to an annulus in ||x - 0||.
struct EstimationRegion {
  Vec lo, hi;
  bool annulus = false;
  double r_min = 0, r_max = 0;
};

// ---------------------------------------------------------------------------
// ProblemSpec: one constrained stochastic problem.
// ---------------------------------------------------------------------------
struct ProblemSpec {
  int dim = 0;
  ObjectiveOracle objective;
  ConstraintSystem constraints;
  FeasibleSet set;
  AssumptionConstants constants;

  // Registered closed-form references for the built-ins; used as the
  // independent side of the unbiasedness checks. Optional for user problems.
  std::function<Vec(const Vec&)> exact_grad_ref;
  std::function<double(const Vec&)> exact_value_ref;

  Vec x0;  // recommended initialization (defaults to project(set, 0))
  EstimationRegion region;
  std::string name;

  // Opaque handle to the generated data tables of a built-in family;
  // problems.cpp uses it for full-data JSON serialization.
  std::shared_ptr<const void> family_data;

  void validate() const;  // structural invariants (dims, weights)
};

// One stochastic gradient draw: grad_sample(x, xi).
Vec sample_grad_f(const ProblemSpec& p, const Vec& x, int xi);

// Brute-force enumeration oracle: probability-weighted mean over Xi.
Vec exact_grad_f(const ProblemSpec& p, const Vec& x);

// Enumeration mean of the objective value (requires value samples).
double exact_value_f(const ProblemSpec& p, const Vec& x);

enum class EvalMode { Exact, Sampled };

struct ConstraintEval {
  Vec value;     // m
  Mat jacobian;  // m x d
};

// Exact is valid for every variant (enumeration for StochNonlinear);
// Sampled only for StochNonlinear, with zeta the outcome index.
ConstraintEval constraints_eval(const ProblemSpec& p, const Vec& x,
                                EvalMode mode, int zeta = -1);

}  // namespace pstorm
