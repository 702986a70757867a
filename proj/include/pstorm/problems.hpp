// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>

#include "pstorm/core.hpp"
#include "pstorm/rng.hpp"

namespace pstorm {

// Uniform draw from the estimation region (box, or annulus when declared).
Vec sample_region_point(const EstimationRegion& region, Rng& rng);

// Smallest nonzero eigenvalue of A^T A (threshold 1e-10 * largest eigenvalue).
// Throws if every eigenvalue sits below the threshold.
double delta_of(const Mat& A);

// Spectral norm ||A||.
double spectral_norm(const Mat& A);

struct SharingOptions {
  int n = 50;             // finite-sum components
  double s = 0.5;         // nonconvex perturbation strength
  double a_scale = 1.0;   // component-center spread
  double box_half = 5.0;  // constant-estimation box [-b, b]^d
  int est_samples = 64;
  double safety = 1.25;
};

// Problem (I): min f(x) s.t. Ax = b, X = R^d. Random full-row-rank A, b
// constructed from a random feasible point, f a finite sum of quadratics
// plus the bounded smooth nonconvex term s * sum_j t^2/(1+t^2).
ProblemSpec make_sharing(int d, int m, int n, uint64_t seed,
                         const SharingOptions& opts = {});

struct SphereOptions {
  int n = 20;
  double s = 0.5;
  double a_scale = 1.0;
  bool full_space = false;     // X = R^d instead of the box
  double box_half = 3.0;       // X = Box[-box_half, box_half]^d
  double annulus_min = 0.5;    // declared run region (the regularity
  double annulus_max = 3.0;    // constant fails at the origin)
  double init_radius = 1.5;
  int est_samples = 64;
  double safety = 1.25;
};

// Problem (II): same objective family, c(x) = ||x||^2 - 1 (m = 1).
ProblemSpec make_sphere(int d, uint64_t seed, const SphereOptions& opts = {});

struct StochSphereOptions : SphereOptions {
  // Zero-mean noise tables; outcome z carries (value_noise, jac_noise):
  //   c~(x, z)   = ||x||^2 - 1 + value_noise[z]
  //   J~(x, z)   = 2 x^T (1 + jac_noise[z])
  std::vector<double> value_noise = {-0.1, 0.1, -0.1, 0.1};
  std::vector<double> jac_noise = {-0.2, -0.2, 0.2, 0.2};
};

// Problem (III): the sphere with stochastic constraint oracles.
ProblemSpec make_stoch_sphere(int d, uint64_t seed,
                              const StochSphereOptions& opts = {});

// Numeric estimation of the (A1)-(A5) constants: Lipschitz constants via
// maxima of enumeration difference quotients over sampled pairs (half global,
// half local perturbations), variances and sup bounds via sampled maxima.
// Everything except exact zeros is inflated by `safety`.
AssumptionConstants estimate_constants(const ProblemSpec& p,
                                       const EstimationRegion& region,
                                       int num_samples, uint64_t seed,
                                       double safety = 1.25);

// Full-data serialization of the built-in families (the generated tables,
// not the generator inputs), so a problem document reloads bit-identically.
nlohmann::json problem_to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const nlohmann::json& j);

// Enumeration-level invariants every built-in must satisfy: oracle
// unbiasedness against the registered exact maps and, for Linear systems,
// the delta / smallest-nonzero-eigenvalue match.
void verify_problem(const ProblemSpec& p, uint64_t seed, int points = 10);

}  // namespace pstorm
