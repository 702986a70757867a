// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pstorm/estimator.hpp"
#include "pstorm/metrics.hpp"
#include "pstorm/schedules.hpp"

namespace pstorm {

enum class SolverKind { LinAlm, StochQP, StochAlm, DetQP };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Solver state: everything needed to take one step. `k` counts completed
// steps. Index conventions follow each algorithm's own counting:
// the linear ALM step k (0-based) uses eta_{k+1}/alpha_{k+1}; the penalty
// family step (1-based index k = completed+1) uses eta_k, rho_k for the
// x-step and old estimator evaluation, rho_{k+1}, alpha_{k+1} for the new.
// ---------------------------------------------------------------------------
struct SolverState {
  Vec x;
  Vec lambda;  // zero-length when unused
  EstimatorState est;
  long k = 0;
  Rng rng{0};
  Vec prev_x;  // for metrics
  Vec prev_g;

  // Parameters of the most recent step (trace columns).
  double last_eta = 0, last_alpha = 0, last_rho = 0;
  // Penalty of the upcoming step: what the estimate currently tracks.
  double rho_next = 0;
  Vec lambda_init;  // lambda_1, for the dual-boundedness check
};

struct RunConfig {
  SolverKind kind = SolverKind::LinAlm;
  long K = 1000;
  uint64_t seed = 1;
  long stride = 100;
  bool potentials = false;
  bool record_walltime = false;  // off by default: traces stay byte-stable
  std::optional<Vec> x0;         // overrides the problem default
  std::optional<Vec> lambda0;    // dual-mode initial multiplier

  // Schedule inputs. Case I: tuning constants + desk-scale overrides.
  Case1Params case1;
  // Penalty family: rho > 1 and the dual step scale.
  double rho_base = 1.0 + 1e-6;
  double gamma = 1.0;
  std::optional<double> l_tilde_override;
  std::optional<double> alpha_override;  // test hook (zero-noise degeneracy)
};

// One trace row; the CSV schema, in declared order.
struct TraceRow {
  long k = 0;
  double eta_k = 0, rho_k = 0, alpha_k = 0;
  double feas = 0, cone_dist = 0, tracking_err = 0;
  double potential_Y = 0, allowance = 0;
  double objective = 0;
  double wall_nanos = 0;
};

extern const char* const kTraceHeader;

// Consecutive potential values recorded at stride points (Case-I runs with
// potentials enabled); the near-monotonicity diagnostics compare Y_{k+1}
// against Y_k + allowance.
struct PotentialPair {
  long k = 0;
  double y_k = 0, y_k1 = 0, allowance = 0;
};

struct RunReport {
  std::vector<TraceRow> rows;
  // ||eta_k^{-1}(x_k - x_{k-1})||^2 per row (0 for the k=0 row). Not part of
  // the CSV schema; the linear-ALM rate fits consume it.
  std::vector<double> step_sq;
  std::vector<PotentialPair> potential_pairs;

  long selected_index = 0;
  double selected_cone_dist = 0, selected_feas = 0;

  bool aborted = false;
  std::string abort_reason;
  bool dual_bound_ok = true;
  double min_potential = 0, potential_floor = 0;  // lower-boundedness monitor
  bool potential_floor_ok = true;

  uint64_t seed = 0;
  long K = 0, stride = 0;
};

// Built schedules for one run (resolved from RunConfig + problem constants).
struct ScheduleSet {
  std::optional<Case1Schedule> case1;
  std::optional<Case3Schedule> case3;
  std::optional<Case2DetSchedule> case2det;
  std::optional<DualSchedule> dual;
};

ScheduleSet build_schedules(const ProblemSpec& p, const RunConfig& cfg);

SolverState init_state(const ProblemSpec& p, const RunConfig& cfg,
                       const ScheduleSet& scheds);

// Alg. 1: x-step on the augmented Lagrangian, dual ascent, STORM update of
// the objective-gradient estimate. Linear constraints, X = R^d.
void step_linear_alm(SolverState& st, const ProblemSpec& p, const Case1Schedule& sched);

// Alg. 2 family: projected step on the penalty estimate, fresh bundle, STORM
// update of the penalty-gradient estimate; dual mode updates lambda from the
// bundle's zeta^2 value before the new-point evaluation.
void step_qp_stochastic(SolverState& st, const ProblemSpec& p,
                        const Case3Schedule& sched, const DualSchedule* dual);
void step_qp_stochastic(SolverState& st, const ProblemSpec& p,
                        const Case2DetSchedule& sched, const DualSchedule* dual);

// Uniform draw from {1, ..., K}.
long select_output(long K, Rng& rng);

RunReport run(const ProblemSpec& p, const RunConfig& cfg);

}  // namespace pstorm
