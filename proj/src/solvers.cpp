// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/solvers.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <limits>

namespace pstorm {

const char* const kTraceHeader =
    "k,eta_k,rho_k,alpha_k,feas,cone_dist,tracking_err,potential_Y,allowance,"
    "objective,wall_nanos";

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::LinAlm: return "lin_alm";
    case SolverKind::StochQP: return "stoch_qp";
    case SolverKind::StochAlm: return "stoch_alm";
    case SolverKind::DetQP: return "det_qp";
  }
  return "?";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "lin_alm") return SolverKind::LinAlm;
  if (name == "stoch_qp") return SolverKind::StochQP;
  if (name == "stoch_alm") return SolverKind::StochAlm;
  if (name == "det_qp") return SolverKind::DetQP;
  throw std::invalid_argument("unknown solver kind: " + name);
}

ScheduleSet build_schedules(const ProblemSpec& p, const RunConfig& cfg) {
  ScheduleSet s;
  const auto& k = p.constants;
  switch (cfg.kind) {
    case SolverKind::LinAlm: {
      check(p.constraints.kind == ConstraintKind::Linear,
            "lin_alm: needs linear constraints");
      double a_norm = 0;
      {
        // ||A|| from the Gram spectrum; delta is stored on the system.
        Eigen::JacobiSVD<Mat> svd(p.constraints.A);
        a_norm = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
      }
      s.case1 = Case1Schedule::from_constants(k.L_f, p.constraints.delta, a_norm,
                                              cfg.case1);
      break;
    }
    case SolverKind::StochQP: {
      check(p.constraints.kind != ConstraintKind::Linear,
            "stoch_qp: needs nonlinear constraints");
      double lt = cfg.l_tilde_override.value_or(
          l_tilde(k, p.constraints.m, LTildeRegime::Case3));
      s.case3 = Case3Schedule::make(cfg.rho_base, lt);
      s.case3->alpha_override = cfg.alpha_override;
      break;
    }
    case SolverKind::DetQP: {
      check(p.constraints.kind == ConstraintKind::DetNonlinear,
            "det_qp: needs deterministic nonlinear constraints");
      double lt = cfg.l_tilde_override.value_or(
          l_tilde(k, p.constraints.m, LTildeRegime::Case2Det));
      s.case2det = Case2DetSchedule::make(cfg.rho_base, lt);
      s.case2det->alpha_override = cfg.alpha_override;
      break;
    }
    case SolverKind::StochAlm: {
      check(p.constraints.kind == ConstraintKind::StochNonlinear,
            "stoch_alm: needs stochastic constraints");
      double l1 = 0;
      if (cfg.lambda0) l1 = cfg.lambda0->norm();
      double lt = cfg.l_tilde_override.value_or(
          l_tilde(k, p.constraints.m, LTildeRegime::Dual, l1));
      s.case3 = Case3Schedule::make(cfg.rho_base, lt);
      s.case3->alpha_override = cfg.alpha_override;
      s.dual = DualSchedule::make(cfg.gamma);
      break;
    }
  }
  return s;
}

namespace {

// Penalty-gradient oracle evaluation for the Alg. 2 family: two-sample form
// for stochastic constraints, exact constraint part otherwise.
Vec qp_oracle(const ProblemSpec& p, const Vec& x, const Vec& lambda, double rho,
              const SampleBundle& b) {
  if (p.constraints.kind == ConstraintKind::StochNonlinear)
    return penalty_grad_sample(p, x, lambda, rho, b);
  return penalty_grad_sample_det(p, x, lambda, rho, b.xi0);
}

}  // namespace

SolverState init_state(const ProblemSpec& p, const RunConfig& cfg,
                       const ScheduleSet& scheds) {
  SolverState st;
  st.rng = Rng::derive(cfg.seed, 1);
  Vec x_start = cfg.x0.value_or(p.x0.size() > 0 ? p.x0 : Vec(Vec::Zero(p.dim)));
  st.x = project(p.set, x_start);

  if (cfg.kind == SolverKind::LinAlm) {
    check(p.set.kind == SetKind::FullSpace, "lin_alm: X must be the full space");
    st.lambda = Vec::Zero(p.constraints.m);
    int xi0 = st.rng.sample_cdf(p.objective.cdf);
    st.est.g = sample_grad_f(p, st.x, xi0);
    st.last_eta = scheds.case1->eta(0);
    st.last_alpha = scheds.case1->alpha(0);
    st.last_rho = scheds.case1->rho;
    st.rho_next = scheds.case1->rho;
  } else {
    bool dual = cfg.kind == SolverKind::StochAlm;
    if (dual)
      st.lambda = cfg.lambda0.value_or(Vec(Vec::Zero(p.constraints.m)));
    double rho1, eta1, alpha1;
    if (scheds.case3) {
      rho1 = scheds.case3->rho(1);
      eta1 = scheds.case3->eta(1);
      alpha1 = scheds.case3->alpha(1);
    } else {
      rho1 = scheds.case2det->rho(1);
      eta1 = scheds.case2det->eta(1);
      alpha1 = scheds.case2det->alpha(1);
    }
    SampleBundle b1 = draw_bundle(p, st.rng);
    st.est.g = qp_oracle(p, st.x, st.lambda, rho1, b1);
    st.last_eta = eta1;
    st.last_alpha = alpha1;
    st.last_rho = rho1;
    st.rho_next = rho1;
  }
  st.est.last_x = st.x;
  st.est.last_rho = st.rho_next;
  st.est.last_lambda = st.lambda;
  st.prev_x = st.x;
  st.prev_g = st.est.g;
  st.lambda_init = st.lambda;
  st.k = 0;
  return st;
}

void step_linear_alm(SolverState& st, const ProblemSpec& p,
                     const Case1Schedule& sched) {
  check(p.constraints.kind == ConstraintKind::Linear,
        "step_linear_alm: needs linear constraints");
  const Mat& A = p.constraints.A;
  const Vec& b = p.constraints.b;
  const long k = st.k;  // this driver counts iterations from 0
  const Case1At at = sched.at(k + 1);

  Vec r = A * st.x - b;
  Vec x1 = st.x - at.eta * (st.est.g + A.transpose() * st.lambda +
                            at.rho * (A.transpose() * r));
  Vec lambda1 = st.lambda + at.rho * (A * x1 - b);
  int xi = st.rng.sample_cdf(p.objective.cdf);
  Vec g1 = storm_update(st.est.g, sample_grad_f(p, x1, xi),
                        sample_grad_f(p, st.x, xi), at.alpha);

  st.prev_x = st.x;
  st.prev_g = st.est.g;
  st.x = x1;
  st.lambda = lambda1;
  st.est.g = g1;
  st.est.last_x = x1;
  st.est.last_lambda = lambda1;
  st.k = k + 1;
  st.last_eta = at.eta;
  st.last_alpha = at.alpha;
  st.last_rho = at.rho;
  st.rho_next = at.rho;
}

namespace {

template <typename Sched>
void step_qp_impl(SolverState& st, const ProblemSpec& p, const Sched& sched,
                  const DualSchedule* dual) {
  const long kk = st.k + 1;  // this driver counts iterations from 1
  const QpAt at = sched.at(kk);
  const double eta_k = at.eta;
  const double rho_k = at.rho;
  const double rho_k1 = sched.rho(kk + 1);
  const double alpha_k1 = at.alpha_next;

  Vec x1 = project(p.set, st.x - eta_k * st.est.g);
  SampleBundle bundle = draw_bundle(p, st.rng);

  Vec lambda_old = st.lambda;
  Vec lambda1 = st.lambda;
  if (dual != nullptr) {
    check(p.constraints.kind == ConstraintKind::StochNonlinear,
          "dual update: needs stochastic constraints");
    Vec c2 = p.constraints.c_sample(x1, bundle.zeta2);
    for (int i = 0; i < c2.size(); ++i)
      lambda1[i] += dual_gamma(*dual, kk, c2[i]) * c2[i];
  }

  Vec g_new = qp_oracle(p, x1, lambda1, rho_k1, bundle);
  Vec g_old = qp_oracle(p, st.x, lambda_old, rho_k, bundle);
  Vec g1 = storm_update(st.est.g, g_new, g_old, alpha_k1);

  st.prev_x = st.x;
  st.prev_g = st.est.g;
  st.x = x1;
  st.lambda = lambda1;
  st.est.g = g1;
  st.est.last_x = x1;
  st.est.last_rho = rho_k1;
  st.est.last_lambda = lambda1;
  st.k = kk;
  st.last_eta = eta_k;
  st.last_alpha = alpha_k1;
  st.last_rho = rho_k;
  st.rho_next = rho_k1;
}

}  // namespace

void step_qp_stochastic(SolverState& st, const ProblemSpec& p,
                        const Case3Schedule& sched, const DualSchedule* dual) {
  step_qp_impl(st, p, sched, dual);
}

void step_qp_stochastic(SolverState& st, const ProblemSpec& p,
                        const Case2DetSchedule& sched, const DualSchedule* dual) {
  step_qp_impl(st, p, sched, dual);
}

long select_output(long K, Rng& rng) {
  check(K >= 1, "select_output: K must be >= 1");
  return 1 + rng.next_below(K);
}

namespace {

MultiplierRule trace_multiplier(const SolverKind kind, const SolverState& st) {
  switch (kind) {
    case SolverKind::LinAlm:
      return MultiplierRule::given(st.lambda);
    case SolverKind::StochQP:
    case SolverKind::DetQP:
      return MultiplierRule::qp(st.last_rho);
    case SolverKind::StochAlm:
      return MultiplierRule::dual_plus_qp(st.lambda, st.last_rho);
  }
  return MultiplierRule::given(Vec());
}

}  // namespace

RunReport run(const ProblemSpec& p, const RunConfig& cfg) {
  check(cfg.K >= 1, "run: K must be >= 1");
  check(cfg.stride >= 1, "run: stride must be >= 1");
  p.validate();

  ScheduleSet scheds = build_schedules(p, cfg);
  SolverState st = init_state(p, cfg, scheds);

  Rng rng_sel = Rng::derive(cfg.seed, 2);
  const long khat = select_output(cfg.K, rng_sel);

  RunReport report;
  report.seed = cfg.seed;
  report.K = cfg.K;
  report.stride = cfg.stride;
  report.selected_index = khat;

  const bool case1_potentials = cfg.potentials && scheds.case1.has_value();
  const bool qp_potentials =
      cfg.potentials && (scheds.case3.has_value() || scheds.case2det.has_value());
  const double V2 = p.constants.V * p.constants.V;
  double sum_v = 0, y1 = 0;
  bool have_y1 = false;
  double min_y = std::numeric_limits<double>::infinity();

  auto wall_start = std::chrono::steady_clock::now();
  auto wall_nanos = [&]() -> double {
    if (!cfg.record_walltime) return 0.0;
    return static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                   std::chrono::steady_clock::now() - wall_start)
                                   .count());
  };

  auto case1_potential_now = [&]() -> PotentialReading {
    // State holds (x_j, lambda_j, g_j) with j = st.k; eq-level index is j-1.
    Case1Pair pair{st.prev_x, st.x, st.lambda, st.prev_g, st.est.g};
    return potential_case1(p, pair, *scheds.case1, st.k - 1);
  };
  auto qp_potential_now = [&]() -> PotentialReading {
    if (scheds.case3)
      return potential_case3(p, st.x, st.est.g, st.lambda, *scheds.case3, st.k);
    return potential_case2det(p, st.x, st.est.g, st.lambda, *scheds.case2det, st.k);
  };

  auto record_row = [&](bool abort_row) {
    TraceRow row;
    row.k = st.k;
    row.eta_k = st.last_eta;
    row.rho_k = st.last_rho;
    row.alpha_k = st.last_alpha;
    double step_sq = 0;
    if (abort_row) {
      row.feas = row.cone_dist = row.tracking_err =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      StationarityReading sr = stationarity(p, st.x, trace_multiplier(cfg.kind, st));
      row.feas = sr.feas;
      row.cone_dist = sr.cone_dist;
      if (cfg.kind == SolverKind::LinAlm)
        row.tracking_err = tracking_error(p, st.x, st.est.g, 0.0, Vec());
      else
        row.tracking_err = tracking_error(p, st.x, st.est.g, st.rho_next, st.lambda);
      if (p.objective.has_values()) row.objective = exact_value_f(p, st.x);
      if (st.k >= 1) {
        Vec dx = (st.x - st.prev_x) / st.last_eta;
        step_sq = dx.squaredNorm();
      }
      if (st.k >= 1 && case1_potentials) {
        PotentialReading pr = case1_potential_now();
        row.potential_Y = pr.Y;
        row.allowance = scheds.case1->allowance_v(st.k) * V2;
      } else if (st.k >= 1 && qp_potentials) {
        PotentialReading pr = qp_potential_now();
        row.potential_Y = pr.Y;
        row.allowance = pr.allowance;
      }
    }
    row.wall_nanos = wall_nanos();
    report.rows.push_back(row);
    report.step_sq.push_back(step_sq);
  };

  record_row(false);  // k = 0

  long pending_pair_k = -1;  // stride point waiting for its Y_{k+1} partner
  double pending_y = 0;

  for (long it = 0; it < cfg.K; ++it) {
    if (cfg.kind == SolverKind::LinAlm) {
      step_linear_alm(st, p, *scheds.case1);
    } else if (scheds.case3) {
      step_qp_stochastic(st, p, *scheds.case3,
                         scheds.dual ? &*scheds.dual : nullptr);
    } else {
      step_qp_stochastic(st, p, *scheds.case2det, nullptr);
    }

    if (!st.x.allFinite() || !st.est.g.allFinite()) {
      report.aborted = true;
      report.abort_reason = "non-finite iterate at k=" + std::to_string(st.k);
      record_row(true);
      break;
    }
    if (!p.set.contains(st.x, 1e-9)) {
      report.aborted = true;
      report.abort_reason = "iterate left X at k=" + std::to_string(st.k);
      record_row(true);
      break;
    }

    if (scheds.dual) {
      for (int i = 0; i < st.lambda.size(); ++i) {
        if (std::abs(st.lambda[i]) >
            std::abs(st.lambda_init[i]) + 4.0 * scheds.dual->gamma) {
          report.dual_bound_ok = false;
          report.aborted = true;
          report.abort_reason = "dual bound violated at k=" + std::to_string(st.k);
          break;
        }
      }
      if (report.aborted) {
        record_row(true);
        break;
      }
    }

    if (st.k == khat) {
      StationarityReading sr = stationarity(p, st.x, trace_multiplier(cfg.kind, st));
      report.selected_cone_dist = sr.cone_dist;
      report.selected_feas = sr.feas;
    }

    if (case1_potentials) {
      sum_v += scheds.case1->allowance_v(st.k) * V2;
      double y = 0;
      bool need_y = (st.k % cfg.stride == 0) || (pending_pair_k >= 0) || (st.k == 1);
      if (need_y) {
        y = case1_potential_now().Y;
        min_y = std::min(min_y, y);
        if (st.k == 1 && !have_y1) {
          y1 = y;
          have_y1 = true;
        }
        if (pending_pair_k >= 0) {
          report.potential_pairs.push_back(
              {pending_pair_k, pending_y,
               y, scheds.case1->allowance_v(pending_pair_k) * V2});
          pending_pair_k = -1;
        }
        if (st.k % cfg.stride == 0 && st.k < cfg.K) {
          pending_pair_k = st.k;
          pending_y = y;
        }
      }
    }

    if (st.k % cfg.stride == 0 || st.k == cfg.K) record_row(false);
  }

  if (case1_potentials && have_y1) {
    report.min_potential = min_y;
    report.potential_floor = -2.0 * sum_v - std::abs(y1);
    report.potential_floor_ok = min_y >= report.potential_floor - 1e-9;
  }
  return report;
}

}  // namespace pstorm
