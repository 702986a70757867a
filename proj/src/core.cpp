// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/core.hpp"

#include <cmath>

namespace pstorm {

namespace {

std::vector<double> build_cdf(const std::vector<double>& w, const char* what) {
  check(!w.empty(), std::string(what) + ": empty sample space");
  double sum = 0;
  std::vector<double> cdf(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    check(w[i] >= 0, std::string(what) + ": negative weight");
    sum += w[i];
    cdf[i] = sum;
  }
  check(std::abs(sum - 1.0) <= 1e-12, std::string(what) + ": weights must sum to 1");
  cdf.back() = 1.0;
  return cdf;
}

}  // namespace

void ObjectiveOracle::finalize() {
  check(static_cast<bool>(grad_sample), "objective: missing grad_sample");
  cdf = build_cdf(weights, "objective");
}

void ConstraintSystem::finalize() {
  switch (kind) {
    case ConstraintKind::Linear:
      check(A.rows() == b.size(), "linear constraints: A/b shape mismatch");
      m = static_cast<int>(A.rows());
      break;
    case ConstraintKind::DetNonlinear:
      check(static_cast<bool>(c) && static_cast<bool>(jac),
            "nonlinear constraints: missing c or jacobian");
      break;
    case ConstraintKind::StochNonlinear:
      check(static_cast<bool>(c_sample) && static_cast<bool>(jac_sample),
            "stochastic constraints: missing samples");
      cdf = build_cdf(weights, "constraints");
      break;
  }
  check(m >= 0, "constraints: bad row count");
}

FeasibleSet FeasibleSet::full_space() { return FeasibleSet{}; }

FeasibleSet FeasibleSet::box(const Vec& lower, const Vec& upper) {
  check(lower.size() == upper.size(), "box: bound size mismatch");
  check((lower.array() <= upper.array()).all(), "box: lower > upper");
  FeasibleSet s;
  s.kind = SetKind::Box;
  s.lower = lower;
  s.upper = upper;
  return s;
}

FeasibleSet FeasibleSet::nonnegative_orthant() {
  FeasibleSet s;
  s.kind = SetKind::NonnegativeOrthant;
  return s;
}

FeasibleSet FeasibleSet::ball(const Vec& center, double radius) {
  check(radius > 0, "ball: radius must be positive");
  FeasibleSet s;
  s.kind = SetKind::Ball;
  s.center = center;
  s.radius = radius;
  return s;
}

bool FeasibleSet::contains(const Vec& x, double tol) const {
  switch (kind) {
    case SetKind::FullSpace:
      return true;
    case SetKind::Box:
      return (x.array() >= lower.array() - tol).all() &&
             (x.array() <= upper.array() + tol).all();
    case SetKind::NonnegativeOrthant:
      return (x.array() >= -tol).all();
    case SetKind::Ball:
      return (x - center).norm() <= radius + tol;
  }
  return false;
}

Vec project(const FeasibleSet& set, const Vec& x) {
  check(x.allFinite(), "project: x must be finite");
  switch (set.kind) {
    case SetKind::FullSpace:
      return x;
    case SetKind::Box:
      check(x.size() == set.lower.size(), "project: dimension mismatch");
      return x.cwiseMax(set.lower).cwiseMin(set.upper);
    case SetKind::NonnegativeOrthant:
      return x.cwiseMax(0.0);
    case SetKind::Ball: {
      check(x.size() == set.center.size(), "project: dimension mismatch");
      Vec r = x - set.center;
      double n = r.norm();
      // relative guard keeps re-projection of a boundary point a fixed point
      if (n <= set.radius * (1.0 + 1e-12)) return x;
      return set.center + r * (set.radius / n);
    }
  }
  throw std::logic_error("project: unknown set kind");
}

namespace {

// Active-set tolerance for Box/Orthant facets.
inline bool active_at(double xi, double bound) {
  return std::abs(xi - bound) <= 1e-10 * (1.0 + std::abs(bound));
}

}  // namespace

double normal_cone_distance(const FeasibleSet& set, const Vec& x_in, const Vec& v) {
  check(x_in.size() == v.size(), "normal_cone_distance: dimension mismatch");
  check(set.contains(x_in, 1e-9), "normal_cone_distance: x is not in X");
  Vec x = project(set, x_in);  // snap floating-point drift from projected steps

  switch (set.kind) {
    case SetKind::FullSpace:
      return v.norm();
    case SetKind::Box: {
      double sq = 0;
      for (int i = 0; i < x.size(); ++i) {
        bool at_lo = active_at(x[i], set.lower[i]);
        bool at_hi = active_at(x[i], set.upper[i]);
        if (at_lo && at_hi) continue;              // pinned coordinate: -N is all of R
        if (at_lo) sq += std::min(v[i], 0.0) * std::min(v[i], 0.0);
        else if (at_hi) sq += std::max(v[i], 0.0) * std::max(v[i], 0.0);
        else sq += v[i] * v[i];
      }
      return std::sqrt(sq);
    }
    case SetKind::NonnegativeOrthant: {
      double sq = 0;
      for (int i = 0; i < x.size(); ++i) {
        if (active_at(x[i], 0.0)) sq += std::min(v[i], 0.0) * std::min(v[i], 0.0);
        else sq += v[i] * v[i];
      }
      return std::sqrt(sq);
    }
    case SetKind::Ball: {
      Vec r = x - set.center;
      double n = r.norm();
      if (n < set.radius * (1.0 - 1e-10)) return v.norm();  // interior
      Vec u = r / n;                         // outward unit normal
      double a = v.dot(u);                   // normal coefficient of v
      Vec t = v - a * u;                     // tangential part
      // -N_X(x) is the ray along -u: the unmatched part is the tangential
      // component plus any outward-pointing normal component.
      double out = std::max(a, 0.0);
      return std::sqrt(t.squaredNorm() + out * out);
    }
  }
  throw std::logic_error("normal_cone_distance: unknown set kind");
}

void AssumptionConstants::validate() const {
  const double vals[] = {L_f, V, Lt_grad_f, Lt_grad_c, Lt_c, sigma_f, sigma_grad_c,
                         sigma_c, C_grad_c, C_c, Ct_grad_c, Ct_c, B_f, C_grad_f,
                         delta_reg};
  for (double v : vals) check(v >= 0 && std::isfinite(v), "constants: negative or non-finite");
  check(std::isfinite(Q_lower), "constants: Q_lower non-finite");
}

void ProblemSpec::validate() const {
  check(dim >= 1, "problem: dimension must be >= 1");
  check(!objective.weights.empty() && !objective.cdf.empty(), "problem: oracle not finalized");
  constants.validate();
  if (constraints.kind == ConstraintKind::Linear)
    check(constraints.A.cols() == dim, "problem: A column count != dim");
  switch (set.kind) {
    case SetKind::Box:
      check(set.lower.size() == dim, "problem: box dimension mismatch");
      break;
    case SetKind::Ball:
      check(set.center.size() == dim, "problem: ball dimension mismatch");
      break;
    default:
      break;
  }
  if (x0.size() > 0) check(x0.size() == dim, "problem: x0 dimension mismatch");
}

Vec sample_grad_f(const ProblemSpec& p, const Vec& x, int xi) {
  check(xi >= 0 && xi < p.objective.num_outcomes(), "sample_grad_f: unknown outcome");
  Vec g = p.objective.grad_sample(x, xi);
  check(g.size() == p.dim, "sample_grad_f: oracle returned wrong dimension");
  return g;
}

Vec exact_grad_f(const ProblemSpec& p, const Vec& x) {
  Vec g = Vec::Zero(p.dim);
  for (int i = 0; i < p.objective.num_outcomes(); ++i)
    g += p.objective.weights[i] * p.objective.grad_sample(x, i);
  return g;
}

double exact_value_f(const ProblemSpec& p, const Vec& x) {
  check(p.objective.has_values(), "exact_value_f: no value oracle");
  double f = 0;
  for (int i = 0; i < p.objective.num_outcomes(); ++i)
    f += p.objective.weights[i] * p.objective.value_sample(x, i);
  return f;
}

ConstraintEval constraints_eval(const ProblemSpec& p, const Vec& x,
                                EvalMode mode, int zeta) {
  const ConstraintSystem& cs = p.constraints;
  ConstraintEval out;
  switch (cs.kind) {
    case ConstraintKind::Linear:
      check(mode == EvalMode::Exact, "constraints_eval: linear system has no samples");
      out.value = cs.A * x - cs.b;
      out.jacobian = cs.A;
      return out;
    case ConstraintKind::DetNonlinear:
      check(mode == EvalMode::Exact, "constraints_eval: deterministic system has no samples");
      out.value = cs.c(x);
      out.jacobian = cs.jac(x);
      check(out.value.size() == cs.m && out.jacobian.rows() == cs.m,
            "constraints_eval: wrong constraint count");
      return out;
    case ConstraintKind::StochNonlinear:
      if (mode == EvalMode::Sampled) {
        check(zeta >= 0 && zeta < cs.num_outcomes(), "constraints_eval: unknown outcome");
        out.value = cs.c_sample(x, zeta);
        out.jacobian = cs.jac_sample(x, zeta);
      } else {
        out.value = Vec::Zero(cs.m);
        out.jacobian = Mat::Zero(cs.m, p.dim);
        for (int z = 0; z < cs.num_outcomes(); ++z) {
          out.value += cs.weights[z] * cs.c_sample(x, z);
          out.jacobian += cs.weights[z] * cs.jac_sample(x, z);
        }
      }
      check(out.value.size() == cs.m, "constraints_eval: wrong constraint count");
      return out;
  }
  throw std::logic_error("constraints_eval: unknown constraint kind");
}

}  // namespace pstorm
