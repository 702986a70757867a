// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/problems.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <memory>
#include <nlohmann/json.hpp>

#include "pstorm/rng.hpp"

namespace pstorm {

using nlohmann::json;

double delta_of(const Mat& A) {
  check(A.size() > 0, "delta_of: empty matrix");
  check(A.cwiseAbs().maxCoeff() > 0, "delta_of: zero matrix");
  // The nonzero spectra of A^T A and A A^T coincide; diagonalize the smaller.
  Mat G = (A.rows() <= A.cols()) ? Mat(A * A.transpose()) : Mat(A.transpose() * A);
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  check(es.info() == Eigen::Success, "delta_of: eigendecomposition failed");
  const Vec& ev = es.eigenvalues();
  double lmax = ev.maxCoeff();
  double tol = 1e-10 * lmax;
  double smallest = -1;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > tol && (smallest < 0 || ev[i] < smallest)) smallest = ev[i];
  check(smallest > 0, "delta_of: all eigenvalues below tolerance");
  return smallest;
}

double spectral_norm(const Mat& A) {
  Mat G = (A.rows() <= A.cols()) ? Mat(A * A.transpose()) : Mat(A.transpose() * A);
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  check(es.info() == Eigen::Success, "spectral_norm: eigendecomposition failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace {

// phi(t) = t^2 / (1 + t^2): bounded, smooth, keeps f >= 0 and makes the
// objective genuinely nonconvex. |phi''| <= 2.
inline double phi(double t) { return t * t / (1.0 + t * t); }
inline double phi_prime(double t) {
  double q = 1.0 + t * t;
  return 2.0 * t / (q * q);
}

// Shared data tables behind the built-in problem closures.
struct BuiltinData {
  std::string family;
  int d = 0;
  // finite-sum objective
  std::vector<Vec> centers;
  std::vector<double> weights;
  double s = 0;
  // linear constraints
  Mat A;
  Vec b;
  // stochastic sphere noise tables
  std::vector<double> value_noise, jac_noise, z_weights;
  // feasible set record
  double box_half = 0;  // 0 => full space
};

using DataPtr = std::shared_ptr<const BuiltinData>;

void attach_objective(ProblemSpec& p, const DataPtr& data) {
  const BuiltinData& D = *data;
  p.objective.weights = D.weights;
  p.objective.grad_sample = [data](const Vec& x, int i) -> Vec {
    const BuiltinData& d = *data;
    Vec g = x - d.centers[i];
    if (d.s != 0)
      for (int j = 0; j < x.size(); ++j) g[j] += d.s * phi_prime(x[j]);
    return g;
  };
  p.objective.value_sample = [data](const Vec& x, int i) -> double {
    const BuiltinData& d = *data;
    double v = 0.5 * (x - d.centers[i]).squaredNorm();
    if (d.s != 0)
      for (int j = 0; j < x.size(); ++j) v += d.s * phi(x[j]);
    return v;
  };
  p.objective.finalize();

  Vec abar = Vec::Zero(D.d);
  for (size_t i = 0; i < D.centers.size(); ++i) abar += D.weights[i] * D.centers[i];
  p.exact_grad_ref = [data, abar](const Vec& x) -> Vec {
    Vec g = x - abar;
    if (data->s != 0)
      for (int j = 0; j < x.size(); ++j) g[j] += data->s * phi_prime(x[j]);
    return g;
  };
  p.exact_value_ref = [data](const Vec& x) -> double {
    const BuiltinData& d = *data;
    double v = 0;
    for (size_t i = 0; i < d.centers.size(); ++i)
      v += d.weights[i] * 0.5 * (x - d.centers[i]).squaredNorm();
    if (d.s != 0)
      for (int j = 0; j < x.size(); ++j) v += d.s * phi(x[j]);
    return v;
  };
}

void attach_sphere_constraints(ProblemSpec& p, const DataPtr& data, bool stochastic) {
  ConstraintSystem& cs = p.constraints;
  cs.m = 1;
  auto c_exact = [](const Vec& x) -> Vec {
    Vec v(1);
    v[0] = x.squaredNorm() - 1.0;
    return v;
  };
  auto jac_exact = [](const Vec& x) -> Mat {
    Mat J(1, x.size());
    J.row(0) = 2.0 * x.transpose();
    return J;
  };
  if (!stochastic) {
    cs.kind = ConstraintKind::DetNonlinear;
    cs.c = c_exact;
    cs.jac = jac_exact;
  } else {
    cs.kind = ConstraintKind::StochNonlinear;
    cs.weights = data->z_weights;
    cs.c_sample = [data](const Vec& x, int z) -> Vec {
      Vec v(1);
      v[0] = x.squaredNorm() - 1.0 + data->value_noise[z];
      return v;
    };
    cs.jac_sample = [data](const Vec& x, int z) -> Mat {
      Mat J(1, x.size());
      J.row(0) = (2.0 * (1.0 + data->jac_noise[z])) * x.transpose();
      return J;
    };
    cs.c_ref = c_exact;
    cs.jac_ref = jac_exact;
  }
  cs.finalize();
}

EstimationRegion box_region(int d, double half) {
  EstimationRegion r;
  r.lo = Vec::Constant(d, -half);
  r.hi = Vec::Constant(d, half);
  return r;
}

}  // namespace

Vec sample_region_point(const EstimationRegion& region, Rng& rng) {
  int d = static_cast<int>(region.lo.size());
  if (region.annulus) {
    Vec dir(d);
    for (int j = 0; j < d; ++j) dir[j] = rng.next_gaussian();
    double n = dir.norm();
    if (n == 0) { dir[0] = 1; n = 1; }
    double r = region.r_min + rng.next_double() * (region.r_max - region.r_min);
    return dir * (r / n);
  }
  Vec x(d);
  for (int j = 0; j < d; ++j)
    x[j] = region.lo[j] + rng.next_double() * (region.hi[j] - region.lo[j]);
  return x;
}

ProblemSpec make_sharing(int d, int m, int n, uint64_t seed,
                         const SharingOptions& opts) {
  check(d >= 1 && m >= 1 && m <= d, "make_sharing: need 1 <= m <= d");
  check(n >= 1, "make_sharing: need n >= 1");
  Rng gen = Rng::derive(seed, 10);

  auto data = std::make_shared<BuiltinData>();
  data->family = "sharing";
  data->d = d;
  data->s = opts.s;
  data->weights.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    Vec a(d);
    for (int j = 0; j < d; ++j) a[j] = opts.a_scale * gen.next_gaussian();
    data->centers.push_back(a);
  }

  // Random full-row-rank A; redraw on (near) rank deficiency.
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  bool ok = false;
  for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
    Mat A(m, d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = scale * gen.next_gaussian();
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(A * A.transpose()));
    if (es.eigenvalues().minCoeff() > 1e-10 * es.eigenvalues().maxCoeff()) {
      data->A = A;
      ok = true;
    }
  }
  check(ok, "make_sharing: rank-deficient A after 10 redraws");

  Vec x_feas(d);
  for (int j = 0; j < d; ++j) x_feas[j] = gen.next_gaussian();
  data->b = data->A * x_feas;

  ProblemSpec p;
  p.dim = d;
  p.name = "sharing";
  p.family_data = data;
  attach_objective(p, data);
  p.constraints.kind = ConstraintKind::Linear;
  p.constraints.A = data->A;
  p.constraints.b = data->b;
  p.constraints.delta = delta_of(data->A);
  p.constraints.finalize();
  p.set = FeasibleSet::full_space();
  p.x0 = Vec::Zero(d);
  p.region = box_region(d, opts.box_half);
  p.constants = estimate_constants(p, p.region, opts.est_samples,
                                   seed ^ 0x5eedc0de, opts.safety);
  p.validate();
  return p;
}

namespace {

ProblemSpec make_sphere_common(int d, uint64_t seed, const SphereOptions& opts,
                               const std::vector<double>* value_noise,
                               const std::vector<double>* jac_noise) {
  check(d >= 1, "make_sphere: need d >= 1");
  Rng gen = Rng::derive(seed, 20);

  auto data = std::make_shared<BuiltinData>();
  data->d = d;
  data->s = opts.s;
  data->box_half = opts.box_half;
  data->weights.assign(opts.n, 1.0 / opts.n);
  for (int i = 0; i < opts.n; ++i) {
    Vec a(d);
    for (int j = 0; j < d; ++j) a[j] = opts.a_scale * gen.next_gaussian();
    data->centers.push_back(a);
  }

  bool stochastic = value_noise != nullptr;
  data->family = stochastic ? "stoch_sphere" : "sphere";
  if (stochastic) {
    check(value_noise->size() == jac_noise->size() && value_noise->size() >= 2,
          "make_stoch_sphere: noise tables need matching size >= 2");
    double mv = 0, mj = 0;
    for (double e : *value_noise) mv += e;
    for (double e : *jac_noise) mj += e;
    check(std::abs(mv) <= 1e-12 && std::abs(mj) <= 1e-12,
          "make_stoch_sphere: noise tables must be zero-mean");
    data->value_noise = *value_noise;
    data->jac_noise = *jac_noise;
    data->z_weights.assign(value_noise->size(), 1.0 / value_noise->size());
  }

  ProblemSpec p;
  p.dim = d;
  p.name = data->family;
  p.family_data = data;
  attach_objective(p, data);
  attach_sphere_constraints(p, data, stochastic);
  if (opts.full_space) {
    data->box_half = 0;
    p.set = FeasibleSet::full_space();
  } else {
    p.set = FeasibleSet::box(Vec::Constant(d, -opts.box_half),
                             Vec::Constant(d, opts.box_half));
  }

  Vec dir(d);
  for (int j = 0; j < d; ++j) dir[j] = gen.next_gaussian();
  double nn = dir.norm();
  if (nn == 0) { dir[0] = 1; nn = 1; }
  p.x0 = dir * (opts.init_radius / nn);

  p.region = box_region(d, opts.box_half);
  p.region.annulus = true;
  p.region.r_min = opts.annulus_min;
  p.region.r_max = opts.annulus_max;

  p.constants = estimate_constants(p, p.region, opts.est_samples,
                                   seed ^ 0x5eedc0de, opts.safety);
  p.constants.delta_reg = 2.0 * opts.annulus_min;  // ||grad c^T c|| = 2||x|| |c|
  p.validate();
  return p;
}

}  // namespace

ProblemSpec make_sphere(int d, uint64_t seed, const SphereOptions& opts) {
  return make_sphere_common(d, seed, opts, nullptr, nullptr);
}

ProblemSpec make_stoch_sphere(int d, uint64_t seed, const StochSphereOptions& opts) {
  return make_sphere_common(d, seed, opts, &opts.value_noise, &opts.jac_noise);
}

AssumptionConstants estimate_constants(const ProblemSpec& p,
                                       const EstimationRegion& region,
                                       int num_samples, uint64_t seed,
                                       double safety) {
  check(num_samples >= 2, "estimate_constants: need at least 2 samples");
  check(region.lo.size() == p.dim, "estimate_constants: region dimension mismatch");
  check((region.hi - region.lo).minCoeff() > 0, "estimate_constants: empty box");
  Rng rng = Rng::derive(seed, 30);
  const int n_obj = p.objective.num_outcomes();
  const bool stoch_c = p.constraints.kind == ConstraintKind::StochNonlinear;
  const int m = p.constraints.m;

  AssumptionConstants k;
  double min_f = std::numeric_limits<double>::infinity();

  std::vector<Vec> points;
  for (int i = 0; i < num_samples; ++i)
    points.push_back(sample_region_point(region, rng));

  // Point-wise quantities: variances, sup bounds.
  for (const Vec& x : points) {
    Vec gbar = exact_grad_f(p, x);
    double var_f = 0;
    for (int i = 0; i < n_obj; ++i)
      var_f += p.objective.weights[i] *
               (p.objective.grad_sample(x, i) - gbar).squaredNorm();
    k.V = std::max(k.V, std::sqrt(var_f));
    k.C_grad_f = std::max(k.C_grad_f, gbar.norm());
    if (p.objective.has_values()) {
      double f = exact_value_f(p, x);
      k.B_f = std::max(k.B_f, std::abs(f));
      min_f = std::min(min_f, f);
    }

    if (m > 0) {
      ConstraintEval ce = constraints_eval(p, x, EvalMode::Exact);
      for (int i = 0; i < m; ++i) {
        k.C_c = std::max(k.C_c, std::abs(ce.value[i]));
        k.C_grad_c = std::max(k.C_grad_c, ce.jacobian.row(i).norm());
      }
      if (stoch_c) {
        const auto& cs = p.constraints;
        Vec var_c = Vec::Zero(m);
        Vec var_jc = Vec::Zero(m);
        for (int z = 0; z < cs.num_outcomes(); ++z) {
          Vec cz = cs.c_sample(x, z);
          Mat Jz = cs.jac_sample(x, z);
          for (int i = 0; i < m; ++i) {
            k.Ct_c = std::max(k.Ct_c, std::abs(cz[i]));
            k.Ct_grad_c = std::max(k.Ct_grad_c, Jz.row(i).norm());
            var_c[i] += cs.weights[z] * (cz[i] - ce.value[i]) * (cz[i] - ce.value[i]);
            var_jc[i] += cs.weights[z] * (Jz.row(i) - ce.jacobian.row(i)).squaredNorm();
          }
        }
        k.sigma_c = std::max(k.sigma_c, std::sqrt(var_c.maxCoeff()));
        k.sigma_grad_c = std::max(k.sigma_grad_c, std::sqrt(var_jc.maxCoeff()));
      }
    }
  }

  // Pair-wise difference quotients: half independent pairs, half local
  // perturbations (the Lipschitz sup is often attained in the small-offset
  // limit, e.g. at the origin for the phi term).
  double qf2 = 0, qc2 = 0, qjc2 = 0;
  for (int t = 0; t < num_samples; ++t) {
    Vec u = points[t % points.size()];
    Vec v;
    if (t % 2 == 0) {
      v = sample_region_point(region, rng);
    } else {
      Vec step(p.dim);
      for (int j = 0; j < p.dim; ++j) step[j] = rng.next_gaussian();
      v = u + 1e-3 * step;
    }
    double dist2 = (u - v).squaredNorm();
    if (dist2 <= 0) continue;

    double msd_f = 0;
    for (int i = 0; i < n_obj; ++i)
      msd_f += p.objective.weights[i] *
               (p.objective.grad_sample(u, i) - p.objective.grad_sample(v, i)).squaredNorm();
    qf2 = std::max(qf2, msd_f / dist2);

    if (m > 0) {
      if (stoch_c) {
        const auto& cs = p.constraints;
        Vec msd_c = Vec::Zero(m), msd_j = Vec::Zero(m);
        for (int z = 0; z < cs.num_outcomes(); ++z) {
          Vec du = cs.c_sample(u, z) - cs.c_sample(v, z);
          Mat dJ = cs.jac_sample(u, z) - cs.jac_sample(v, z);
          for (int i = 0; i < m; ++i) {
            msd_c[i] += cs.weights[z] * du[i] * du[i];
            msd_j[i] += cs.weights[z] * dJ.row(i).squaredNorm();
          }
        }
        qc2 = std::max(qc2, msd_c.maxCoeff() / dist2);
        qjc2 = std::max(qjc2, msd_j.maxCoeff() / dist2);
      } else {
        ConstraintEval eu = constraints_eval(p, u, EvalMode::Exact);
        ConstraintEval ev = constraints_eval(p, v, EvalMode::Exact);
        Vec du = eu.value - ev.value;
        Mat dJ = eu.jacobian - ev.jacobian;
        for (int i = 0; i < m; ++i) {
          qc2 = std::max(qc2, du[i] * du[i] / dist2);
          qjc2 = std::max(qjc2, dJ.row(i).squaredNorm() / dist2);
        }
      }
    }
  }

  k.L_f = std::sqrt(qf2) * safety;
  k.Lt_grad_f = k.L_f;
  k.Lt_c = std::sqrt(qc2) * safety;
  k.Lt_grad_c = std::sqrt(qjc2) * safety;
  k.V *= safety;
  k.sigma_f = k.V;
  k.sigma_c *= safety;
  k.sigma_grad_c *= safety;
  k.C_c *= safety;
  k.C_grad_c *= safety;
  k.C_grad_f *= safety;
  k.B_f *= safety;
  if (!stoch_c && m > 0) {
    // deterministic constraints: the sampled bounds coincide with the exact ones
    k.Ct_c = k.C_c;
    k.Ct_grad_c = k.C_grad_c;
  } else {
    k.Ct_c *= safety;
    k.Ct_grad_c *= safety;
  }
  k.Q_lower = std::isfinite(min_f) ? std::min(0.0, min_f) * safety : 0.0;
  k.validate();
  return k;
}

void verify_problem(const ProblemSpec& p, uint64_t seed, int points) {
  p.validate();
  Rng rng = Rng::derive(seed, 40);
  for (int t = 0; t < points; ++t) {
    Vec x = sample_region_point(p.region, rng);
    if (p.exact_grad_ref) {
      double err = (exact_grad_f(p, x) - p.exact_grad_ref(x)).norm();
      check(err <= 1e-10 * (1.0 + p.exact_grad_ref(x).norm()),
            "verify_problem: gradient oracle is biased");
    }
    if (p.constraints.kind == ConstraintKind::StochNonlinear && p.constraints.c_ref) {
      ConstraintEval ce = constraints_eval(p, x, EvalMode::Exact);
      double errc = (ce.value - p.constraints.c_ref(x)).norm();
      double errj = (ce.jacobian - p.constraints.jac_ref(x)).norm();
      check(errc <= 1e-10 && errj <= 1e-10,
            "verify_problem: constraint oracle is biased");
    }
  }
  if (p.constraints.kind == ConstraintKind::Linear) {
    double d0 = delta_of(p.constraints.A);
    check(std::abs(d0 - p.constraints.delta) <= 1e-8 * std::max(1.0, d0),
          "verify_problem: delta does not match the smallest nonzero eigenvalue");
  }
}

// ---------------------------------------------------------------------------
// JSON serialization of the built-in families (full data tables).
// ---------------------------------------------------------------------------

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i)));
  return rows;
}

Mat mat_from_json(const json& rows) {
  check(!rows.empty(), "problem json: empty matrix");
  Mat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    m.row(static_cast<int>(i)) = vec_from_json(rows[i]).transpose();
  return m;
}

json constants_to_json(const AssumptionConstants& k) {
  return json{{"L_f", k.L_f}, {"V", k.V}, {"Lt_grad_f", k.Lt_grad_f},
              {"Lt_grad_c", k.Lt_grad_c}, {"Lt_c", k.Lt_c}, {"sigma_f", k.sigma_f},
              {"sigma_grad_c", k.sigma_grad_c}, {"sigma_c", k.sigma_c},
              {"C_grad_c", k.C_grad_c}, {"C_c", k.C_c}, {"Ct_grad_c", k.Ct_grad_c},
              {"Ct_c", k.Ct_c}, {"B_f", k.B_f}, {"C_grad_f", k.C_grad_f},
              {"Q_lower", k.Q_lower}, {"delta_reg", k.delta_reg}};
}

AssumptionConstants constants_from_json(const json& j) {
  AssumptionConstants k;
  k.L_f = j.at("L_f"); k.V = j.at("V"); k.Lt_grad_f = j.at("Lt_grad_f");
  k.Lt_grad_c = j.at("Lt_grad_c"); k.Lt_c = j.at("Lt_c"); k.sigma_f = j.at("sigma_f");
  k.sigma_grad_c = j.at("sigma_grad_c"); k.sigma_c = j.at("sigma_c");
  k.C_grad_c = j.at("C_grad_c"); k.C_c = j.at("C_c"); k.Ct_grad_c = j.at("Ct_grad_c");
  k.Ct_c = j.at("Ct_c"); k.B_f = j.at("B_f"); k.C_grad_f = j.at("C_grad_f");
  k.Q_lower = j.at("Q_lower"); k.delta_reg = j.at("delta_reg");
  return k;
}

}  // namespace

json problem_to_json(const ProblemSpec& p) {
  check(static_cast<bool>(p.family_data), "problem_to_json: not a built-in problem");
  const auto* D = static_cast<const BuiltinData*>(p.family_data.get());
  json j;
  j["family"] = D->family;
  j["dim"] = p.dim;
  json centers = json::array();
  for (const Vec& a : D->centers) centers.push_back(vec_to_json(a));
  j["objective"] = {{"centers", centers}, {"weights", D->weights}, {"s", D->s}};
  if (D->family == "sharing") {
    j["constraints"] = {{"A", mat_to_json(D->A)}, {"b", vec_to_json(D->b)},
                        {"delta", p.constraints.delta}};
  } else if (D->family == "stoch_sphere") {
    j["constraints"] = {{"value_noise", D->value_noise},
                        {"jac_noise", D->jac_noise},
                        {"weights", D->z_weights}};
  }
  j["box_half"] = D->box_half;
  j["x0"] = vec_to_json(p.x0);
  json region = {{"lo", vec_to_json(p.region.lo)}, {"hi", vec_to_json(p.region.hi)}};
  if (p.region.annulus) {
    region["annulus"] = {{"r_min", p.region.r_min}, {"r_max", p.region.r_max}};
  }
  j["region"] = region;
  j["constants"] = constants_to_json(p.constants);
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  auto data = std::make_shared<BuiltinData>();
  data->family = j.at("family").get<std::string>();
  data->d = j.at("dim").get<int>();
  const json& obj = j.at("objective");
  for (const auto& a : obj.at("centers")) data->centers.push_back(vec_from_json(a));
  data->weights = obj.at("weights").get<std::vector<double>>();
  data->s = obj.at("s").get<double>();
  data->box_half = j.value("box_half", 0.0);

  ProblemSpec p;
  p.dim = data->d;
  p.name = data->family;
  attach_objective(p, data);

  if (data->family == "sharing") {
    data->A = mat_from_json(j.at("constraints").at("A"));
    data->b = vec_from_json(j.at("constraints").at("b"));
    p.constraints.kind = ConstraintKind::Linear;
    p.constraints.A = data->A;
    p.constraints.b = data->b;
    p.constraints.delta = j.at("constraints").at("delta").get<double>();
    p.constraints.finalize();
    p.set = FeasibleSet::full_space();
  } else if (data->family == "sphere" || data->family == "stoch_sphere") {
    bool stochastic = data->family == "stoch_sphere";
    if (stochastic) {
      const json& cj = j.at("constraints");
      data->value_noise = cj.at("value_noise").get<std::vector<double>>();
      data->jac_noise = cj.at("jac_noise").get<std::vector<double>>();
      data->z_weights = cj.at("weights").get<std::vector<double>>();
    }
    p.family_data = data;  // closures need the tables
    attach_sphere_constraints(p, data, stochastic);
    p.set = data->box_half > 0
                ? FeasibleSet::box(Vec::Constant(p.dim, -data->box_half),
                                   Vec::Constant(p.dim, data->box_half))
                : FeasibleSet::full_space();
  } else {
    check(false, "problem json: unknown family '" + data->family + "'");
  }
  p.family_data = data;

  p.x0 = vec_from_json(j.at("x0"));
  const json& region = j.at("region");
  p.region.lo = vec_from_json(region.at("lo"));
  p.region.hi = vec_from_json(region.at("hi"));
  if (region.contains("annulus")) {
    p.region.annulus = true;
    p.region.r_min = region.at("annulus").at("r_min").get<double>();
    p.region.r_max = region.at("annulus").at("r_max").get<double>();
  }
  p.constants = constants_from_json(j.at("constants"));
  p.validate();
  return p;
}

}  // namespace pstorm
