// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "pstorm/harness.hpp"
#include "pstorm/problems.hpp"

namespace fs = std::filesystem;
using namespace pstorm;

namespace {

// Minimal '*' glob against file names in the pattern's directory.
std::vector<std::string> expand_glob(const std::string& pattern) {
  if (pattern.find('*') == std::string::npos) return {pattern};
  fs::path p(pattern);
  fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
  std::string pat = p.filename().string();
  size_t star = pat.find('*');
  std::string prefix = pat.substr(0, star);
  std::string suffix = pat.substr(star + 1);
  std::vector<std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (name.size() >= prefix.size() + suffix.size() &&
        name.compare(0, prefix.size(), prefix) == 0 &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  ExperimentResult res = run_experiment(cfg);
  for (size_t i = 0; i < res.csv_paths.size(); ++i) {
    const RunReport& r = res.reports[i];
    std::printf("seed %llu: %s (selected k=%ld, cone=%.6g, feas=%.6g)\n",
                static_cast<unsigned long long>(r.seed),
                r.aborted ? "ABORTED" : "ok", r.selected_index,
                r.selected_cone_dist, r.selected_feas);
  }
  std::printf("summary: %s\n", res.summary_path.c_str());
  return res.any_aborted ? 1 : 0;
}

int cmd_fit(const std::vector<std::string>& patterns, const std::string& column,
            double kmin, double kmax) {
  std::vector<std::string> files;
  for (const std::string& pat : patterns)
    for (const std::string& f : expand_glob(pat)) files.push_back(f);
  if (files.empty()) {
    std::fprintf(stderr, "fit: no input files\n");
    return 2;
  }
  FitResult fr = fit_rate(files, column, kmin, kmax);
  std::printf("files=%zu column=%s k=[%g,%g]\n", files.size(), column.c_str(),
              kmin, kmax);
  std::printf("slope=%.6f intercept=%.6f r2=%.6f rows=%ld\n", fr.slope,
              fr.intercept, fr.r2, fr.rows_used);
  return 0;
}

int cmd_validate(const std::string& config_path, long kmax) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  check(cfg.solver == SolverKind::LinAlm,
        "validate-schedule applies to the linear-constraint schedule");
  ProblemSpec problem = build_problem(cfg.problem);
  ScheduleSet scheds = build_schedules(problem, cfg.run_template);
  const Case1Schedule& s = *scheds.case1;
  std::printf("case1 constants: c=%.6g m=%.6g rho=%.6g eta=%.6g k0=%.6g"
              " (formula k0=%.6g)\n",
              s.c, s.m_const, s.rho, s.eta_base, s.k0, s.k0_formula);
  ScheduleValidation rep = validate_case1(s, kmax);
  for (int ineq = 1; ineq <= 6; ++ineq) {
    const ScheduleCheck* viol = nullptr;
    for (const auto& v : rep.first_violations)
      if (v.inequality == ineq) viol = &v;
    if (viol)
      std::printf("inequality %d: FAIL at k=%ld (lhs=%.6g > rhs=%.6g)\n", ineq,
                  viol->k, viol->lhs, viol->rhs);
    else
      std::printf("inequality %d: pass\n", ineq);
  }
  std::printf("checked %ld log-spaced points up to k=%ld: %s\n",
              rep.points_checked, kmax, rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 1;
}

void cmd_list() {
  std::printf("built-in problems (problem.name in the config JSON):\n");
  std::printf("  sharing       min f(x) s.t. Ax=b, X=R^d."
              " params: d, m, n, seed, s, a_scale\n");
  std::printf("  sphere        min f(x) s.t. ||x||^2=1, X=box."
              " params: d, n, seed, s, a_scale\n");
  std::printf("  stoch_sphere  sphere with noisy constraint oracles."
              " params: + value_noise, jac_noise (zero-mean tables)\n");
  std::printf("solvers: lin_alm | stoch_qp | stoch_alm | det_qp\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalty-storm experiment runner"};
  app.require_subcommand(1);

  std::string config_path, column = "cone_dist^2+feas^2";
  std::vector<std::string> fit_files;
  double kmin = 1, kmax = 1e18;
  long validate_kmax = 1000000;

  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "experiment JSON")->required();

  auto* fit_cmd = app.add_subcommand("fit", "fit a decay exponent to traces");
  fit_cmd->add_option("files", fit_files, "trace CSVs (or a * glob)")->required();
  fit_cmd->add_option("--column", column, "column expression, e.g. cone_dist^2+feas^2");
  fit_cmd->add_option("--kmin", kmin, "lower k bound");
  fit_cmd->add_option("--kmax", kmax, "upper k bound");

  auto* val_cmd = app.add_subcommand("validate-schedule",
                                     "check the Case-I step-size inequalities");
  val_cmd->add_option("config", config_path, "experiment JSON")->required();
  val_cmd->add_option("--kmax", validate_kmax, "largest k to check");

  app.add_subcommand("list-problems", "describe the built-in problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path);
    if (fit_cmd->parsed()) return cmd_fit(fit_files, column, kmin, kmax);
    if (val_cmd->parsed()) return cmd_validate(config_path, validate_kmax);
    cmd_list();
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
