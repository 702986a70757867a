// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "pstorm/solvers.hpp"

namespace pstorm {

// ---------------------------------------------------------------------------
// Experiment configuration: a single JSON document per experiment.
// Keys: problem, solver, schedule, K, seeds, stride, outdir
// (plus potentials / record_walltime flags).
// ---------------------------------------------------------------------------
struct ExperimentConfig {
  nlohmann::json problem;  // built-in name + params, or a full problem document
  SolverKind solver = SolverKind::LinAlm;
  RunConfig run_template;  // schedule params, K, stride, flags
  std::vector<uint64_t> seeds;
  std::string outdir;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
};

// Builds the problem an experiment config describes.
ProblemSpec build_problem(const nlohmann::json& problem_json);

struct ExperimentResult {
  std::vector<RunReport> reports;   // seed order
  std::vector<std::string> csv_paths;
  std::string summary_path;
  bool any_aborted = false;
};

// Runs every seed (seed-level parallelism, capped by PENALTY_STORM_THREADS),
// writes one CSV per seed plus a JSONL summary (per-seed records + one
// aggregate record with medians).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV helpers. Columns are exactly kTraceHeader, '.' decimal, LF endings,
// %.17g doubles so identical runs serialize byte-identically.
void write_trace_csv(const std::string& path, const RunReport& report);
std::vector<TraceRow> read_trace_csv(const std::string& path);

struct FitResult {
  double slope = 0, intercept = 0, r2 = 0;
  long rows_used = 0;
};

// OLS of log(running average of the column, averaged across seeds) against
// log k over [kmin, kmax]. The running average is rebuilt from cumulative
// sums over the k >= 1 rows; rows with nonpositive values are skipped.
// Column expressions: a column name, "name^2", or a '+'-joined sum of those.
FitResult fit_rate(const std::vector<std::string>& csv_paths,
                   const std::string& column_expr, double kmin, double kmax);

// Same fit on in-memory per-seed series of (k, value) samples; used for
// quantities that are not trace columns (e.g. the scaled-step residual).
using Series = std::vector<std::pair<long, double>>;
FitResult fit_rate_series(const std::vector<Series>& per_seed, double kmin,
                          double kmax, bool running_average = true);

// Running average of the seed-averaged series (helper shared with fit).
Series running_average_of(const std::vector<Series>& per_seed);

double median(std::vector<double> values);

}  // namespace pstorm
