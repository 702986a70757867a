// penalty-storm: single-loop variance-reduced ALM / quadratic penalty solvers
// Copyright (c) 2026 penalty-storm contributors
// Licensed under Apache 2.0

#include "pstorm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "pstorm/problems.hpp"

namespace pstorm {

using nlohmann::json;
namespace fs = std::filesystem;

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.problem = j.at("problem");
  cfg.solver = solver_kind_from_string(j.at("solver").get<std::string>());
  cfg.run_template.kind = cfg.solver;
  cfg.run_template.K = j.at("K").get<long>();
  check(cfg.run_template.K >= 10, "config: K must be >= 10");
  cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  check(!cfg.seeds.empty(), "config: seeds must be nonempty");
  cfg.run_template.stride = j.value("stride", 100L);
  cfg.outdir = j.at("outdir").get<std::string>();
  cfg.run_template.potentials = j.value("potentials", false);
  cfg.run_template.record_walltime = j.value("record_walltime", false);

  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    Case1Params& c1 = cfg.run_template.case1;
    c1.c1 = s.value("c1", 1.0);
    c1.c2 = s.value("c2", 1.0);
    c1.c3 = s.value("c3", 1.0);
    c1.c4 = s.value("c4", 1.0);
    if (s.contains("k0")) c1.k0_override = s.at("k0").get<double>();
    if (s.contains("rho") &&
        (cfg.solver == SolverKind::LinAlm)) c1.rho_override = s.at("rho").get<double>();
    c1.alpha_scale = s.value("alpha_scale", 1.0);
    if (cfg.solver != SolverKind::LinAlm)
      cfg.run_template.rho_base = s.value("rho", 1.0 + 1e-6);
    cfg.run_template.gamma = s.value("gamma", 1.0);
    if (s.contains("l_tilde"))
      cfg.run_template.l_tilde_override = s.at("l_tilde").get<double>();
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open config file: " + path);
  json j = json::parse(in);
  return from_json(j);
}

ProblemSpec build_problem(const json& pj) {
  if (pj.contains("family")) return problem_from_json(pj);  // full document
  std::string name = pj.at("name").get<std::string>();
  uint64_t seed = pj.value("seed", 1ULL);
  int d = pj.value("d", 10);
  if (name == "sharing") {
    SharingOptions opts;
    opts.n = pj.value("n", opts.n);
    opts.s = pj.value("s", opts.s);
    opts.a_scale = pj.value("a_scale", opts.a_scale);
    return make_sharing(d, pj.value("m", 5), opts.n, seed, opts);
  }
  if (name == "sphere") {
    SphereOptions opts;
    opts.n = pj.value("n", opts.n);
    opts.s = pj.value("s", opts.s);
    opts.a_scale = pj.value("a_scale", opts.a_scale);
    return make_sphere(d, seed, opts);
  }
  if (name == "stoch_sphere") {
    StochSphereOptions opts;
    opts.n = pj.value("n", opts.n);
    opts.s = pj.value("s", opts.s);
    opts.a_scale = pj.value("a_scale", opts.a_scale);
    if (pj.contains("value_noise"))
      opts.value_noise = pj.at("value_noise").get<std::vector<double>>();
    if (pj.contains("jac_noise"))
      opts.jac_noise = pj.at("jac_noise").get<std::vector<double>>();
    return make_stoch_sphere(d, seed, opts);
  }
  throw std::invalid_argument("unknown problem name: " + name);
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int thread_cap() {
  if (const char* env = std::getenv("PENALTY_STORM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

void write_trace_csv(const std::string& path, const RunReport& report) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  check(out.good(), "cannot open trace file for writing: " + path);
  out << kTraceHeader << "\n";
  for (const TraceRow& r : report.rows) {
    out << r.k << ',' << format_double(r.eta_k) << ',' << format_double(r.rho_k)
        << ',' << format_double(r.alpha_k) << ',' << format_double(r.feas) << ','
        << format_double(r.cone_dist) << ',' << format_double(r.tracking_err)
        << ',' << format_double(r.potential_Y) << ',' << format_double(r.allowance)
        << ',' << format_double(r.objective) << ',' << format_double(r.wall_nanos)
        << "\n";
  }
  check(out.good(), "write failed: " + path);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  check(in.good(), "cannot open trace file: " + path);
  std::string line;
  check(static_cast<bool>(std::getline(in, line)), "empty trace file: " + path);
  check(line == kTraceHeader, "unexpected trace header in " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    double v[11];
    for (int i = 0; i < 11; ++i) {
      check(static_cast<bool>(std::getline(ss, tok, ',')), "short row in " + path);
      v[i] = std::strtod(tok.c_str(), nullptr);
    }
    TraceRow r;
    r.k = static_cast<long>(v[0]);
    r.eta_k = v[1]; r.rho_k = v[2]; r.alpha_k = v[3]; r.feas = v[4];
    r.cone_dist = v[5]; r.tracking_err = v[6]; r.potential_Y = v[7];
    r.allowance = v[8]; r.objective = v[9]; r.wall_nanos = v[10];
    rows.push_back(r);
  }
  return rows;
}

double median(std::vector<double> values) {
  check(!values.empty(), "median: empty");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ProblemSpec problem = build_problem(cfg.problem);
  fs::create_directories(cfg.outdir);

  ExperimentResult result;
  result.reports.resize(cfg.seeds.size());
  result.csv_paths.resize(cfg.seeds.size());

  const int workers = std::min<int>(thread_cap(), static_cast<int>(cfg.seeds.size()));
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(cfg.seeds.size());
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= cfg.seeds.size()) return;
        try {
          RunConfig rc = cfg.run_template;
          rc.seed = cfg.seeds[i];
          result.reports[i] = run(problem, rc);
          std::string path =
              (fs::path(cfg.outdir) / ("trace_seed" + std::to_string(rc.seed) + ".csv"))
                  .string();
          write_trace_csv(path, result.reports[i]);
          result.csv_paths[i] = path;
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (size_t i = 0; i < errors.size(); ++i)
    check(errors[i].empty(), "seed " + std::to_string(cfg.seeds[i]) +
                                 " failed: " + errors[i]);

  // Summary: one JSON record per seed, then an aggregate record. Medians are
  // computed on sorted copies, so they are permutation-invariant in the seeds.
  std::string summary_path = (fs::path(cfg.outdir) / "summary.jsonl").string();
  std::ofstream out(summary_path, std::ios::binary);
  check(out.good(), "cannot open summary for writing: " + summary_path);

  std::vector<double> sel_cone, sel_feas, final_cone, final_feas;
  for (size_t i = 0; i < cfg.seeds.size(); ++i) {
    const RunReport& r = result.reports[i];
    result.any_aborted = result.any_aborted || r.aborted;
    json rec{{"seed", cfg.seeds[i]},
             {"selected_index", r.selected_index},
             {"selected_cone_dist", r.selected_cone_dist},
             {"selected_feas", r.selected_feas},
             {"aborted", r.aborted},
             {"dual_bound_ok", r.dual_bound_ok},
             {"rows", r.rows.size()}};
    if (r.aborted) rec["abort_reason"] = r.abort_reason;
    if (!r.rows.empty() && !r.aborted) {
      rec["final_cone_dist"] = r.rows.back().cone_dist;
      rec["final_feas"] = r.rows.back().feas;
      final_cone.push_back(r.rows.back().cone_dist);
      final_feas.push_back(r.rows.back().feas);
    }
    sel_cone.push_back(r.selected_cone_dist);
    sel_feas.push_back(r.selected_feas);
    out << rec.dump() << "\n";
  }
  json agg{{"aggregate", true},
           {"seeds", cfg.seeds.size()},
           {"median_selected_cone_dist", median(sel_cone)},
           {"median_selected_feas", median(sel_feas)},
           {"any_aborted", result.any_aborted}};
  if (!final_cone.empty()) {
    agg["median_final_cone_dist"] = median(final_cone);
    agg["median_final_feas"] = median(final_feas);
  }
  out << agg.dump() << "\n";
  check(out.good(), "write failed: " + summary_path);
  result.summary_path = summary_path;
  return result;
}

// ---------------------------------------------------------------------------
// Rate fitting.
// ---------------------------------------------------------------------------

namespace {

// Column expressions: "name", "name^2", or a '+'-joined sum of those.
struct ColumnExpr {
  std::vector<std::pair<int, bool>> terms;  // (column index, squared?)
};

int column_index(const std::string& name) {
  static const char* names[] = {"k", "eta_k", "rho_k", "alpha_k", "feas",
                                "cone_dist", "tracking_err", "potential_Y",
                                "allowance", "objective", "wall_nanos"};
  for (int i = 0; i < 11; ++i)
    if (name == names[i]) return i;
  throw std::invalid_argument("unknown trace column: " + name);
}

double column_value(const TraceRow& r, int idx) {
  switch (idx) {
    case 0: return static_cast<double>(r.k);
    case 1: return r.eta_k;
    case 2: return r.rho_k;
    case 3: return r.alpha_k;
    case 4: return r.feas;
    case 5: return r.cone_dist;
    case 6: return r.tracking_err;
    case 7: return r.potential_Y;
    case 8: return r.allowance;
    case 9: return r.objective;
    default: return r.wall_nanos;
  }
}

ColumnExpr parse_column_expr(const std::string& expr) {
  ColumnExpr out;
  std::stringstream ss(expr);
  std::string term;
  while (std::getline(ss, term, '+')) {
    term.erase(std::remove_if(term.begin(), term.end(), ::isspace), term.end());
    check(!term.empty(), "empty term in column expression");
    bool squared = false;
    if (term.size() > 2 && term.substr(term.size() - 2) == "^2") {
      squared = true;
      term = term.substr(0, term.size() - 2);
    }
    out.terms.push_back({column_index(term), squared});
  }
  check(!out.terms.empty(), "empty column expression");
  return out;
}

double eval_expr(const TraceRow& r, const ColumnExpr& e) {
  double v = 0;
  for (auto [idx, sq] : e.terms) {
    double t = column_value(r, idx);
    v += sq ? t * t : t;
  }
  return v;
}

// Seed-wise mean of the series; all seeds must share one k grid.
Series seed_average(const std::vector<Series>& per_seed) {
  check(!per_seed.empty(), "fit: no series");
  const Series& first = per_seed.front();
  for (const Series& s : per_seed)
    check(s.size() == first.size(), "fit: seed series have mismatched k grids");
  Series avg(first.size());
  for (size_t i = 0; i < first.size(); ++i) {
    double sum = 0;
    for (const Series& s : per_seed) {
      check(s[i].first == first[i].first, "fit: seed series have mismatched k grids");
      sum += s[i].second;
    }
    avg[i] = {first[i].first, sum / static_cast<double>(per_seed.size())};
  }
  return avg;
}

FitResult ols_loglog(const Series& pts, double kmin, double kmax) {
  std::vector<std::pair<double, double>> xy;
  for (auto [k, v] : pts) {
    if (k < kmin || k > kmax) continue;
    if (!(v > 0) || !std::isfinite(v)) continue;  // nonpositive rows skipped
    xy.push_back({std::log(static_cast<double>(k)), std::log(v)});
  }
  check(xy.size() >= 8, "fit_rate: fewer than 8 usable rows in range");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : xy) {
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  double n = static_cast<double>(xy.size());
  double vx = sxx - sx * sx / n;
  double vy = syy - sy * sy / n;
  double cxy = sxy - sx * sy / n;
  check(vx > 0, "fit_rate: degenerate k range");
  FitResult fr;
  fr.slope = cxy / vx;
  fr.intercept = (sy - fr.slope * sx) / n;
  fr.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  fr.rows_used = static_cast<long>(xy.size());
  return fr;
}

}  // namespace

Series running_average_of(const std::vector<Series>& per_seed) {
  Series avg = seed_average(per_seed);
  Series ra;
  double cum = 0;
  long count = 0;
  for (auto [k, v] : avg) {
    if (k < 1) continue;  // the k = 0 row carries no step information
    if (!(v > 0) || !std::isfinite(v)) continue;
    cum += v;
    ++count;
    ra.push_back({k, cum / static_cast<double>(count)});
  }
  return ra;
}

FitResult fit_rate_series(const std::vector<Series>& per_seed, double kmin,
                          double kmax, bool running_average) {
  return ols_loglog(running_average ? running_average_of(per_seed)
                                    : seed_average(per_seed),
                    kmin, kmax);
}

FitResult fit_rate(const std::vector<std::string>& csv_paths,
                   const std::string& column_expr, double kmin, double kmax) {
  check(!csv_paths.empty(), "fit_rate: no input files");
  ColumnExpr expr = parse_column_expr(column_expr);
  std::vector<Series> per_seed;
  for (const std::string& path : csv_paths) {
    Series s;
    for (const TraceRow& r : read_trace_csv(path)) s.push_back({r.k, eval_expr(r, expr)});
    per_seed.push_back(std::move(s));
  }
  return fit_rate_series(per_seed, kmin, kmax, true);
}

}  // namespace pstorm
