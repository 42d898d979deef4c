// Copyright 2026 The GLIMPS Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "glimps/baselines.h"
#include "glimps/bench.h"
#include "glimps/csv_io.h"
#include "glimps/errors.h"
#include "glimps/mps.h"
#include "glimps/pipeline.h"
#include "glimps/synth.h"

namespace glimps::cli {
namespace {

double parse_lambda_arg(const std::string& s) {
  if (s == "none" || s == "inf") return kNoiseless;
  const double v = parse_double(s);
  if (!(v >= 0.0) || std::isnan(v)) throw ConfigError("--lambda must be 'none' or >= 0");
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& f : split_csv_line(s)) {
    if (!f.empty()) out.push_back(parse_double(f));
  }
  if (out.empty()) throw ConfigError("empty list: " + s);
  return out;
}

std::vector<Method> parse_methods(const std::string& s) {
  std::vector<Method> out;
  for (const auto& f : split_csv_line(s)) {
    const auto m = parse_method(f);
    if (!m) throw ConfigError("unknown method: " + f);
    out.push_back(*m);
  }
  if (out.empty()) throw ConfigError("--methods is empty");
  return out;
}

struct DetectArgs {
  std::string basis;
  std::string obs;
  double removal = 0.4;
  std::string lambda = "none";
  double time_limit = 60.0;
  std::optional<double> tau;
  std::optional<double> sigma;
  std::string out;
  std::string trace;
  std::string export_mps;
  bool log = false;
};

int run_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  const Matrix u = read_matrix_csv(a.basis);
  const Vector x = read_vector_csv(a.obs);
  GlimpsConfig cfg;
  cfg.removal_fraction = a.removal;
  cfg.lambda = parse_lambda_arg(a.lambda);
  cfg.time_limit_s = a.time_limit;
  cfg.tau = a.tau;
  cfg.sigma = a.sigma;

  SolverOptions options;
  if (a.log) {
    options.log = &err;
    options.log_every = 100000;
  }
  const DetectionResult res = glimps_detect(u, x, cfg, options);

  std::ostringstream rows;
  rows << "index,residual,label\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    rows << i + 1 << ',' << format_double(res.residuals[i]) << ','
         << (res.labels[static_cast<std::size_t>(i)] == Label::kInlier ? "inlier" : "outlier")
         << '\n';
  }
  if (a.out.empty()) {
    out << rows.str();
  } else {
    std::ofstream f(a.out);
    if (!f) throw IoError("cannot open " + a.out);
    f << rows.str();
  }
  if (!a.trace.empty()) {
    std::ofstream f(a.trace);
    if (!f) throw IoError("cannot open " + a.trace);
    write_trace_csv(res.stage1_trace, f);
  }
  if (!a.export_mps.empty()) {
    MilpProblem p;
    p.basis = restrict_rows(u, res.survivors);
    p.obs = restrict(x, res.survivors);
    p.big_m = res.big_m;
    export_mps(p, a.export_mps);
  }

  std::string theta;
  for (Eigen::Index j = 0; j < res.theta_hat.size(); ++j) {
    theta += (j ? "," : "") + format_double(res.theta_hat[j]);
  }
  err << fmt::format("status={} recovered={} inliers={} big_m={} theta=[{}] t={:.3f}\n",
                     to_string(res.stage2.status), res.recovered ? "yes" : "no",
                     res.inliers.size(), format_double(res.big_m), theta,
                     res.stage2.wall_time_s);
  return 0;
}

struct GenArgs {
  InstanceSpec spec;
  std::string out_basis;
  std::string out_obs;
  std::string out_truth;
};

int run_gen(const GenArgs& a) {
  const Instance inst = generate(a.spec);
  write_matrix_csv(inst.u, a.out_basis);
  write_vector_csv(inst.x, a.out_obs);
  if (!a.out_truth.empty()) write_truth_csv(inst, a.out_truth);
  return 0;
}

struct BenchArgs {
  std::string sweep = "outliers";
  int d = 100;
  int r = 5;
  int trials = 50;
  double time_limit = 60.0;
  std::string removal;
  std::string lambda;
  std::uint64_t seed = 1;
  std::string methods;
  std::string p_grid;
  std::string sigma_grid;
  std::string greedy_removal = "truth";
  std::optional<double> tau;
  std::string experiment_id;
  int workers = 0;
  std::string out;
  std::string summary;
  bool quiet = false;
};

int run_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto kind = parse_sweep_kind(a.sweep);
  if (!kind) throw ConfigError("unknown sweep: " + a.sweep);
  SweepSpec spec = default_spec(*kind);
  spec.d = a.d;
  spec.r = a.r;
  spec.trials = a.trials;
  spec.time_limit_s = a.time_limit;
  spec.base_seed = a.seed;
  spec.tau = a.tau;
  spec.workers = a.workers;
  spec.experiment_id = a.experiment_id;
  if (!a.removal.empty()) spec.removal_grid = parse_list(a.removal);
  if (!a.lambda.empty()) spec.lambda = parse_lambda_arg(a.lambda);
  if (!a.methods.empty()) spec.methods = parse_methods(a.methods);
  if (!a.p_grid.empty()) spec.p_grid = parse_list(a.p_grid);
  if (!a.sigma_grid.empty()) spec.sigma_grid = parse_list(a.sigma_grid);
  if (a.greedy_removal != "truth") spec.greedy_removal_fraction = parse_double(a.greedy_removal);

  RowCallback progress;
  if (!a.quiet) {
    progress = [&err](const ResultRow& row) {
      err << fmt::format("{} p={} sigma={} removal={} trial={} err={} status={} t={:.3f}\n",
                         row.method, format_double(row.p), format_double(row.sigma),
                         format_double(row.removal_fraction), row.trial,
                         format_double(row.coef_error), row.solver_status, row.wall_time_s);
    };
  }
  std::optional<std::filesystem::path> path;
  if (!a.out.empty()) path = a.out;
  const SweepReport report = run_sweep(spec, path, progress);
  if (!path) write_rows_csv(report.rows, out);
  if (!a.summary.empty()) write_summary_csv(summarize(report.rows), a.summary);
  err << fmt::format("rows: {} new, {} resumed, {} expected\n", report.produced,
                     report.resumed, report.expected);
  return report.complete() ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust matched subspace detection and benchmarks"};
  app.name("glimps");
  app.require_subcommand(1);

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "Detect the inliers of one observation");
  d->add_option("--basis", detect.basis, "Basis matrix CSV (d x r)")->required();
  d->add_option("--obs", detect.obs, "Observation vector CSV (d)")->required();
  d->add_option("--removal", detect.removal, "Greedy removal fraction")->capture_default_str();
  d->add_option("--lambda", detect.lambda, "none for the noiseless model, else the penalty")
      ->capture_default_str();
  d->add_option("--time-limit", detect.time_limit, "Seconds")->capture_default_str();
  d->add_option("--tau", detect.tau, "Inlier residual threshold");
  d->add_option("--sigma", detect.sigma, "Known noise level (default tau = 3 sigma)");
  d->add_option("--out", detect.out, "Result CSV (default stdout)");
  d->add_option("--trace", detect.trace, "Greedy trace CSV");
  d->add_option("--export-mps", detect.export_mps, "Write the stage-2 model as MPS");
  d->add_flag("--log", detect.log, "Solver progress on stderr");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic instance");
  g->add_option("--d", gen.spec.d)->capture_default_str();
  g->add_option("--r", gen.spec.r)->capture_default_str();
  g->add_option("--p", gen.spec.p, "Outlier probability")->capture_default_str();
  g->add_option("--sigma", gen.spec.sigma)->capture_default_str();
  g->add_option("--seed", gen.spec.seed)->capture_default_str();
  g->add_option("--out-basis", gen.out_basis)->required();
  g->add_option("--out-obs", gen.out_obs)->required();
  g->add_option("--out-truth", gen.out_truth);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a seeded benchmark sweep");
  b->add_option("--sweep", bench.sweep, "outliers|removal|noise|timing")->capture_default_str();
  b->add_option("--d", bench.d)->capture_default_str();
  b->add_option("--r", bench.r)->capture_default_str();
  b->add_option("--trials", bench.trials)->capture_default_str();
  b->add_option("--time-limit", bench.time_limit)->capture_default_str();
  b->add_option("--removal", bench.removal, "Removal fraction(s), comma separated");
  b->add_option("--lambda", bench.lambda, "none|<value>");
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--methods", bench.methods, "greedy,milp,glimps,l1,greedy-l1,oracle");
  b->add_option("--p-grid", bench.p_grid, "Outlier fractions, comma separated");
  b->add_option("--sigma-grid", bench.sigma_grid, "Noise levels, comma separated");
  b->add_option("--greedy-removal", bench.greedy_removal,
                "truth or a fraction of d for greedy and greedy-l1")
      ->capture_default_str();
  b->add_option("--tau", bench.tau);
  b->add_option("--experiment-id", bench.experiment_id);
  b->add_option("--workers", bench.workers, "0: GLIMPS_WORKERS or all cores");
  b->add_option("--out", bench.out, "Result CSV (resumed if present; default stdout)");
  b->add_option("--summary", bench.summary, "Per-cell mean/stddev CSV");
  b->add_flag("--quiet", bench.quiet, "No per-row progress on stderr");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (d->parsed() ? d->help() : g->parsed() ? g->help() : b->parsed() ? b->help() : app.help());
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (d->parsed()) return run_detect(detect, out, err);
    if (g->parsed()) return run_gen(gen);
    if (b->parsed()) return run_bench(bench, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace glimps::cli
