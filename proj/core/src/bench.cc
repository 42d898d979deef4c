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

#include "glimps/bench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "glimps/csv_io.h"
#include "glimps/errors.h"
#include "glimps/metrics.h"
#include "glimps/synth.h"

namespace glimps {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> step_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int k = 0; k <= n; ++k) out.push_back(std::round((lo + k * step) * 1e6) / 1e6);
  return out;
}

std::string format_lambda(double lambda) {
  return std::isinf(lambda) ? "none" : format_double(lambda);
}

double parse_lambda(const std::string& s) {
  return s == "none" ? kNoiseless : parse_double(s);
}

using RowKey = std::tuple<std::string, std::string, int, int, std::string, std::string,
                          std::string, std::string, int>;

RowKey key_of(const ResultRow& row) {
  return {row.experiment_id, row.method, row.d, row.r, format_double(row.p),
          format_double(row.sigma), format_lambda(row.lambda),
          format_double(row.removal_fraction), row.trial};
}

int greedy_count(const SweepSpec& spec, const Instance& inst) {
  const int d = spec.d;
  int count = 0;
  if (spec.greedy_removal_fraction) {
    count = removal_count_for(*spec.greedy_removal_fraction, d);
  } else {
    count = static_cast<int>(std::count(inst.outlier_mask.begin(), inst.outlier_mask.end(), 1));
  }
  return std::clamp(count, 0, d - spec.r - 1);
}

DetectionResult run_method(Method m, const SweepSpec& spec, const GridPoint& gp,
                           const Instance& inst, double tau) {
  GlimpsConfig cfg;
  cfg.removal_fraction = gp.removal;
  cfg.lambda = spec.lambda;
  cfg.time_limit_s = spec.time_limit_s;
  cfg.tau = tau;
  cfg.sigma = gp.sigma;
  switch (m) {
    case Method::kGreedyOnly: return greedy_only(inst.u, inst.x, greedy_count(spec, inst), tau);
    case Method::kGreedyPlusL1:
      return greedy_plus_l1(inst.u, inst.x, greedy_count(spec, inst), tau);
    case Method::kL1: return l1_only(inst.u, inst.x, tau);
    case Method::kMilpOnly: return milp_only(inst.u, inst.x, cfg);
    case Method::kGlimps: return glimps_detect(inst.u, inst.x, cfg);
    case Method::kOracle: {
      const Consensus c = brute_force_consensus(inst.u, inst.x, tau);
      DetectionResult out;
      out.tau = tau;
      out.theta_hat = c.theta;
      Classification cl = classify_all(inst.u, inst.x, c.theta, tau);
      out.labels = std::move(cl.labels);
      out.residuals = std::move(cl.residuals);
      out.stage2_labels = out.labels;
      out.inliers = inlier_set(out.labels);
      out.recovered = static_cast<Eigen::Index>(c.inliers.size()) > inst.u.cols();
      return out;
    }
  }
  throw ConfigError("unknown method");
}

bool uses_solver(Method m) { return m == Method::kMilpOnly || m == Method::kGlimps; }

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  if (v.size() == 1) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::kOutliers: return "outliers";
    case SweepKind::kRemoval: return "removal";
    case SweepKind::kNoise: return "noise";
    case SweepKind::kTiming: return "timing";
  }
  return "unknown";
}

std::optional<SweepKind> parse_sweep_kind(std::string_view name) {
  for (SweepKind k : {SweepKind::kOutliers, SweepKind::kRemoval, SweepKind::kNoise,
                      SweepKind::kTiming}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

SweepSpec default_spec(SweepKind kind) {
  SweepSpec s;
  s.kind = kind;
  s.p_grid = step_grid(0.10, 0.90, 0.05);
  s.removal_grid = {0.4};
  s.sigma_grid = {0.0};
  s.methods = {Method::kGreedyOnly, Method::kMilpOnly, Method::kGlimps};
  switch (kind) {
    case SweepKind::kOutliers:
    case SweepKind::kTiming:
      break;
    case SweepKind::kRemoval:
      s.p_grid = step_grid(0.70, 0.90, 0.05);
      s.removal_grid = {0.3, 0.4, 0.5};
      s.methods = {Method::kGlimps};
      break;
    case SweepKind::kNoise:
      s.removal_grid = {0.3};
      s.sigma_grid = {1e-9, 1e-3, 1e-1};
      s.lambda = 1000.0;
      s.methods = {Method::kGlimps};
      break;
  }
  return s;
}

void validate(const SweepSpec& spec) {
  if (spec.r < 1 || spec.d <= spec.r + 1) throw ConfigError("sweep: need 1 <= r and r + 2 <= d");
  if (spec.p_grid.empty() || spec.removal_grid.empty() || spec.sigma_grid.empty()) {
    throw ConfigError("sweep: grids must be nonempty");
  }
  if (spec.trials < 1) throw ConfigError("sweep: trials must be >= 1");
  if (spec.methods.empty()) throw ConfigError("sweep: no methods");
  if (!(spec.time_limit_s > 0.0)) throw ConfigError("sweep: time limit must be > 0");
  for (double p : spec.p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("sweep: p outside [0, 1]");
  }
  for (double q : spec.removal_grid) {
    if (!(q >= 0.0 && q < 1.0)) throw ConfigError("sweep: removal outside [0, 1)");
  }
  for (double s : spec.sigma_grid) {
    if (!(s >= 0.0)) throw ConfigError("sweep: sigma must be >= 0");
  }
}

std::vector<GridPoint> grid_points(const SweepSpec& spec) {
  std::vector<GridPoint> out;
  for (double p : spec.p_grid) {
    for (double s : spec.sigma_grid) {
      for (double q : spec.removal_grid) out.push_back(GridPoint{p, s, q});
    }
  }
  return out;
}

int worker_count(const SweepSpec& spec) {
  if (const char* env = std::getenv("GLIMPS_WORKERS"); env != nullptr && *env != '\0') {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  if (spec.workers >= 1) return spec.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string result_header() {
  std::string out;
  for (std::size_t k = 0; k < kResultColumns.size(); ++k) {
    if (k > 0) out += ',';
    out += kResultColumns[k];
  }
  return out;
}

std::string format_row(const ResultRow& row) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", row.experiment_id,
                     row.method, row.d, row.r, format_double(row.p), format_double(row.sigma),
                     format_lambda(row.lambda), format_double(row.removal_fraction), row.trial,
                     row.seed, format_double(row.coef_error), format_double(row.misclass_ratio),
                     format_double(row.misclass_ratio_stage2), format_double(row.wall_time_s),
                     row.solver_status, row.nodes_explored);
}

ResultRow parse_row(const std::string& line) {
  const auto f = split_csv_line(line);
  if (f.size() != kResultColumns.size()) {
    throw IoError(fmt::format("result row has {} fields, expected {}", f.size(),
                              kResultColumns.size()));
  }
  ResultRow row;
  try {
    row.experiment_id = f[0];
    row.method = f[1];
    row.d = std::stoi(f[2]);
    row.r = std::stoi(f[3]);
    row.p = parse_double(f[4]);
    row.sigma = parse_double(f[5]);
    row.lambda = parse_lambda(f[6]);
    row.removal_fraction = parse_double(f[7]);
    row.trial = std::stoi(f[8]);
    row.seed = std::stoull(f[9]);
    row.coef_error = parse_double(f[10]);
    row.misclass_ratio = parse_double(f[11]);
    row.misclass_ratio_stage2 = parse_double(f[12]);
    row.wall_time_s = parse_double(f[13]);
    row.solver_status = f[14];
    row.nodes_explored = std::stol(f[15]);
  } catch (const std::logic_error&) {
    throw IoError("malformed result row: " + line);
  }
  return row;
}

std::vector<ResultRow> read_rows_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == result_header()) continue;
    }
    rows.push_back(parse_row(line));
  }
  return rows;
}

void write_rows_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << result_header() << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment_id, a.method, a.p, a.sigma, a.removal_fraction, a.trial) <
           std::tie(b.experiment_id, b.method, b.p, b.sigma, b.removal_fraction, b.trial);
  });
}

std::vector<ResultRow> run_trial(const SweepSpec& spec, const GridPoint& gp, int trial,
                                 const std::vector<Method>& methods) {
  InstanceSpec is;
  is.d = spec.d;
  is.r = spec.r;
  is.p = gp.p;
  is.sigma = gp.sigma;
  is.seed = trial_seed(spec.base_seed, spec.d, spec.r, gp.p, gp.sigma, trial);
  const Instance inst = generate(is);
  const double tau = spec.tau ? *spec.tau : default_tau(inst.x, spec.lambda, gp.sigma);

  std::vector<ResultRow> rows;
  for (Method m : methods) {
    ResultRow row;
    row.experiment_id = spec.experiment_id.empty() ? std::string(to_string(spec.kind))
                                                   : spec.experiment_id;
    row.method = to_string(m);
    row.d = spec.d;
    row.r = spec.r;
    row.p = gp.p;
    row.sigma = gp.sigma;
    row.lambda = spec.lambda;
    row.removal_fraction = gp.removal;
    row.trial = trial;
    row.seed = is.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      const DetectionResult res = run_method(m, spec, gp, inst, tau);
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.coef_error = coef_error(inst.theta_true, res.theta_hat);
      row.misclass_ratio = misclass_ratio(inst.outlier_mask, res.labels);
      row.misclass_ratio_stage2 = misclass_ratio(inst.outlier_mask, res.stage2_labels);
      row.solver_status = uses_solver(m) ? std::string(to_string(res.stage2.status)) : "none";
      row.nodes_explored = res.stage2.nodes_explored;
    } catch (const std::exception&) {
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.coef_error = row.misclass_ratio = row.misclass_ratio_stage2 = kNaN;
      row.solver_status = "error";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

SweepReport run_sweep(const SweepSpec& spec, const std::optional<std::filesystem::path>& out,
                      const RowCallback& on_row) {
  validate(spec);
  const auto points = grid_points(spec);
  SweepReport report;
  report.expected = static_cast<long>(points.size()) * spec.trials *
                    static_cast<long>(spec.methods.size());

  std::set<RowKey> done;
  if (out && std::filesystem::exists(*out) && std::filesystem::file_size(*out) > 0) {
    std::ifstream in(*out);
    if (!in) throw IoError("bench: cannot read " + out->string());
    report.rows = read_rows_csv(in);
    for (const auto& row : report.rows) done.insert(key_of(row));
  }

  struct Job {
    GridPoint gp;
    int trial;
    std::vector<Method> methods;
  };
  std::vector<Job> jobs;
  const std::string exp_id =
      spec.experiment_id.empty() ? std::string(to_string(spec.kind)) : spec.experiment_id;
  for (const auto& gp : points) {
    for (int t = 0; t < spec.trials; ++t) {
      Job job{gp, t, {}};
      for (Method m : spec.methods) {
        ResultRow probe;
        probe.experiment_id = exp_id;
        probe.method = to_string(m);
        probe.d = spec.d;
        probe.r = spec.r;
        probe.p = gp.p;
        probe.sigma = gp.sigma;
        probe.lambda = spec.lambda;
        probe.removal_fraction = gp.removal;
        probe.trial = t;
        if (done.count(key_of(probe)) != 0) {
          ++report.resumed;
        } else {
          job.methods.push_back(m);
        }
      }
      if (!job.methods.empty()) jobs.push_back(std::move(job));
    }
  }
  // Resumed rows that are not part of this spec stay in the file but do
  // not count towards completion.

  std::ofstream sink;
  if (out) {
    const bool fresh = !std::filesystem::exists(*out) || std::filesystem::file_size(*out) == 0;
    sink.open(*out, std::ios::app);
    if (!sink) throw IoError("bench: cannot open " + out->string());
    if (fresh) sink << result_header() << '\n' << std::flush;
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      auto rows = run_trial(spec, jobs[k].gp, jobs[k].trial, jobs[k].methods);
      std::lock_guard<std::mutex> lock(mu);
      for (auto& row : rows) {
        if (sink.is_open()) sink << format_row(row) << '\n' << std::flush;
        if (on_row) on_row(row);
        ++report.produced;
        report.rows.push_back(std::move(row));
      }
    }
  };
  const int nworkers = std::min<int>(worker_count(spec), static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  sort_rows(report.rows);
  if (out) {
    sink.close();
    const auto tmp = std::filesystem::path(out->string() + ".tmp");
    {
      std::ofstream final_out(tmp);
      if (!final_out) throw IoError("bench: cannot write " + tmp.string());
      write_rows_csv(report.rows, final_out);
      if (!final_out) throw IoError("bench: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, *out);
  }
  return report;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, int, int, double, double, double, double>;
  struct Acc {
    std::vector<double> coef, mis, wall;
    int n = 0;
    int errors = 0;
    int successes = 0;
  };
  std::map<Key, Acc> groups;
  for (const auto& row : rows) {
    Acc& a = groups[Key{row.method, row.d, row.r, row.p, row.sigma, row.lambda,
                        row.removal_fraction}];
    ++a.n;
    a.wall.push_back(row.wall_time_s);
    if (std::isnan(row.coef_error)) {
      ++a.errors;
      continue;
    }
    a.coef.push_back(row.coef_error);
    if (!std::isnan(row.misclass_ratio)) a.mis.push_back(row.misclass_ratio);
    if (trial_success(row.coef_error, row.sigma)) ++a.successes;
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : groups) {
    SummaryRow s;
    std::tie(s.method, s.d, s.r, s.p, s.sigma, s.lambda, s.removal_fraction) = key;
    s.n = a.n;
    s.errors = a.errors;
    s.coef_error_mean = mean_of(a.coef);
    s.coef_error_std = std_of(a.coef);
    s.misclass_mean = mean_of(a.mis);
    s.misclass_std = std_of(a.mis);
    s.wall_time_mean = mean_of(a.wall);
    s.wall_time_std = std_of(a.wall);
    s.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.n);
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "method,d,r,p,sigma,lambda,removal_fraction,n,errors,coef_error_mean,"
         "coef_error_std,misclass_mean,misclass_std,wall_time_mean,wall_time_std,"
         "success_rate\n";
  for (const auto& s : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.method, s.d, s.r,
                       format_double(s.p), format_double(s.sigma), format_lambda(s.lambda),
                       format_double(s.removal_fraction), s.n, s.errors,
                       format_double(s.coef_error_mean), format_double(s.coef_error_std),
                       format_double(s.misclass_mean), format_double(s.misclass_std),
                       format_double(s.wall_time_mean), format_double(s.wall_time_std),
                       format_double(s.success_rate));
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path) {
  if (path.empty()) throw IoError("write_summary_csv: empty path");
  std::ofstream out(path);
  if (!out) throw IoError("write_summary_csv: cannot open " + path.string());
  write_summary_csv(rows, out);
  if (!out) throw IoError("write_summary_csv: write failed for " + path.string());
}

}  // namespace glimps
