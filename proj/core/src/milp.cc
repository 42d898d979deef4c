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

#include "glimps/milp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "glimps/errors.h"

namespace glimps {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-major copy of the problem data for the node loops.
struct Dense {
  int n = 0;
  int r = 0;
  std::vector<double> u;
  std::vector<double> x;

  explicit Dense(const MilpProblem& p)
      : n(static_cast<int>(p.basis.rows())),
        r(static_cast<int>(p.basis.cols())),
        u(static_cast<std::size_t>(n) * static_cast<std::size_t>(r)),
        x(p.obs.to_std()) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < r; ++j) u[idx(i, j)] = p.basis(i, j);
    }
  }

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(r) +
           static_cast<std::size_t>(j);
  }
  const double* row(int i) const { return &u[idx(i, 0)]; }
  double residual(int i, const double* theta) const {
    const double* a = row(i);
    double s = x[static_cast<std::size_t>(i)];
    for (int j = 0; j < r; ++j) s -= a[j] * theta[j];
    return s;
  }
};

// Reduced row echelon form of the equations u_i theta = x_i for the
// coordinates forced to be inliers. Once the rank reaches r, theta is pinned.
class Pinning {
 public:
  enum class Add { kIndependent, kRedundant, kInconsistent };

  explicit Pinning(int r)
      : r_(r),
        rows_(static_cast<std::size_t>(r) * static_cast<std::size_t>(r + 1), 0.0),
        pivot_col_(static_cast<std::size_t>(r), -1),
        is_pivot_(static_cast<std::size_t>(r), 0),
        scratch_(static_cast<std::size_t>(r), 0.0) {}

  int rank() const { return rank_; }

  Add add(const double* a_in, double b, double tol) {
    double* a = scratch_.data();
    double amax = 0.0;
    for (int j = 0; j < r_; ++j) {
      a[j] = a_in[j];
      amax = std::max(amax, std::abs(a[j]));
    }
    for (int k = 0; k < rank_; ++k) {
      const double f = a[pivot_col_[static_cast<std::size_t>(k)]];
      if (f == 0.0) continue;
      const double* rk = row(k);
      for (int j = 0; j < r_; ++j) a[j] -= f * rk[j];
      b -= f * rk[r_];
    }
    int best = -1;
    double best_abs = 0.0;
    for (int j = 0; j < r_; ++j) {
      if (is_pivot_[static_cast<std::size_t>(j)]) continue;
      if (std::abs(a[j]) > best_abs) {
        best_abs = std::abs(a[j]);
        best = j;
      }
    }
    if (best < 0 || best_abs <= kRankTol * amax) {
      return std::abs(b) <= tol ? Add::kRedundant : Add::kInconsistent;
    }
    const double inv = 1.0 / a[best];
    for (int j = 0; j < r_; ++j) a[j] *= inv;
    b *= inv;
    a[best] = 1.0;
    for (int k = 0; k < rank_; ++k) {
      double* rk = row(k);
      const double f = rk[best];
      if (f == 0.0) continue;
      for (int j = 0; j < r_; ++j) rk[j] -= f * a[j];
      rk[r_] -= f * b;
      rk[best] = 0.0;
    }
    double* dst = row(rank_);
    std::copy(a, a + r_, dst);
    dst[r_] = b;
    pivot_col_[static_cast<std::size_t>(rank_)] = best;
    is_pivot_[static_cast<std::size_t>(best)] = 1;
    ++rank_;
    return Add::kIndependent;
  }

  // Valid once rank() == r.
  void theta(double* out) const {
    for (int k = 0; k < rank_; ++k) out[pivot_col_[static_cast<std::size_t>(k)]] = row(k)[r_];
  }

 private:
  double* row(int k) { return &rows_[static_cast<std::size_t>(k) * static_cast<std::size_t>(r_ + 1)]; }
  const double* row(int k) const {
    return &rows_[static_cast<std::size_t>(k) * static_cast<std::size_t>(r_ + 1)];
  }

  int r_;
  int rank_ = 0;
  std::vector<double> rows_;
  std::vector<int> pivot_col_;
  std::vector<char> is_pivot_;
  std::vector<double> scratch_;
};

// Least squares over a growing row set via Givens rotations; tracks the
// residual sum of squares exactly as rows arrive.
class LsAccumulator {
 public:
  explicit LsAccumulator(int r)
      : r_(r),
        tri_(static_cast<std::size_t>(r) * static_cast<std::size_t>(r), 0.0),
        qtb_(static_cast<std::size_t>(r), 0.0),
        scratch_(static_cast<std::size_t>(r), 0.0) {}

  double rss() const { return rss_; }

  void add(const double* a_in, double b) {
    double* a = scratch_.data();
    std::copy(a_in, a_in + r_, a);
    for (int j = 0; j < r_; ++j) {
      if (a[j] == 0.0) continue;
      double* tj = &tri_[idx(j, 0)];
      if (tj[j] == 0.0) {
        for (int l = j; l < r_; ++l) tj[l] = a[l];
        qtb_[static_cast<std::size_t>(j)] = b;
        return;
      }
      const double rho = std::hypot(tj[j], a[j]);
      const double c = tj[j] / rho;
      const double s = a[j] / rho;
      for (int l = j; l < r_; ++l) {
        const double t = c * tj[l] + s * a[l];
        a[l] = -s * tj[l] + c * a[l];
        tj[l] = t;
      }
      const double t = c * qtb_[static_cast<std::size_t>(j)] + s * b;
      b = -s * qtb_[static_cast<std::size_t>(j)] + c * b;
      qtb_[static_cast<std::size_t>(j)] = t;
    }
    rss_ += b * b;
  }

  bool solve(double* theta) const {
    double dmax = 0.0;
    for (int j = 0; j < r_; ++j) dmax = std::max(dmax, std::abs(tri_[idx(j, j)]));
    if (dmax == 0.0) return false;
    for (int j = r_ - 1; j >= 0; --j) {
      const double djj = tri_[idx(j, j)];
      if (std::abs(djj) <= kRankTol * dmax) return false;
      double s = qtb_[static_cast<std::size_t>(j)];
      for (int l = j + 1; l < r_; ++l) s -= tri_[idx(j, l)] * theta[l];
      theta[j] = s / djj;
    }
    return true;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(r_) +
           static_cast<std::size_t>(j);
  }

  int r_;
  std::vector<double> tri_;
  std::vector<double> qtb_;
  std::vector<double> scratch_;
  double rss_ = 0.0;
};

struct Incumbent {
  Indicator z;
  Eigen::VectorXd theta;
  double objective = kInf;

  bool valid() const { return std::isfinite(objective); }
};

// Node accounting, limits and log lines shared by the search phases.
class SearchClock {
 public:
  SearchClock(Clock::time_point start, Clock::time_point deadline,
              const SolverOptions& options)
      : start_(start), deadline_(deadline), options_(options) {}

  // Counts a node; false once a limit has been hit.
  bool tick() {
    if (stopped_) return false;
    ++nodes_;
    if (options_.max_nodes > 0 && nodes_ >= options_.max_nodes) stopped_ = true;
    if ((nodes_ & 255) == 0 && Clock::now() >= deadline_) stopped_ = true;
    return !stopped_;
  }

  bool stopped() const { return stopped_; }
  void stop() { stopped_ = true; }
  bool out_of_time() const { return stopped_ || Clock::now() >= deadline_; }
  long nodes() const { return nodes_; }
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }
  Clock::time_point deadline() const { return deadline_; }

  void log(double bound, double incumbent) const {
    if (options_.log == nullptr) return;
    const double gap = std::isfinite(incumbent) ? std::max(0.0, incumbent - bound) : kInf;
    *options_.log << fmt::format("node={} bound={:.6g} incumbent={:.6g} gap={:.6g} t={:.3f}\n",
                                 nodes_, bound, incumbent, gap, elapsed());
  }

  bool log_due() const {
    return options_.log != nullptr && options_.log_every > 0 && nodes_ % options_.log_every == 0;
  }

 private:
  Clock::time_point start_;
  Clock::time_point deadline_;
  const SolverOptions& options_;
  long nodes_ = 0;
  bool stopped_ = false;
};

double absolute_gap(double gap_tol, double incumbent) {
  return std::isfinite(incumbent) ? gap_tol * std::max(1.0, std::abs(incumbent)) : 0.0;
}

// Exists theta with u_i theta = x_i on fixing == 0 rows (within tol) and
// |x_i - u_i theta| <= M elsewhere?
std::optional<Eigen::VectorXd> feasible_theta(const MilpProblem& p,
                                              std::span<const std::int8_t> fixing,
                                              bool box_all) {
  const auto n = p.basis.rows();
  const auto r = p.basis.cols();
  lp::LinearProgram prog(n, r);
  prog.constraints = p.basis.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = p.obs[i];
    const bool inlier = fixing[static_cast<std::size_t>(i)] == 0;
    const double slack = inlier ? p.feas_tol * 0.5 : p.big_m;
    if (inlier || box_all || fixing[static_cast<std::size_t>(i)] == 1) {
      prog.row_lower[i] = xi - slack;
      prog.row_upper[i] = xi + slack;
    }
  }
  const auto sol = lp::solve(prog);
  if (sol.status != lp::LpStatus::kOptimal) return std::nullopt;
  return sol.x;
}

void validate_problem(const MilpProblem& p) {
  if (p.basis.empty() || p.obs.empty()) throw DomainError("milp: empty problem data");
  if (p.basis.rows() != p.obs.size()) throw DomainError("milp: basis rows != obs length");
  if (!(p.big_m > 0.0) || !std::isfinite(p.big_m)) throw ConfigError("milp: big_m must be > 0");
  if (!(p.lambda >= 0.0)) throw ConfigError("milp: lambda must be >= 0");
  if (!(p.gap_tol >= 0.0)) throw ConfigError("milp: gap_tol must be >= 0");
  if (!(p.time_limit_s > 0.0)) throw ConfigError("milp: time_limit must be > 0");
  if (!(p.feas_tol > 0.0)) throw ConfigError("milp: feas_tol must be > 0");
  if (p.warm_start) {
    if (p.warm_start->z.size() != static_cast<std::size_t>(p.obs.size()) ||
        p.warm_start->theta.size() != p.basis.cols()) {
      throw ConfigError("milp: warm start has the wrong shape");
    }
    if (!std::isfinite(assignment_objective(p, p.warm_start->z, p.warm_start->theta))) {
      throw ConfigError("milp: warm start violates the constraints");
    }
  }
}

// Coordinates sorted by decreasing |residual| under theta (most outlier-like
// first), ties by index.
std::vector<int> branching_order(const Dense& data, const Eigen::VectorXd& theta) {
  std::vector<double> res(static_cast<std::size_t>(data.n));
  for (int i = 0; i < data.n; ++i) res[static_cast<std::size_t>(i)] = std::abs(data.residual(i, theta.data()));
  std::vector<int> order(static_cast<std::size_t>(data.n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return res[static_cast<std::size_t>(a)] > res[static_cast<std::size_t>(b)];
  });
  return order;
}

// Branch and bound over the indicator vector for the count objective.
// Forcing a coordinate to be an inlier adds an exact equation; once r
// independent equations pin theta the node is solved outright by counting
// residuals. Bound: number of forced outliers, optionally tightened by the
// LP relaxation near the root.
class ConsensusSearch {
 public:
  ConsensusSearch(const MilpProblem& p, const Dense& data, double inlier_tol,
                  bool enforce_big_m, int lp_bound_depth, double gap_tol,
                  const SolverOptions& options, SearchClock& clock)
      : p_(p),
        data_(data),
        tol_(inlier_tol),
        enforce_big_m_(enforce_big_m),
        lp_bound_depth_(lp_bound_depth),
        gap_tol_(gap_tol),
        options_(options),
        clock_(clock),
        fixing_(static_cast<std::size_t>(data.n), -1),
        pins_(static_cast<std::size_t>(data.n + 1), Pinning(data.r)),
        pending_bound_(static_cast<std::size_t>(data.n + 1), kInf),
        theta_(static_cast<std::size_t>(data.r), 0.0) {}

  void offer(const Indicator& z, const Eigen::VectorXd& theta) {
    const double obj = static_cast<double>(std::count(z.begin(), z.end(), 1));
    if (obj < incumbent_.objective) install(z, theta, obj);
  }

  // z_i = 1 exactly where |residual| > tol; rejected if that violates M.
  void offer_theta(const Eigen::VectorXd& theta) {
    Indicator z(static_cast<std::size_t>(data_.n), 0);
    for (int i = 0; i < data_.n; ++i) {
      const double res = std::abs(data_.residual(i, theta.data()));
      if (res > tol_) {
        if (enforce_big_m_ && res > p_.big_m + p_.feas_tol) return;
        z[static_cast<std::size_t>(i)] = 1;
      }
    }
    offer(z, theta);
  }

  void run(std::vector<int> order) {
    order_ = std::move(order);
    pins_[0] = Pinning(data_.r);
    dfs(0, 0, 0);
  }

  const Incumbent& incumbent() const { return incumbent_; }
  bool exhausted() const { return !clock_.stopped(); }

  std::optional<WarmStart> witness() const {
    if (witness_ && witness_objective_ < incumbent_.objective) return witness_;
    return std::nullopt;
  }

  double best_bound() const {
    double b = std::min(incumbent_.objective, pruned_min_);
    for (double v : pending_bound_) b = std::min(b, v);
    return std::ceil(b - 1e-9);
  }

 private:
  double threshold() const {
    const double inc = incumbent_.objective;
    return std::min(inc - 1.0 + 1e-6, inc - absolute_gap(gap_tol_, inc));
  }

  void install(Indicator z, Eigen::VectorXd theta, double obj) {
    incumbent_.z = std::move(z);
    incumbent_.theta = std::move(theta);
    incumbent_.objective = obj;
    if (options_.on_incumbent) options_.on_incumbent(obj, clock_.nodes());
    clock_.log(current_bound(), obj);
  }

  double current_bound() const {
    double b = std::min(incumbent_.objective, pruned_min_);
    for (double v : pending_bound_) b = std::min(b, v);
    return b;
  }

  void prune(double bound) { pruned_min_ = std::min(pruned_min_, bound); }

  double lp_bound() {
    const auto prog = big_m_relaxation(p_, fixing_);
    const auto sol = lp::solve(prog);
    if (sol.status == lp::LpStatus::kInfeasible) return kInf;
    if (sol.status != lp::LpStatus::kOptimal) return 0.0;
    return sol.objective;
  }

  void dfs(int k, int level, int ones) {
    if (!clock_.tick()) return;
    double bound = ones;
    double lp_value = std::numeric_limits<double>::quiet_NaN();
    if (k <= lp_bound_depth_) {
      lp_value = lp_bound();
      bound = std::max(bound, lp_value);
    }
    if (options_.on_node) {
      options_.on_node(NodeEvent{clock_.nodes(), k, fixing_, bound, lp_value});
    }
    if (clock_.log_due()) clock_.log(current_bound(), incumbent_.objective);
    if (bound >= threshold()) {
      prune(bound);
      return;
    }
    const Pinning& pin = pins_[static_cast<std::size_t>(level)];
    if (pin.rank() == data_.r) {
      evaluate_pinned(k, pin, ones);
      return;
    }
    if (k == data_.n) {
      evaluate_underdetermined(ones);
      return;
    }

    const int var = order_[static_cast<std::size_t>(k)];
    // Outlier child first: with the most outlier-like coordinates decided
    // first this visits pinned subsets of the best-ranked coordinates early.
    fixing_[static_cast<std::size_t>(var)] = 1;
    pending_bound_[static_cast<std::size_t>(k)] = bound;
    dfs(k + 1, level, ones + 1);

    if (!clock_.stopped() && bound >= threshold()) prune(bound);
    if (!clock_.stopped() && bound < threshold()) {
      Pinning& child = pins_[static_cast<std::size_t>(level + 1)];
      child = pin;
      const auto added = child.add(data_.row(var), data_.x[static_cast<std::size_t>(var)], tol_);
      if (added != Pinning::Add::kInconsistent) {
        fixing_[static_cast<std::size_t>(var)] = 0;
        dfs(k + 1, added == Pinning::Add::kIndependent ? level + 1 : level, ones);
      }
    }
    // A stopped search keeps the bounds of its open frames.
    if (!clock_.stopped()) pending_bound_[static_cast<std::size_t>(k)] = kInf;
    fixing_[static_cast<std::size_t>(var)] = -1;
  }

  void evaluate_pinned(int k, const Pinning& pin, int ones) {
    pin.theta(theta_.data());
    const double thr = threshold();
    double count = ones;
    for (int idx = k; idx < data_.n; ++idx) {
      const int i = order_[static_cast<std::size_t>(idx)];
      const double res = data_.residual(i, theta_.data());
      if (std::abs(res) > tol_) {
        count += 1.0;
        if (count >= thr) {
          prune(count);
          return;
        }
      }
    }
    // Candidate improves on the incumbent: build the full assignment.
    Indicator z(static_cast<std::size_t>(data_.n), 0);
    double obj = 0.0;
    bool violates = false;
    for (int i = 0; i < data_.n; ++i) {
      const double res = std::abs(data_.residual(i, theta_.data()));
      if (res > tol_) {
        violates = violates || res > p_.big_m + p_.feas_tol;
        z[static_cast<std::size_t>(i)] = 1;
        obj += 1.0;
      }
    }
    Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(theta_.data(), data_.r);
    if (enforce_big_m_ && violates) {
      if (obj < witness_objective_) {
        witness_objective_ = obj;
        witness_ = WarmStart{std::move(z), Vector(std::move(theta))};
        if (options_.stop_on_big_m_witness) clock_.stop();
      }
      return;
    }
    polish(z, theta);
    install(std::move(z), std::move(theta), obj);
  }

  // Replaces the pinned theta with the least-squares fit on the whole zero
  // set when that fit still satisfies every constraint.
  void polish(const Indicator& z, Eigen::VectorXd& theta) const {
    std::vector<int> zeros;
    for (int i = 0; i < data_.n; ++i) {
      if (z[static_cast<std::size_t>(i)] == 0) zeros.push_back(i);
    }
    if (static_cast<int>(zeros.size()) < data_.r) return;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(zeros.size()), data_.r);
    Eigen::VectorXd b(static_cast<Eigen::Index>(zeros.size()));
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      a.row(static_cast<Eigen::Index>(k)) = p_.basis.values().row(zeros[k]);
      b[static_cast<Eigen::Index>(k)] = p_.obs[zeros[k]];
    }
    Eigen::VectorXd refit;
    if (!detail::least_squares_into(a, b, refit)) return;
    for (int i = 0; i < data_.n; ++i) {
      const double res = std::abs(data_.residual(i, refit.data()));
      const double limit = z[static_cast<std::size_t>(i)] == 0 ? tol_ : p_.big_m + p_.feas_tol;
      if (res > limit && (z[static_cast<std::size_t>(i)] == 0 || enforce_big_m_)) return;
    }
    theta = std::move(refit);
  }

  void evaluate_underdetermined(int ones) {
    if (static_cast<double>(ones) >= threshold()) {
      prune(ones);
      return;
    }
    const auto theta = feasible_theta(p_, fixing_, enforce_big_m_);
    if (!theta) return;
    Indicator z(static_cast<std::size_t>(data_.n), 0);
    for (int i = 0; i < data_.n; ++i) z[static_cast<std::size_t>(i)] = fixing_[static_cast<std::size_t>(i)] == 1;
    // Forced outliers that the found theta happens to fit are inliers too.
    for (int i = 0; i < data_.n; ++i) {
      if (std::abs(data_.residual(i, theta->data())) <= tol_) z[static_cast<std::size_t>(i)] = 0;
    }
    const double obj = static_cast<double>(std::count(z.begin(), z.end(), 1));
    if (obj < incumbent_.objective) install(std::move(z), *theta, obj);
  }

  const MilpProblem& p_;
  const Dense& data_;
  double tol_;
  bool enforce_big_m_;
  int lp_bound_depth_;
  double gap_tol_;
  const SolverOptions& options_;
  SearchClock& clock_;

  std::vector<int> order_;
  std::vector<std::int8_t> fixing_;
  std::vector<Pinning> pins_;
  std::vector<double> pending_bound_;
  std::vector<double> theta_;
  Incumbent incumbent_;
  double pruned_min_ = kInf;
  std::optional<WarmStart> witness_;
  double witness_objective_ = kInf;
};

// Branch and bound for the penalized objective sum(z) + lambda ||w||^2.
// For a fixed indicator the optimal w is the least-squares residual on the
// inlier rows, so a node's bound is (#forced outliers) + lambda * RSS of the
// forced inliers; rows only ever add to the RSS.
class PenalizedSearch {
 public:
  PenalizedSearch(const MilpProblem& p, const Dense& data, const SolverOptions& options,
                  SearchClock& clock)
      : p_(p),
        data_(data),
        options_(options),
        clock_(clock),
        fixing_(static_cast<std::size_t>(data.n), -1),
        accs_(static_cast<std::size_t>(data.n + 1), LsAccumulator(data.r)),
        pending_bound_(static_cast<std::size_t>(data.n + 1), kInf),
        prefer_inlier_(static_cast<std::size_t>(data.n), 0) {}

  void offer(const Indicator& z, const Eigen::VectorXd& theta) {
    const Vector th(theta);
    const double obj = assignment_objective(p_, z, th);
    if (obj < incumbent_.objective) {
      install(z, theta, obj);
      return;
    }
    if (std::isfinite(obj)) return;
    MilpProblem unbounded = p_;
    unbounded.big_m = std::numeric_limits<double>::max();
    const double free_obj = assignment_objective(unbounded, z, th);
    if (free_obj < witness_objective_) {
      witness_objective_ = free_obj;
      witness_ = WarmStart{z, th};
    }
  }

  std::optional<WarmStart> witness() const {
    if (witness_ && witness_objective_ < incumbent_.objective) return witness_;
    return std::nullopt;
  }

  void run() {
    const Eigen::VectorXd ref = incumbent_.valid() ? incumbent_.theta
                                                   : Eigen::VectorXd::Zero(data_.r);
    order_ = branching_order(data_, ref);
    for (int i = 0; i < data_.n; ++i) {
      const double res = data_.residual(i, ref.data());
      prefer_inlier_[static_cast<std::size_t>(i)] = p_.lambda * res * res < 1.0;
    }
    accs_[0] = LsAccumulator(data_.r);
    dfs(0, 0, 0);
  }

  const Incumbent& incumbent() const { return incumbent_; }
  bool exhausted() const { return !clock_.stopped(); }

  double best_bound() const {
    double b = std::min(incumbent_.objective, pruned_min_);
    for (double v : pending_bound_) b = std::min(b, v);
    return b;
  }

 private:
  double threshold() const {
    const double inc = incumbent_.objective;
    return inc - std::max(absolute_gap(p_.gap_tol, inc), 1e-12 * std::max(1.0, std::abs(inc)));
  }

  void install(Indicator z, Eigen::VectorXd theta, double obj) {
    incumbent_.z = std::move(z);
    incumbent_.theta = std::move(theta);
    incumbent_.objective = obj;
    if (options_.on_incumbent) options_.on_incumbent(obj, clock_.nodes());
    clock_.log(best_bound(), obj);
  }

  void dfs(int k, int level, int ones) {
    if (!clock_.tick()) return;
    const LsAccumulator& acc = accs_[static_cast<std::size_t>(level)];
    const double bound = ones + p_.lambda * acc.rss();
    if (options_.on_node) options_.on_node(NodeEvent{clock_.nodes(), k, fixing_, bound});
    if (clock_.log_due()) clock_.log(best_bound(), incumbent_.objective);
    if (bound >= threshold()) {
      pruned_min_ = std::min(pruned_min_, bound);
      return;
    }
    if (k == data_.n) {
      evaluate_leaf();
      return;
    }
    const int var = order_[static_cast<std::size_t>(k)];
    pending_bound_[static_cast<std::size_t>(k)] = bound;
    if (prefer_inlier_[static_cast<std::size_t>(var)]) {
      include(k, level, ones, var);
      if (!clock_.stopped()) exclude(k, level, ones, var);
    } else {
      exclude(k, level, ones, var);
      if (!clock_.stopped()) include(k, level, ones, var);
    }
    if (!clock_.stopped()) pending_bound_[static_cast<std::size_t>(k)] = kInf;
    fixing_[static_cast<std::size_t>(var)] = -1;
  }

  void include(int k, int level, int ones, int var) {
    LsAccumulator& child = accs_[static_cast<std::size_t>(level + 1)];
    child = accs_[static_cast<std::size_t>(level)];
    child.add(data_.row(var), data_.x[static_cast<std::size_t>(var)]);
    fixing_[static_cast<std::size_t>(var)] = 0;
    dfs(k + 1, level + 1, ones);
  }

  void exclude(int k, int level, int ones, int var) {
    fixing_[static_cast<std::size_t>(var)] = 1;
    dfs(k + 1, level, ones + 1);
  }

  void evaluate_leaf() {
    Indicator z(static_cast<std::size_t>(data_.n));
    for (int i = 0; i < data_.n; ++i) z[static_cast<std::size_t>(i)] = fixing_[static_cast<std::size_t>(i)] == 1;
    std::optional<Vector> theta = refit_theta(p_, z);
    if (!theta) {
      // Fewer inlier rows than unknowns: any exact fit leaves w = 0.
      const auto exact = feasible_theta(p_, fixing_, false);
      if (!exact) return;
      theta = Vector(*exact);
    }
    const double obj = assignment_objective(p_, z, *theta);
    if (obj < threshold()) install(std::move(z), theta->values(), obj);
  }

  const MilpProblem& p_;
  const Dense& data_;
  const SolverOptions& options_;
  SearchClock& clock_;
  std::vector<int> order_;
  std::vector<std::int8_t> fixing_;
  std::vector<LsAccumulator> accs_;
  std::vector<double> pending_bound_;
  std::vector<std::uint8_t> prefer_inlier_;
  Incumbent incumbent_;
  double pruned_min_ = kInf;
  std::optional<WarmStart> witness_;
  double witness_objective_ = kInf;
};

MilpSolution finish(const MilpProblem& p, const Incumbent& inc, bool exhausted,
                    double best_bound, const SearchClock& clock,
                    std::optional<WarmStart> witness = std::nullopt) {
  MilpSolution sol;
  sol.big_m_witness = std::move(witness);
  sol.nodes_explored = clock.nodes();
  sol.wall_time_s = clock.elapsed();
  if (!inc.valid()) {
    sol.status = exhausted ? SolveStatus::kInfeasible : SolveStatus::kFeasibleTimeLimit;
    sol.objective = kInf;
    sol.best_bound = best_bound;
    return sol;
  }
  sol.z = inc.z;
  sol.theta = Vector(inc.theta);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p.obs.size());
  if (!p.noiseless()) {
    for (Eigen::Index i = 0; i < p.obs.size(); ++i) {
      if (sol.z[static_cast<std::size_t>(i)] == 0) {
        w[i] = p.obs[i] - p.basis.values().row(i).dot(inc.theta);
      }
    }
  }
  sol.w = Vector(std::move(w));
  sol.objective = p.noiseless() ? static_cast<double>(std::count(sol.z.begin(), sol.z.end(), 1))
                                : assignment_objective(p, sol.z, sol.theta);
  sol.status = exhausted ? SolveStatus::kOptimal : SolveStatus::kFeasibleTimeLimit;
  sol.best_bound = exhausted ? std::max(best_bound, sol.objective - absolute_gap(p.gap_tol, sol.objective))
                             : std::min(best_bound, sol.objective);
  return sol;
}

Clock::time_point deadline_for(const MilpProblem& p, const SolverOptions& options,
                               Clock::time_point start) {
  if (options.deadline) return *options.deadline;
  return start + std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double>(p.time_limit_s));
}

Eigen::VectorXd least_squares_all(const MilpProblem& p) {
  Eigen::VectorXd theta;
  if (!detail::least_squares_into(p.basis.values(), p.obs.values(), theta)) {
    theta = Eigen::VectorXd::Zero(p.basis.cols());
  }
  return theta;
}

// Alternates between "include every coordinate whose squared residual costs
// less than excluding it" and a least-squares refit on that set.
void refine_penalized(const MilpProblem& p, const Eigen::VectorXd& start,
                      PenalizedSearch& search) {
  Eigen::VectorXd theta = start;
  const auto n = p.obs.size();
  Indicator previous;
  for (int iter = 0; iter < 10; ++iter) {
    Indicator z(static_cast<std::size_t>(n), 0);
    const Eigen::VectorXd res = abs_residuals(p.basis.values(), p.obs.values(), theta);
    for (Eigen::Index i = 0; i < n; ++i) {
      z[static_cast<std::size_t>(i)] = p.lambda * res[i] * res[i] >= 1.0;
    }
    if (z == previous) break;
    const auto refit = refit_theta(p, z);
    if (!refit) break;
    search.offer(z, refit->values());
    theta = refit->values();
    previous = std::move(z);
  }
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleTimeLimit: return "feasible_time_limit";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

IndexSet MilpSolution::inliers() const {
  std::vector<int> members;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0) members.push_back(static_cast<int>(i));
  }
  return IndexSet::from_zero_based(std::move(members));
}

double choose_big_m(const Matrix& u, const Vector& x, const Vector& theta_init,
                    double safety) {
  if (!(safety >= 1.0)) throw ConfigError("choose_big_m: safety must be >= 1");
  if (u.rows() != x.size() || u.cols() != theta_init.size()) {
    throw DomainError("choose_big_m: shape mismatch");
  }
  const double max_res = abs_residuals(u.values(), x.values(), theta_init.values()).maxCoeff();
  return std::max(safety * max_res, 1e-6);
}

lp::LinearProgram big_m_relaxation(const MilpProblem& p, std::span<const std::int8_t> fixing) {
  const auto n = p.basis.rows();
  const auto r = p.basis.cols();
  lp::LinearProgram prog(2 * n, r + n);
  for (Eigen::Index i = 0; i < n; ++i) {
    prog.constraints.block(2 * i, 0, 1, r) = p.basis.values().row(i);
    prog.constraints(2 * i, r + i) = -p.big_m;
    prog.row_upper[2 * i] = p.obs[i];
    prog.constraints.block(2 * i + 1, 0, 1, r) = -p.basis.values().row(i);
    prog.constraints(2 * i + 1, r + i) = -p.big_m;
    prog.row_upper[2 * i + 1] = -p.obs[i];
    prog.objective[r + i] = 1.0;
    prog.col_lower[r + i] = 0.0;
    prog.col_upper[r + i] = 1.0;
    if (!fixing.empty() && fixing[static_cast<std::size_t>(i)] >= 0) {
      prog.col_lower[r + i] = prog.col_upper[r + i] = fixing[static_cast<std::size_t>(i)];
    }
  }
  return prog;
}

double assignment_objective(const MilpProblem& p, const Indicator& z, const Vector& theta) {
  const auto n = p.obs.size();
  if (z.size() != static_cast<std::size_t>(n) || theta.size() != p.basis.cols()) {
    throw DomainError("assignment_objective: shape mismatch");
  }
  const Eigen::VectorXd res = p.obs.values() - p.basis.values() * theta.values();
  double obj = 0.0;
  double rss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(res[i]);
    if (z[static_cast<std::size_t>(i)] != 0) {
      if (a > p.big_m + p.feas_tol) return kInf;
      obj += 1.0;
    } else if (p.noiseless()) {
      if (a > p.feas_tol) return kInf;
    } else {
      rss += res[i] * res[i];
    }
  }
  return p.noiseless() ? obj : obj + (p.lambda > 0.0 ? p.lambda * rss : 0.0);
}

std::optional<Vector> refit_theta(const MilpProblem& p, const Indicator& z) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0) rows.push_back(static_cast<int>(i));
  }
  if (rows.size() < static_cast<std::size_t>(p.basis.cols())) return std::nullopt;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), p.basis.cols());
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    a.row(static_cast<Eigen::Index>(k)) = p.basis.values().row(rows[k]);
    b[static_cast<Eigen::Index>(k)] = p.obs[rows[k]];
  }
  Eigen::VectorXd theta;
  if (!detail::least_squares_into(a, b, theta)) return std::nullopt;
  return Vector(std::move(theta));
}

MilpSolution solve_noiseless(const MilpProblem& p, const SolverOptions& options) {
  validate_problem(p);
  if (!p.noiseless()) throw ConfigError("solve_noiseless: lambda must be the noiseless sentinel");
  const auto start = Clock::now();
  SearchClock clock(start, deadline_for(p, options, start), options);
  const Dense data(p);

  ConsensusSearch search(p, data, p.feas_tol, true, options.lp_bound_depth, p.gap_tol,
                         options, clock);
  Eigen::VectorXd reference;
  if (options.lp_bound_depth >= 0) {
    const auto root = lp::solve(big_m_relaxation(p));
    if (root.status == lp::LpStatus::kInfeasible) {
      return finish(p, Incumbent{}, true, kInf, clock);
    }
    if (root.status == lp::LpStatus::kOptimal) {
      reference = root.x.head(data.r);
      search.offer_theta(reference);
    }
  }
  if (p.warm_start) {
    search.offer(p.warm_start->z, p.warm_start->theta.values());
    reference = p.warm_start->theta.values();
  }
  if (reference.size() == 0) {
    reference = least_squares_all(p);
    search.offer_theta(reference);
  }
  search.run(branching_order(data, reference));
  return finish(p, search.incumbent(), search.exhausted(), search.best_bound(), clock,
                search.witness());
}

MilpSolution solve_noisy(const MilpProblem& p, const SolverOptions& options) {
  validate_problem(p);
  if (p.noiseless()) throw ConfigError("solve_noisy: lambda must be finite");
  const auto start = Clock::now();
  const auto deadline = deadline_for(p, options, start);
  SearchClock clock(start, deadline, options);
  const Dense data(p);

  PenalizedSearch search(p, data, options, clock);
  // All-inlier assignment: always feasible since w absorbs every residual.
  const Eigen::VectorXd ls_all = least_squares_all(p);
  search.offer(Indicator(static_cast<std::size_t>(data.n), 0), ls_all);
  if (p.warm_start) search.offer(p.warm_start->z, p.warm_start->theta.values());

  Eigen::VectorXd reference = p.warm_start ? p.warm_start->theta.values() : ls_all;
  if (!p.warm_start && options.lp_bound_depth >= 0) {
    const auto root = lp::solve(big_m_relaxation(p));
    if (root.status == lp::LpStatus::kOptimal) reference = root.x.head(data.r);
  }
  refine_penalized(p, reference, search);

  // Primal heuristic: largest consensus at the residual scale where
  // including a coordinate costs less than excluding it, then refine.
  if (options.primal_heuristic && p.lambda > 0.0) {
    const auto now = Clock::now();
    SolverOptions heuristic_options;
    heuristic_options.deadline = now + (deadline - now) / 2;
    SearchClock heuristic_clock(now, *heuristic_options.deadline, heuristic_options);
    ConsensusSearch consensus(p, data, 1.0 / std::sqrt(p.lambda), false, -1, 0.0,
                              heuristic_options, heuristic_clock);
    consensus.offer_theta(reference);
    consensus.run(branching_order(data, reference));
    if (consensus.incumbent().valid()) {
      refine_penalized(p, consensus.incumbent().theta, search);
    }
  }

  if (options.stop_on_big_m_witness && search.witness()) {
    clock.stop();
    return finish(p, search.incumbent(), false, 0.0, clock, search.witness());
  }
  search.run();
  return finish(p, search.incumbent(), search.exhausted(), search.best_bound(), clock,
                search.witness());
}

MilpSolution solve(const MilpProblem& p, const SolverOptions& options) {
  return p.noiseless() ? solve_noiseless(p, options) : solve_noisy(p, options);
}

EscalationResult solve_with_escalation(MilpProblem p, const SolverOptions& options,
                                       int max_escalations) {
  const auto start = Clock::now();
  SolverOptions shared = options;
  shared.deadline = deadline_for(p, options, start);
  shared.stop_on_big_m_witness = max_escalations > 0;

  EscalationResult out;
  out.solution = solve(p, shared);
  out.big_m = p.big_m;
  long total_nodes = out.solution.nodes_explored;
  while (out.escalations < max_escalations && Clock::now() < *shared.deadline) {
    const MilpSolution& current = out.solution;
    const bool infeasible = current.status == SolveStatus::kInfeasible;
    MilpProblem next_p = p;
    SolverOptions next_options = shared;
    int steps = 1;
    if (infeasible) {
      next_p.big_m = 2.0 * p.big_m;
    } else if (current.big_m_witness) {
      // Double until the witness fits, then restart from it.
      const WarmStart& wit = *current.big_m_witness;
      const Eigen::VectorXd res =
          abs_residuals(p.basis.values(), p.obs.values(), wit.theta.values());
      double needed = 0.0;
      for (Eigen::Index i = 0; i < res.size(); ++i) {
        if (wit.z[static_cast<std::size_t>(i)] != 0) needed = std::max(needed, res[i]);
      }
      steps = 0;
      double m = p.big_m;
      while (m + p.feas_tol < needed && out.escalations + steps < max_escalations) {
        m *= 2.0;
        ++steps;
      }
      if (m + p.feas_tol < needed) break;
      next_p.big_m = m;
      next_p.warm_start = wit;
      next_options.primal_heuristic = false;
    } else if (current.status == SolveStatus::kOptimal) {
      next_p.big_m = 2.0 * p.big_m;
      next_p.warm_start = WarmStart{current.z, current.theta};
    } else {
      break;
    }
    MilpSolution next = solve(next_p, next_options);
    total_nodes += next.nodes_explored;
    if (infeasible && next.status == SolveStatus::kInfeasible) {
      p = next_p;
      out.big_m = p.big_m;
      ++out.escalations;
      continue;
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(current.objective));
    const bool improved = next.status != SolveStatus::kInfeasible &&
                          (infeasible || next.objective < current.objective - tol);
    if (!improved) break;
    p = next_p;
    out.solution = std::move(next);
    out.big_m = p.big_m;
    out.escalations += steps;
  }
  out.solution.nodes_explored = total_nodes;
  out.solution.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace glimps
