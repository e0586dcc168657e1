// Copyright 2026 The CHSVI Authors
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

#include "chsvi/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>

namespace chsvi {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr double kMinRcond = 1e-12;
constexpr int kRefactorEvery = 50;
constexpr double kUpdatePivotTol = 1e-11;

}  // namespace

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration limit";
    case LpStatus::kNumericalError: return "numerical error";
  }
  return "unknown";
}

struct SimplexSolver::Factor {
  Eigen::MatrixXd inv;  // inverse kernel, indexed [basic position][tight position]
  bool valid = false;
  int updates = 0;
};

SimplexSolver::SimplexSolver(int num_vars)
    : n_(num_vars),
      c_(num_vars, 0.0),
      lo_(num_vars, -kInfinity),
      hi_(num_vars, kInfinity),
      col_pos_(num_vars, -1),
      xs_(num_vars, 0.0),
      factor_(std::make_unique<Factor>()) {}

SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;
SimplexSolver::~SimplexSolver() = default;

SimplexSolver::SimplexSolver(const LinearProgram& lp) : SimplexSolver(lp.num_vars()) {
  set_objective(lp.objective);
  for (int j = 0; j < n_; ++j) {
    const double lo = lp.lower.empty() ? -kInfinity : lp.lower[j];
    const double hi = lp.upper.empty() ? kInfinity : lp.upper[j];
    set_var_bounds(j, lo, hi);
  }
  for (const auto& row : lp.constraints) add_row(row.coeffs, row.sense, row.rhs);
}

void SimplexSolver::set_objective(std::vector<double> objective) {
  if (static_cast<int>(objective.size()) != n_)
    throw std::invalid_argument("objective size does not match variable count");
  c_ = std::move(objective);
}

void SimplexSolver::set_objective_sparse(const SparseRow& objective) {
  std::fill(c_.begin(), c_.end(), 0.0);
  for (const auto& [j, v] : objective) c_[j] += v;
}

void SimplexSolver::set_var_bounds(int var, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("variable lower bound exceeds upper bound");
  lo_[var] = lower;
  hi_[var] = upper;
}

int SimplexSolver::add_row(SparseRow coeffs, Sense sense, double rhs) {
  const int r = num_rows();
  for (const auto& [j, a] : coeffs) {
    if (j < 0 || j >= n_) throw std::invalid_argument("row refers to an unknown variable");
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite row coefficient");
  }
  if (!cols_dirty_)
    for (const auto& [j, a] : coeffs) cols_[j].emplace_back(r, a);
  rows_.push_back(std::move(coeffs));
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  active_.push_back(1);
  row_pos_.push_back(-1);
  xr_.push_back(0.0);
  return r;
}

void SimplexSolver::set_rhs(int row, double rhs) { rhs_[row] = rhs; }

void SimplexSolver::set_row_active(int row, bool active) { active_[row] = active ? 1 : 0; }

double SimplexSolver::logical_lower(int r) const {
  if (!active_[r] || sense_[r] == Sense::kLessEqual) return -kInfinity;
  return rhs_[r];
}

double SimplexSolver::logical_upper(int r) const {
  if (!active_[r] || sense_[r] == Sense::kGreaterEqual) return kInfinity;
  return rhs_[r];
}

void SimplexSolver::remove_rows(std::vector<int> rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (rows.empty()) return;
  std::vector<char> drop(num_rows(), 0);
  bool basis_hit = false;
  for (int r : rows) {
    drop[r] = 1;
    if (row_pos_[r] >= 0) basis_hit = true;
  }
  if (basis_hit) reset_basis();
  std::vector<int> remap(num_rows(), -1);
  int next = 0;
  for (int r = 0; r < num_rows(); ++r) {
    if (drop[r]) continue;
    remap[r] = next;
    if (next != r) rows_[next] = std::move(rows_[r]);
    sense_[next] = sense_[r];
    rhs_[next] = rhs_[r];
    active_[next] = active_[r];
    row_pos_[next] = row_pos_[r];
    xr_[next] = xr_[r];
    ++next;
  }
  rows_.resize(next);
  sense_.resize(next);
  rhs_.resize(next);
  active_.resize(next);
  row_pos_.resize(next);
  xr_.resize(next);
  for (int& r : tight_rows_) r = remap[r];
  cols_dirty_ = true;
}

void SimplexSolver::reset_basis() {
  for (int j : basic_cols_) col_pos_[j] = -1;
  for (int r : tight_rows_) row_pos_[r] = -1;
  basic_cols_.clear();
  tight_rows_.clear();
  factor_->valid = false;
}

void SimplexSolver::rebuild_columns() {
  cols_.assign(n_, {});
  for (int r = 0; r < num_rows(); ++r)
    for (const auto& [j, a] : rows_[r]) cols_[j].emplace_back(r, a);
  cols_dirty_ = false;
}

void SimplexSolver::prepare() {
  if (cols_dirty_) rebuild_columns();
  for (int j = 0; j < n_; ++j) {
    if (col_pos_[j] >= 0) continue;
    xs_[j] = std::clamp(xs_[j], lo_[j], hi_[j]);
    if (!std::isfinite(xs_[j])) xs_[j] = 0.0;
  }
  for (int r : tight_rows_) {
    xr_[r] = std::clamp(xr_[r], logical_lower(r), logical_upper(r));
    if (!std::isfinite(xr_[r])) xr_[r] = 0.0;
  }
}

LpResult SimplexSolver::solve() {
  prepare();
  const int m = num_rows();
  const int limit = iteration_limit_ > 0 ? iteration_limit_ : std::max(10000, 20 * (m + n_));
  const int bland_after = 5 * (m + n_);

  LpResult res;
  int degenerate = 0;
  int recoveries = 0;
  bool bland = false;
  // Harris steps can leave small infeasibilities that send a solve back to
  // phase 1 and around a cycle of nondegenerate pivots. Without a new best
  // phase-2 objective for bland_after iterations, Bland's rule stays on.
  double best_objective = -kInfinity;
  int since_best = 0;
  bool stalled = false;

  Factor& f = *factor_;
  Eigen::MatrixXd kernel;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::VectorXd w;
  std::vector<double> cost_s(n_, 0.0), cost_r(m, 0.0);
  std::vector<double> pi(m, 0.0), g(n_, 0.0), dxr(m, 0.0), dxs(n_, 0.0);
  std::vector<int> touched;

  // Kernel coefficients of row r on the current basic columns.
  auto kernel_row = [&](int r) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basic_cols_.size()));
    for (const auto& [j, a] : rows_[r])
      if (col_pos_[j] >= 0) v(col_pos_[j]) += a;
    return v;
  };
  // Rank-one update of f.inv for the pivot, applied before the index lists
  // change. Small pivots defer to a refactorization instead.
  auto update_factor = [&](int entering, int leaving) {
    const Eigen::Index k = f.inv.rows();
    ++f.updates;
    if (entering < n_ && leaving < n_) {
      // Column p of the kernel replaced by the entering column.
      const int p = col_pos_[leaving];
      if (std::abs(w(p)) < kUpdatePivotTol) {
        f.valid = false;
        return;
      }
      const Eigen::RowVectorXd rp = f.inv.row(p) / w(p);
      f.inv.noalias() -= w * rp;
      f.inv.row(p) = rp;
    } else if (entering >= n_ && leaving >= n_) {
      // Row t of the kernel replaced by the leaving row.
      const int t = row_pos_[entering - n_];
      const Eigen::RowVectorXd z = kernel_row(leaving - n_).transpose() * f.inv;
      if (std::abs(z(t)) < kUpdatePivotTol) {
        f.valid = false;
        return;
      }
      const Eigen::VectorXd u = f.inv.col(t);
      Eigen::RowVectorXd zt = z;
      zt(t) -= 1.0;
      f.inv.noalias() -= (u / z(t)) * zt;
    } else if (leaving < n_) {
      // Basic column p and tight row t both leave; the last ones take their slots.
      const int p = col_pos_[leaving];
      const int t = row_pos_[entering - n_];
      const double piv = f.inv(p, t);
      if (std::abs(piv) < kUpdatePivotTol) {
        f.valid = false;
        return;
      }
      const Eigen::VectorXd u = f.inv.col(t);
      const Eigen::RowVectorXd v = f.inv.row(p) / piv;
      f.inv.noalias() -= u * v;
      f.inv.row(p) = f.inv.row(k - 1);
      f.inv.col(t) = f.inv.col(k - 1);
      f.inv.conservativeResize(k - 1, k - 1);
    } else {
      // Bordered growth: a new tight row and a new basic column.
      const int r = leaving - n_;
      double delta = 0.0;
      for (const auto& [j, a] : rows_[r])
        if (j == entering) delta += a;
      if (k == 0) {
        if (std::abs(delta) < kUpdatePivotTol) {
          f.valid = false;
          return;
        }
        f.inv.resize(1, 1);
        f.inv(0, 0) = 1.0 / delta;
        return;
      }
      const Eigen::VectorXd rv = kernel_row(r);
      const Eigen::RowVectorXd v = rv.transpose() * f.inv;
      const double sch = delta - rv.dot(w);
      if (std::abs(sch) < kUpdatePivotTol) {
        f.valid = false;
        return;
      }
      Eigen::MatrixXd next(k + 1, k + 1);
      next.topLeftCorner(k, k) = f.inv + (w / sch) * v;
      next.topRightCorner(k, 1) = -w / sch;
      next.bottomLeftCorner(1, k) = -v / sch;
      next(k, k) = 1.0 / sch;
      f.inv = std::move(next);
    }
  };

  auto lower_of = [&](int v) { return v < n_ ? lo_[v] : logical_lower(v - n_); };
  auto upper_of = [&](int v) { return v < n_ ? hi_[v] : logical_upper(v - n_); };
  auto value_of = [&](int v) -> double& { return v < n_ ? xs_[v] : xr_[v - n_]; };

  for (int iter = 0;; ++iter) {
    if (iter >= limit) {
      res.status = LpStatus::kIterationLimit;
      break;
    }
    const int k = static_cast<int>(basic_cols_.size());

    // Refactor the kernel when due, then recompute the primal point.
    if (!f.valid || f.updates >= kRefactorEvery || f.inv.rows() != k) {
      f.inv.resize(k, k);
      if (k > 0) {
        kernel.setZero(k, k);
        for (int t = 0; t < k; ++t)
          for (const auto& [j, a] : rows_[tight_rows_[t]])
            if (col_pos_[j] >= 0) kernel(t, col_pos_[j]) = a;
        lu.compute(kernel);
        if (!(lu.rcond() > kMinRcond)) {
          if (++recoveries > 5) {
            res.status = LpStatus::kNumericalError;
            break;
          }
          reset_basis();
          prepare();
          continue;
        }
        f.inv = lu.inverse();
      }
      f.valid = true;
      f.updates = 0;
    }
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int t = 0; t < k; ++t) {
        const int r = tight_rows_[t];
        double v = xr_[r];
        for (const auto& [j, a] : rows_[r])
          if (col_pos_[j] < 0) v -= a * xs_[j];
        rhs(t) = v;
      }
      const Eigen::VectorXd sol = f.inv * rhs;
      for (int p = 0; p < k; ++p) xs_[basic_cols_[p]] = sol(p);
    }
    for (int r = 0; r < m; ++r) {
      if (row_pos_[r] >= 0) continue;
      double v = 0.0;
      for (const auto& [j, a] : rows_[r]) v += a * xs_[j];
      xr_[r] = v;
    }

    // Phase selection: composite infeasibility costs on basics.
    bool phase1 = false;
    for (int j : basic_cols_) {
      cost_s[j] = xs_[j] < lo_[j] - kFeasibilityTol ? 1.0 : xs_[j] > hi_[j] + kFeasibilityTol ? -1.0 : 0.0;
      if (cost_s[j] != 0.0) phase1 = true;
    }
    for (int r = 0; r < m; ++r) {
      cost_r[r] = 0.0;
      if (row_pos_[r] >= 0) continue;
      if (xr_[r] < logical_lower(r) - kFeasibilityTol) cost_r[r] = 1.0;
      else if (xr_[r] > logical_upper(r) + kFeasibilityTol) cost_r[r] = -1.0;
      if (cost_r[r] != 0.0) phase1 = true;
    }
    if (!phase1) {
      for (int j : basic_cols_) cost_s[j] = c_[j];
      double objective = 0.0;
      for (int j = 0; j < n_; ++j) objective += c_[j] * xs_[j];
      if (objective > best_objective + 1e-12 * (1.0 + std::abs(objective))) {
        best_objective = objective;
        since_best = 0;
      }
    }
    if (std::isfinite(best_objective) && ++since_best > bland_after) stalled = bland = true;

    // Duals.
    for (int r = 0; r < m; ++r) pi[r] = row_pos_[r] >= 0 ? 0.0 : -cost_r[r];
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (int p = 0; p < k; ++p) rhs(p) = cost_s[basic_cols_[p]];
      if (phase1) {
        for (int r = 0; r < m; ++r) {
          if (row_pos_[r] >= 0 || pi[r] == 0.0) continue;
          for (const auto& [j, a] : rows_[r])
            if (col_pos_[j] >= 0) rhs(col_pos_[j]) -= a * pi[r];
        }
      }
      const Eigen::VectorXd pt = f.inv.transpose() * rhs;
      for (int t = 0; t < k; ++t) pi[tight_rows_[t]] = pt(t);
    }
    std::fill(g.begin(), g.end(), 0.0);
    for (int r = 0; r < m; ++r) {
      if (pi[r] == 0.0) continue;
      for (const auto& [j, a] : rows_[r]) g[j] += a * pi[r];
    }

    // Pricing.
    auto reduced = [&](int v) {
      if (v < n_) return (phase1 ? 0.0 : c_[v]) - g[v];
      return pi[v - n_];
    };
    int entering = -1;
    double best = 0.0;
    auto consider = [&](int v) {
      const double d = reduced(v);
      const double val = value_of(v);
      const bool up = d > kOptimalityTol && val < upper_of(v);
      const bool down = d < -kOptimalityTol && val > lower_of(v);
      if (!up && !down) return;
      if (bland) {
        if (entering < 0) entering = v;
      } else if (std::abs(d) > best) {
        best = std::abs(d);
        entering = v;
      }
    };
    for (int j = 0; j < n_ && !(bland && entering >= 0); ++j)
      if (col_pos_[j] < 0) consider(j);
    for (int r = 0; r < m && !(bland && entering >= 0); ++r)
      if (row_pos_[r] >= 0) consider(n_ + r);

    if (entering < 0) {
      res.status = phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;
      break;
    }
    const double sigma = reduced(entering) > 0.0 ? 1.0 : -1.0;

    // Direction of the basics per unit step of the entering variable.
    // w = K⁻¹ times the entering kernel column.
    if (k > 0) {
      if (entering < n_) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
        for (const auto& [r, a] : cols_[entering])
          if (row_pos_[r] >= 0) rhs(row_pos_[r]) = a;
        w = f.inv * rhs;
        for (int p = 0; p < k; ++p) dxs[basic_cols_[p]] = -sigma * w(p);
      } else {
        w = f.inv.col(row_pos_[entering - n_]);
        for (int p = 0; p < k; ++p) dxs[basic_cols_[p]] = sigma * w(p);
      }
    }
    touched.clear();
    auto spread = [&](int j, double dj) {
      if (dj == 0.0) return;
      for (const auto& [r, a] : cols_[j]) {
        if (row_pos_[r] >= 0) continue;
        if (dxr[r] == 0.0) touched.push_back(r);
        dxr[r] += a * dj;
        if (dxr[r] == 0.0) dxr[r] = 1e-300;  // keep it registered as touched
      }
    };
    for (int j : basic_cols_) spread(j, dxs[j]);
    if (entering < n_) spread(entering, sigma);

    // Harris two-pass ratio test.
    const double own_range =
        sigma > 0 ? upper_of(entering) - value_of(entering) : value_of(entering) - lower_of(entering);
    auto ratios = [&](int v, double delta, double& relaxed, double& exact, double& bound) {
      relaxed = exact = kInfinity;
      if (std::abs(delta) <= kPivotTol) return;
      const double val = value_of(v), lo = lower_of(v), hi = upper_of(v);
      if (val < lo - kFeasibilityTol) {
        if (delta > 0) {
          relaxed = exact = (lo - val) / delta;
          bound = lo;
        }
      } else if (val > hi + kFeasibilityTol) {
        if (delta < 0) {
          relaxed = exact = (val - hi) / -delta;
          bound = hi;
        }
      } else if (delta > 0 && std::isfinite(hi)) {
        relaxed = (hi + kFeasibilityTol - val) / delta;
        exact = std::max(0.0, (hi - val) / delta);
        bound = hi;
      } else if (delta < 0 && std::isfinite(lo)) {
        relaxed = (val - lo + kFeasibilityTol) / -delta;
        exact = std::max(0.0, (val - lo) / -delta);
        bound = lo;
      }
    };
    double theta_relaxed = kInfinity;
    {
      double rel, ex, bd;
      for (int j : basic_cols_) {
        ratios(j, dxs[j], rel, ex, bd);
        theta_relaxed = std::min(theta_relaxed, rel);
      }
      for (int r : touched) {
        ratios(n_ + r, dxr[r], rel, ex, bd);
        theta_relaxed = std::min(theta_relaxed, rel);
      }
    }
    int leaving = -1;
    double leave_theta = kInfinity, leave_bound = 0.0, leave_mag = 0.0;
    auto pick = [&](int v, double delta) {
      double rel, ex, bd = 0.0;
      ratios(v, delta, rel, ex, bd);
      if (!std::isfinite(ex)) return;
      if (bland) {
        if (ex < leave_theta - kDegenerateStep ||
            (ex <= leave_theta + kDegenerateStep && (leaving < 0 || v < leaving))) {
          leaving = v;
          leave_theta = ex;
          leave_bound = bd;
        }
      } else if (ex <= theta_relaxed && std::abs(delta) > leave_mag) {
        leaving = v;
        leave_theta = ex;
        leave_bound = bd;
        leave_mag = std::abs(delta);
      }
    };
    for (int j : basic_cols_) pick(j, dxs[j]);
    for (int r : touched) pick(n_ + r, dxr[r]);

    const bool flip = std::isfinite(own_range) && own_range <= leave_theta;
    if (leaving < 0 && !flip) {
      res.status = phase1 ? LpStatus::kNumericalError : LpStatus::kUnbounded;
      for (int r : touched) dxr[r] = 0.0;
      break;
    }
    const double theta = flip ? own_range : leave_theta;
    for (int r : touched) dxr[r] = 0.0;

    if (theta <= kDegenerateStep) {
      if (++degenerate > bland_after) bland = true;
    } else {
      degenerate = 0;
      bland = stalled;
    }

    if (flip) {
      value_of(entering) = sigma > 0 ? upper_of(entering) : lower_of(entering);
      continue;
    }

    // Basis change. The leaving variable becomes nonbasic at the bound it hit.
    update_factor(entering, leaving);
    value_of(leaving) = leave_bound;
    if (entering < n_) value_of(entering) += sigma * theta;
    auto drop_col = [&](int j) {
      const int p = col_pos_[j];
      const int last = basic_cols_.back();
      basic_cols_[p] = last;
      col_pos_[last] = p;
      basic_cols_.pop_back();
      col_pos_[j] = -1;
    };
    auto drop_row = [&](int r) {
      const int t = row_pos_[r];
      const int last = tight_rows_.back();
      tight_rows_[t] = last;
      row_pos_[last] = t;
      tight_rows_.pop_back();
      row_pos_[r] = -1;
    };
    if (leaving < n_ && entering < n_) {
      const int p = col_pos_[leaving];
      basic_cols_[p] = entering;
      col_pos_[entering] = p;
      col_pos_[leaving] = -1;
    } else if (leaving < n_) {
      drop_col(leaving);
      drop_row(entering - n_);
    } else if (entering < n_) {
      col_pos_[entering] = static_cast<int>(basic_cols_.size());
      basic_cols_.push_back(entering);
      row_pos_[leaving - n_] = static_cast<int>(tight_rows_.size());
      tight_rows_.push_back(leaving - n_);
    } else {
      const int t = row_pos_[entering - n_];
      tight_rows_[t] = leaving - n_;
      row_pos_[leaving - n_] = t;
      row_pos_[entering - n_] = -1;
    }
    res.iterations = iter + 1;
  }

  total_iterations_ += res.iterations;
  res.x = xs_;
  double value = 0.0;
  for (int j = 0; j < n_; ++j) value += c_[j] * xs_[j];
  res.value = value;
  if (res.status == LpStatus::kOptimal) {
    res.duals = pi;
    res.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (col_pos_[j] < 0) res.reduced_costs[j] = c_[j] - g[j];
  }
  return res;
}

LinearProgram SimplexSolver::to_program() const {
  LinearProgram lp;
  lp.objective = c_;
  lp.lower = lo_;
  lp.upper = hi_;
  for (int r = 0; r < num_rows(); ++r)
    if (active_[r]) lp.constraints.push_back({rows_[r], sense_[r], rhs_[r]});
  return lp;
}

LpResult solve_lp(const LinearProgram& lp) {
  SimplexSolver solver(lp);
  return solver.solve();
}

double dual_objective(const LinearProgram& lp, const LpResult& result) {
  double total = 0.0;
  auto term = [&total](double mult, double lo, double hi) {
    if (std::abs(mult) < 1e-12) return;
    const double b = mult > 0 ? hi : lo;
    total += std::isfinite(b) ? mult * b : kInfinity;
  };
  for (int r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.constraints[r];
    const double lo = row.sense == Sense::kLessEqual ? -kInfinity : row.rhs;
    const double hi = row.sense == Sense::kGreaterEqual ? kInfinity : row.rhs;
    term(result.duals[r], lo, hi);
  }
  for (int j = 0; j < lp.num_vars(); ++j)
    term(result.reduced_costs[j], lp.lower.empty() ? -kInfinity : lp.lower[j],
         lp.upper.empty() ? kInfinity : lp.upper[j]);
  return total;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : lp.constraints) {
    double v = 0.0;
    for (const auto& [j, a] : row.coeffs) v += a * x[j];
    if (row.sense != Sense::kGreaterEqual) worst = std::max(worst, v - row.rhs);
    if (row.sense != Sense::kLessEqual) worst = std::max(worst, row.rhs - v);
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (!lp.lower.empty()) worst = std::max(worst, lp.lower[j] - x[j]);
    if (!lp.upper.empty()) worst = std::max(worst, x[j] - lp.upper[j]);
  }
  return worst;
}

void write_lp_format(const LinearProgram& lp, std::ostream& os) {
  auto term = [&os](double a, int j, bool first) {
    if (a < 0) os << (first ? "- " : " - ");
    else if (!first) os << " + ";
    os << std::abs(a) << " x" << j;
  };
  os.precision(17);
  os << "Maximize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.objective[j] == 0.0) continue;
    os << ' ';
    term(lp.objective[j], j, first);
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  for (int r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.constraints[r];
    os << " c" << r << ":";
    bool f = true;
    for (const auto& [j, a] : row.coeffs) {
      os << ' ';
      term(a, j, f);
      f = false;
    }
    if (f) os << " 0 x0";
    os << (row.sense == Sense::kLessEqual ? " <= " : row.sense == Sense::kGreaterEqual ? " >= " : " = ")
       << row.rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower.empty() ? -kInfinity : lp.lower[j];
    const double hi = lp.upper.empty() ? kInfinity : lp.upper[j];
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << " x" << j << " free\n";
    } else {
      os << ' ';
      if (std::isfinite(lo)) os << lo; else os << "-inf";
      os << " <= x" << j << " <= ";
      if (std::isfinite(hi)) os << hi; else os << "+inf";
      os << "\n";
    }
  }
  os << "End\n";
}

}  // namespace chsvi
