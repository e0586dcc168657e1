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

#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chsvi {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kOptimalityTol = 1e-9;

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalError };

std::string to_string(LpStatus status);

/// Raised by callers that cannot continue after a failed LP.
class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SparseRow = std::vector<std::pair<int, double>>;

struct LpConstraint {
  SparseRow coeffs;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// maximize objectiveᵀx subject to the constraints and lower <= x <= upper.
/// Empty bound vectors mean free variables.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpConstraint> constraints;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(constraints.size()); }
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalError;
  double value = 0.0;
  std::vector<double> x;
  /// One multiplier per constraint. For a maximization, a binding <= row has
  /// a nonnegative dual and a binding >= row a nonpositive one.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

/// Bounded-variable primal revised simplex.
///
/// Rows are carried as logical variables r = Ax whose bounds encode the row
/// sense. The basis is represented by its kernel: the square submatrix of A
/// formed by the rows whose logical is nonbasic and the basic structural
/// columns. The kernel is usually much smaller than the row count, which is
/// what makes long lists of cutting rows cheap to carry.
///
/// The basis survives objective changes, bound changes, row additions and row
/// deactivation, so consecutive solves warm start.
class SimplexSolver {
 public:
  explicit SimplexSolver(int num_vars);
  explicit SimplexSolver(const LinearProgram& lp);
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;
  ~SimplexSolver();

  int num_vars() const { return n_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  void set_objective(std::vector<double> objective);
  void set_objective_sparse(const SparseRow& objective);
  void set_var_bounds(int var, double lower, double upper);
  double var_lower(int var) const { return lo_[var]; }
  double var_upper(int var) const { return hi_[var]; }

  int add_row(SparseRow coeffs, Sense sense, double rhs);
  void set_rhs(int row, double rhs);
  /// An inactive row keeps its coefficients but imposes nothing.
  void set_row_active(int row, bool active);
  bool row_active(int row) const { return active_[row] != 0; }
  const SparseRow& row(int r) const { return rows_[r]; }
  Sense row_sense(int r) const { return sense_[r]; }
  double row_rhs(int r) const { return rhs_[r]; }

  /// Deletes rows; the remaining rows keep their relative order.
  void remove_rows(std::vector<int> rows);

  /// Drops the basis (keeps the current point as a starting guess).
  void reset_basis();

  LpResult solve();

  /// The active program as a standalone LinearProgram.
  LinearProgram to_program() const;

  void set_iteration_limit(int limit) { iteration_limit_ = limit; }
  long long total_iterations() const { return total_iterations_; }
  /// Dimension of the current basis kernel.
  int kernel_size() const { return static_cast<int>(basic_cols_.size()); }

 private:
  struct Factor;

  void rebuild_columns();
  void row_bounds(int r, double& lo, double& hi) const;
  double logical_lower(int r) const;
  double logical_upper(int r) const;
  void prepare();

  int n_;
  std::vector<double> c_;
  std::vector<double> lo_, hi_;
  std::vector<SparseRow> rows_;
  std::vector<Sense> sense_;
  std::vector<double> rhs_;
  std::vector<char> active_;

  std::vector<std::vector<std::pair<int, double>>> cols_;  // [var] -> (row, coeff)
  bool cols_dirty_ = true;

  // Basis: basic structurals J and rows with nonbasic logical T, |J| == |T|.
  std::vector<int> basic_cols_;
  std::vector<int> tight_rows_;
  std::vector<int> col_pos_;  // position in basic_cols_ or -1
  std::vector<int> row_pos_;  // position in tight_rows_ or -1

  std::vector<double> xs_;  // structural values
  std::vector<double> xr_;  // row activities (logical values)

  // Explicit kernel inverse, updated in place across pivots and solves.
  std::unique_ptr<Factor> factor_;

  int iteration_limit_ = 0;  // 0: automatic
  long long total_iterations_ = 0;
};

LpResult solve_lp(const LinearProgram& lp);

/// Objective of the dual solution implied by `result` (rows and bounds
/// weighted by their multipliers). Equals result.value at an optimum.
double dual_objective(const LinearProgram& lp, const LpResult& result);

/// Largest violation of a row or a bound by `x`.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

/// Writes the program in CPLEX LP text format.
void write_lp_format(const LinearProgram& lp, std::ostream& os);

}  // namespace chsvi
