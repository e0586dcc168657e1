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

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "chsvi/bilinear.hpp"
#include "chsvi/lp.hpp"
#include "chsvi/model.hpp"

namespace chsvi {

enum class ConstraintGroup {
  kBox,       // v_min <= y <= cap, kept as variable bounds
  kBelief,    // bᵀy <= v̄ from updates
  kLink,      // y(x) - ȳ(s(x)) <= 0
  kMarginal,  // (b¹)ᵀȳ <= v̄ (stage 0: (b¹)ᵀy <= v̄)
  kSelection, // Σ_s b¹(s) y(σ(s)) <= v̄, one composite σ(s) per state: implied by a marginal group
};

/// One α-constraint. Variables 0..|S^ℓ|-1 are y; stages above 0 append the
/// auxiliary marginal vector ȳ over S.
struct AlphaConstraint {
  int stage = 0;
  ConstraintGroup group = ConstraintGroup::kBelief;
  SparseRow coeffs;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

struct UbUpdate {
  double value = 0.0;     // v̄ᵇ
  double previous = 0.0;  // U(b) before the update
  bool inserted = false;  // false when v̄ᵇ does not cut below U(b)
  std::optional<Prescription> gamma;
  bool exact = true;
};

/// Upper bounds U^ℓ(b) = max { bᵀy : y satisfies C^ℓ }, one persistent LP per
/// stage. Initially box-only with v_min <= y <= v_max.
///
/// Marginal groups at stages above 0 are not put in the LP as written. Their
/// projection onto y is the family of selection rows, one per choice σ of a
/// composite for every state; after each solve the most violated selection of
/// every group is added until none is violated.
class UpperBoundSet {
 public:
  static constexpr int kPruneEvery = 32;
  static constexpr double kRedundancyTol = 1e-9;

  explicit UpperBoundSet(const StagedModel& staged, BpMode mode = BpMode::kAuto);
  UpperBoundSet(UpperBoundSet&&) noexcept;
  UpperBoundSet& operator=(UpperBoundSet&&) noexcept;
  ~UpperBoundSet();

  const StagedModel& staged() const { return *staged_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  BpMode bp_mode() const { return mode_; }
  /// False once a heuristic (non-exact) BP result has been inserted.
  bool certified() const { return certified_; }

  double value(const StagedBelief& b);
  /// One-step lookahead v̄ᵇ and, at prescription stages, its maximizer.
  UbUpdate backup(const StagedBelief& b);
  /// backup + insertion of bᵀy <= v̄ᵇ when it cuts below U(b). A stage is
  /// pruned once its insertions since the last prune reach kPruneEvery and
  /// half the belief rows that prune kept.
  UbUpdate update(const StagedBelief& b);

  /// Tightens the box of stage `stage` to [lower, upper] componentwise.
  void set_box(int stage, const std::vector<double>& lower, const std::vector<double>& upper);
  /// Adds a relaxed-problem row over S. At stage 0 it constrains y directly;
  /// at later stages it constrains ȳ, linked to y by y(x) <= ȳ(s(x)).
  void add_marginal_row(int stage, const std::vector<double>& b1, double value);
  /// Adds bᵀy <= value over the stage variables.
  void add_belief_row(int stage, const std::vector<double>& b, double value);

  /// Removes redundant belief rows (box, link and marginal rows stay).
  int prune(int stage);
  void set_auto_prune(bool on) { auto_prune_ = on; }
  /// Seeds the random starts of the heuristic BP mode.
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  int belief_rows(int stage) const;
  /// C^ℓ in its stated form: box, belief, link and marginal rows over y and ȳ.
  std::vector<AlphaConstraint> constraints(int stage) const;
  /// constraints(stage) as a standalone program (zero objective).
  LinearProgram program(int stage) const;
  /// The working LP: y only, with generated selection rows.
  SimplexSolver& solver(int stage) { return *solvers_[stage]; }
  /// Adds the most violated selection row of every violated marginal group
  /// at `result`; returns false when there is none. In that case result.x is
  /// replaced by the point with zero-objective coordinates at their lower
  /// bounds, which satisfies every group.
  bool separate(int stage, const SparseRow& objective, LpResult& result);

  std::int64_t lp_solves() const { return lp_solves_; }
  std::int64_t bp_solves() const { return bp_solves_; }

 private:
  struct MarginalGroup {
    SparseRow b1;  // over S
    double value = 0.0;
  };

  double solve_at(int stage, const SparseRow& objective);

  const StagedModel* staged_;
  BpMode mode_;
  double v_min_, v_max_;
  std::vector<std::unique_ptr<SimplexSolver>> solvers_;
  std::vector<std::vector<ConstraintGroup>> groups_;  // per solver row
  std::vector<std::vector<MarginalGroup>> marginals_;  // stages above 0
  std::vector<std::vector<std::vector<int>>> by_state_;  // [stage][s] -> composites
  std::vector<int> since_prune_;
  std::vector<int> kept_at_prune_;
  bool auto_prune_ = true;
  bool certified_ = true;
  std::int64_t lp_solves_ = 0;
  std::int64_t bp_solves_ = 0;
  std::uint64_t bp_calls_ = 0;
  std::uint64_t seed_ = 0;
};

/// max r / (1 − β) and min r / (1 − β) over the base model.
double value_upper_limit(const DecModel& model);
double value_lower_limit(const DecModel& model);

}  // namespace chsvi
