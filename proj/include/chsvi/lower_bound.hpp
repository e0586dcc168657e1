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
#include <optional>
#include <vector>

#include "chsvi/model.hpp"

namespace chsvi {

struct AlphaVector {
  int stage = 0;
  std::vector<double> values;
  std::optional<Prescription> tag;  // empty at the chance stage
  std::int64_t birth = 0;
};

struct LbValue {
  double value = 0.0;
  int index = -1;  // argmax in the stage's vector list
};

/// Piecewise-linear convex lower bounds, one vector set per stage.
class LowerBoundSet {
 public:
  static constexpr int kPruneEvery = 64;

  explicit LowerBoundSet(const StagedModel& staged);

  const StagedModel& staged() const { return *staged_; }
  const std::vector<AlphaVector>& vectors(int stage) const { return sets_[stage]; }
  int size(int stage) const { return static_cast<int>(sets_[stage].size()); }

  /// max over the stage's vectors of αᵀb; ties go to the oldest vector.
  LbValue value(const StagedBelief& b) const;

  /// Point-based backup at b (not inserted). Its inner product with b is the
  /// one-step lookahead value of the current bound.
  AlphaVector backup(const StagedBelief& b) const;

  /// backup + insert; prunes the stage every kPruneEvery insertions.
  AlphaVector update(const StagedBelief& b);

  /// Appends a vector (assigns its birth stamp).
  void insert(AlphaVector alpha);

  /// Removes pointwise-dominated vectors, keeping the older of equal pairs.
  int prune(int stage);

  /// Inner-loop iterations spent in prescription-stage backups.
  std::int64_t backup_operations() const { return ops_; }
  void set_auto_prune(bool on) { auto_prune_ = on; }

 private:
  AlphaVector backup_prescription(const StagedBelief& b) const;
  AlphaVector backup_chance(const StagedBelief& b) const;
  void refresh_fallback_all();
  void refresh_fallback(int index);

  const StagedModel* staged_;
  std::vector<std::vector<AlphaVector>> sets_;
  std::vector<int> since_prune_;
  std::vector<int> checked_;  // vectors [0, checked_) are mutually non-dominated
  std::int64_t births_ = 0;
  mutable std::int64_t ops_ = 0;
  bool auto_prune_ = true;

  // composites_by_label_[stage][label] lists the stage composites whose acting
  // agent holds that label.
  std::vector<std::vector<std::vector<int>>> composites_by_label_;
  // Observation weights w_o(s') = Σ_x Pr(s', o | x) over all chance-stage
  // composites, used to pick the next-stage vector for observations that the
  // belief cannot produce.
  std::vector<std::vector<std::pair<int, double>>> obs_weights_;
  std::vector<int> fallback_;  // per observation: index into sets_[0]
  std::vector<double> fallback_score_;
};

/// Blind-policy initialization: V⁰ holds the value of repeating each joint
/// action forever, the chance stage holds one-step lookaheads on those, and
/// intermediate stages hold sections fixing the remaining agents' actions.
LowerBoundSet init_lower_bound(const StagedModel& staged);

/// Value vectors α_a = (I − βP_a)⁻¹ r_a over S, one per joint action.
std::vector<std::vector<double>> blind_policy_values(const DecModel& model);

}  // namespace chsvi
