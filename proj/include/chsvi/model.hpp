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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chsvi {

/// Tolerance used when checking that probability vectors sum to one.
inline constexpr double kProbabilityTolerance = 1e-9;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Transition {
  int next_state = 0;
  int observation = 0;
  double prob = 0.0;

  bool operator==(const Transition&) const = default;
};

/// A cooperative multi-agent control model in which each agent's private
/// information is a fixed function of the (augmented) state.
///
/// Joint actions are indexed in mixed radix with the first agent most
/// significant, so that `joint = ((a1 * |A2|) + a2) * |A3| + a3 ...`. Kernel
/// and reward rows are stored at `state * num_joint_actions() + joint`.
struct DecModel {
  std::vector<std::string> agents;
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;         // [agent][action]
  std::vector<std::vector<std::string>> private_labels;  // [agent][label]
  std::vector<std::vector<int>> private_of_state;        // [state][agent]
  std::vector<std::string> observations;
  std::vector<double> b0;
  std::vector<std::vector<Transition>> kernel;  // [state * |A| + joint]
  std::vector<double> reward;                   // [state * |A| + joint]
  double discount = 0.9;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_states() const { return static_cast<int>(states.size()); }
  int num_observations() const { return static_cast<int>(observations.size()); }
  int num_actions(int agent) const {
    return static_cast<int>(actions[agent].size());
  }
  int num_labels(int agent) const {
    return static_cast<int>(private_labels[agent].size());
  }
  int num_joint_actions() const;

  int joint_action(std::span<const int> per_agent) const;
  std::vector<int> split_joint_action(int joint) const;

  std::size_t row(int state, int joint) const {
    return static_cast<std::size_t>(state) * num_joint_actions() + joint;
  }
  const std::vector<Transition>& transitions(int state, int joint) const {
    return kernel[row(state, joint)];
  }
  double reward_at(int state, int joint) const { return reward[row(state, joint)]; }

  double min_reward() const;
  double max_reward() const;

  bool operator==(const DecModel&) const = default;
};

struct Violation {
  std::string kind;      // e.g. "row mass", "b0 mass"
  std::string location;  // human-readable position of the offending datum
  std::string message;
};

/// Checks every structural invariant of the model. An empty result means the
/// model is valid; violations are data, never thrown.
std::vector<Violation> validate_model(const DecModel& model);

std::string format_report(const std::vector<Violation>& report);

/// Agent `agent`'s mapping from its private labels to its actions.
struct Prescription {
  int agent = 0;
  std::vector<int> map;  // [label] -> action

  int operator()(int label) const { return map[label]; }
  bool indicator(int action, int label) const { return map[label] == action; }

  static Prescription constant(int agent, int num_labels, int action) {
    return {agent, std::vector<int>(num_labels, action)};
  }
  bool operator==(const Prescription&) const = default;
};

/// Number of prescriptions |A^i|^|M^i| as a double (it overflows integers
/// quickly).
double prescription_count(const DecModel& model, int agent);

/// Extended coordinator's model: each time step is split into one
/// prescription stage per agent (stages 0..n-1) followed by a chance stage n.
/// Stage l lives on S x A^1 x ... x A^l, indexed as
/// `((s * |A^1| + a^1) * |A^2| + a^2) ...`, so advancing a stage-l index by
/// agent l+1's action `a` gives `x * |A^{l+1}| + a`.
class StagedModel {
 public:
  explicit StagedModel(DecModel model);

  const DecModel& base() const { return base_; }
  int num_agents() const { return base_.num_agents(); }
  int chance_stage() const { return base_.num_agents(); }
  int num_stages() const { return base_.num_agents() + 1; }
  int stage_size(int stage) const { return stage_size_[stage]; }
  double discount() const { return base_.discount; }

  /// Base state of a stage-l composite state.
  int base_state(int stage, int composite) const {
    return composite / action_block_[stage];
  }
  /// Private label, for the agent acting at stage l, of a stage-l composite.
  int acting_label(int stage, int composite) const {
    return base_.private_of_state[base_state(stage, composite)][stage];
  }
  int child(int stage, int composite, int action) const {
    return composite * base_.num_actions(stage) + action;
  }

  int compose(int stage, int state, std::span<const int> actions) const;
  /// Returns (state, a^1..a^l).
  std::pair<int, std::vector<int>> decompose(int stage, int composite) const;

  /// Reward attached to a chance-stage composite (s, a).
  double stage_reward(int composite) const { return base_.reward[composite]; }
  const std::vector<Transition>& chance_kernel(int composite) const {
    return base_.kernel[composite];
  }

 private:
  DecModel base_;
  std::vector<int> stage_size_;
  std::vector<int> action_block_;  // prod_{j<=l} |A^j|
};

/// Belief over the stage-l composite state space.
struct StagedBelief {
  int stage = 0;
  std::vector<double> probs;

  double mass() const;
  std::vector<int> support() const;
  bool operator==(const StagedBelief&) const = default;
};

StagedBelief initial_belief(const StagedModel& staged);

/// Pushes a stage-l belief through agent l+1's prescription.
StagedBelief advance_prescription(const StagedModel& staged,
                                  const StagedBelief& belief,
                                  const Prescription& prescription);

struct ChanceOutcome {
  double prob = 0.0;  // Pr(o | b)
  std::optional<StagedBelief> posterior;
};

/// Chance-stage update for one observation. No posterior is produced when the
/// observation has zero probability.
ChanceOutcome advance_chance(const StagedModel& staged, const StagedBelief& belief,
                             int observation);

struct ChanceBranch {
  int observation = 0;
  double prob = 0.0;
  StagedBelief posterior;
};

/// All positive-probability chance outcomes of a stage-n belief, in increasing
/// observation order.
std::vector<ChanceBranch> chance_branches(const StagedModel& staged,
                                          const StagedBelief& belief);

/// Expected immediate reward r(b) of a chance-stage belief.
double expected_reward(const StagedModel& staged, const StagedBelief& belief);

}  // namespace chsvi
