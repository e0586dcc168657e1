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

#include "chsvi/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace chsvi {

int DecModel::num_joint_actions() const {
  int total = 1;
  for (const auto& a : actions) total *= static_cast<int>(a.size());
  return total;
}

int DecModel::joint_action(std::span<const int> per_agent) const {
  int joint = 0;
  for (int i = 0; i < num_agents(); ++i) joint = joint * num_actions(i) + per_agent[i];
  return joint;
}

std::vector<int> DecModel::split_joint_action(int joint) const {
  std::vector<int> out(num_agents());
  for (int i = num_agents() - 1; i >= 0; --i) {
    out[i] = joint % num_actions(i);
    joint /= num_actions(i);
  }
  return out;
}

double DecModel::min_reward() const {
  return reward.empty() ? 0.0 : *std::min_element(reward.begin(), reward.end());
}

double DecModel::max_reward() const {
  return reward.empty() ? 0.0 : *std::max_element(reward.begin(), reward.end());
}

std::vector<Violation> validate_model(const DecModel& model) {
  std::vector<Violation> out;
  auto add = [&out](std::string kind, std::string where, std::string msg) {
    out.push_back({std::move(kind), std::move(where), std::move(msg)});
  };

  if (model.agents.empty()) add("agents", "agents", "at least one agent is required");
  if (model.actions.size() != model.agents.size())
    add("actions", "actions", "one action list per agent is required");
  if (model.private_labels.size() != model.agents.size())
    add("private labels", "private_labels", "one label set per agent is required");
  if (!(model.discount >= 0.0 && model.discount < 1.0))
    add("discount", "discount", "discount must lie in [0, 1)");
  if (model.states.empty()) add("states", "states", "state set is empty");
  if (model.observations.empty())
    add("observations", "observations", "observation set is empty");
  for (std::size_t i = 0; i < model.actions.size(); ++i)
    if (model.actions[i].empty())
      add("actions", "actions[" + std::to_string(i) + "]", "empty action set");
  if (!out.empty()) return out;

  const int ns = model.num_states();
  const int na = model.num_joint_actions();
  const int no = model.num_observations();

  // Private information.
  if (static_cast<int>(model.private_of_state.size()) != ns) {
    add("private tuple", "private_of_state", "one private tuple per state is required");
  } else {
    std::vector<std::vector<bool>> attained(model.num_agents());
    for (int i = 0; i < model.num_agents(); ++i)
      attained[i].assign(model.num_labels(i), false);
    for (int s = 0; s < ns; ++s) {
      const auto& tuple = model.private_of_state[s];
      if (static_cast<int>(tuple.size()) != model.num_agents()) {
        add("private tuple", "states[" + model.states[s] + "]",
            "incomplete private-information tuple");
        continue;
      }
      for (int i = 0; i < model.num_agents(); ++i) {
        if (tuple[i] < 0 || tuple[i] >= model.num_labels(i)) {
          add("private tuple", "states[" + model.states[s] + "]",
              "private label out of range for agent " + model.agents[i]);
        } else {
          attained[i][tuple[i]] = true;
        }
      }
    }
    for (int i = 0; i < model.num_agents(); ++i)
      for (int m = 0; m < model.num_labels(i); ++m)
        if (!attained[i][m])
          add("private label", "private_labels[" + model.agents[i] + "]",
              "label '" + model.private_labels[i][m] + "' is attained by no state");
  }

  // Initial belief.
  if (static_cast<int>(model.b0.size()) != ns) {
    add("b0 size", "b0", "initial belief must cover every state");
  } else {
    double mass = 0.0;
    for (int s = 0; s < ns; ++s) {
      if (model.b0[s] < 0.0 || !std::isfinite(model.b0[s]))
        add("b0 negative", "b0[" + model.states[s] + "]", "negative or non-finite probability");
      mass += model.b0[s];
    }
    if (std::abs(mass - 1.0) > kProbabilityTolerance) {
      std::ostringstream msg;
      msg << "initial belief sums to " << mass;
      add("b0 mass", "b0", msg.str());
    }
  }

  // Kernel and reward.
  const std::size_t rows = static_cast<std::size_t>(ns) * na;
  if (model.kernel.size() != rows) {
    add("kernel size", "kernel", "kernel must have one row per (state, joint action)");
  } else {
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) {
        const auto& trs = model.kernel[model.row(s, a)];
        double mass = 0.0;
        bool bad_index = false;
        for (const auto& t : trs) {
          if (t.next_state < 0 || t.next_state >= ns || t.observation < 0 ||
              t.observation >= no)
            bad_index = true;
          if (t.prob < 0.0 || !std::isfinite(t.prob))
            add("negative probability", "kernel[" + model.states[s] + "," + std::to_string(a) + "]",
                "negative or non-finite transition probability");
          mass += t.prob;
        }
        const std::string where = "kernel[" + model.states[s] + ", joint " + std::to_string(a) + "]";
        if (bad_index) add("index range", where, "transition refers to an unknown state or observation");
        if (std::abs(mass - 1.0) > kProbabilityTolerance) {
          std::ostringstream msg;
          msg << "outgoing probabilities sum to " << mass;
          add("row mass", where, msg.str());
        }
      }
    }
  }
  if (model.reward.size() != rows) {
    add("reward size", "reward", "reward must have one entry per (state, joint action)");
  } else {
    for (std::size_t r = 0; r < rows; ++r)
      if (!std::isfinite(model.reward[r]))
        add("reward", "reward[" + std::to_string(r) + "]", "non-finite reward");
  }
  return out;
}

std::string format_report(const std::vector<Violation>& report) {
  std::ostringstream os;
  for (const auto& v : report) os << v.kind << " at " << v.location << ": " << v.message << "\n";
  return os.str();
}

double prescription_count(const DecModel& model, int agent) {
  return std::pow(static_cast<double>(model.num_actions(agent)), model.num_labels(agent));
}

StagedModel::StagedModel(DecModel model) : base_(std::move(model)) {
  auto report = validate_model(base_);
  if (!report.empty()) throw ModelError("invalid model:\n" + format_report(report));
  const int n = base_.num_agents();
  stage_size_.resize(n + 1);
  action_block_.resize(n + 1);
  action_block_[0] = 1;
  for (int l = 1; l <= n; ++l) action_block_[l] = action_block_[l - 1] * base_.num_actions(l - 1);
  for (int l = 0; l <= n; ++l) stage_size_[l] = base_.num_states() * action_block_[l];
}

int StagedModel::compose(int stage, int state, std::span<const int> actions) const {
  int x = state;
  for (int j = 0; j < stage; ++j) x = x * base_.num_actions(j) + actions[j];
  return x;
}

std::pair<int, std::vector<int>> StagedModel::decompose(int stage, int composite) const {
  std::vector<int> acts(stage);
  for (int j = stage - 1; j >= 0; --j) {
    acts[j] = composite % base_.num_actions(j);
    composite /= base_.num_actions(j);
  }
  return {composite, std::move(acts)};
}

double StagedBelief::mass() const {
  double m = 0.0;
  for (double p : probs) m += p;
  return m;
}

std::vector<int> StagedBelief::support() const {
  std::vector<int> out;
  for (int x = 0; x < static_cast<int>(probs.size()); ++x)
    if (probs[x] > 0.0) out.push_back(x);
  return out;
}

StagedBelief initial_belief(const StagedModel& staged) {
  return {0, staged.base().b0};
}

StagedBelief advance_prescription(const StagedModel& staged, const StagedBelief& belief,
                                  const Prescription& prescription) {
  const int stage = belief.stage;
  if (stage >= staged.chance_stage())
    throw std::invalid_argument("advance_prescription: belief is at the chance stage");
  if (prescription.agent != stage)
    throw std::invalid_argument("advance_prescription: prescription is for agent " +
                                std::to_string(prescription.agent) + " but stage " +
                                std::to_string(stage) + " belongs to agent " +
                                std::to_string(stage));
  StagedBelief out{stage + 1, std::vector<double>(staged.stage_size(stage + 1), 0.0)};
  for (int x = 0; x < static_cast<int>(belief.probs.size()); ++x) {
    const double p = belief.probs[x];
    if (p == 0.0) continue;
    out.probs[staged.child(stage, x, prescription(staged.acting_label(stage, x)))] = p;
  }
  return out;
}

namespace {

void check_chance(const StagedModel& staged, const StagedBelief& belief) {
  if (belief.stage != staged.chance_stage())
    throw std::invalid_argument("chance update requires a chance-stage belief");
}

}  // namespace

ChanceOutcome advance_chance(const StagedModel& staged, const StagedBelief& belief,
                             int observation) {
  check_chance(staged, belief);
  std::vector<double> next(staged.stage_size(0), 0.0);
  double total = 0.0;
  for (int x = 0; x < static_cast<int>(belief.probs.size()); ++x) {
    const double p = belief.probs[x];
    if (p == 0.0) continue;
    for (const auto& t : staged.chance_kernel(x)) {
      if (t.observation != observation) continue;
      next[t.next_state] += p * t.prob;
      total += p * t.prob;
    }
  }
  ChanceOutcome out;
  out.prob = total;
  if (total > 0.0) {
    for (double& v : next) v /= total;
    out.posterior = StagedBelief{0, std::move(next)};
  }
  return out;
}

std::vector<ChanceBranch> chance_branches(const StagedModel& staged,
                                          const StagedBelief& belief) {
  check_chance(staged, belief);
  std::map<int, std::vector<double>> unnormalized;
  const int n0 = staged.stage_size(0);
  for (int x = 0; x < static_cast<int>(belief.probs.size()); ++x) {
    const double p = belief.probs[x];
    if (p == 0.0) continue;
    for (const auto& t : staged.chance_kernel(x)) {
      if (t.prob == 0.0) continue;
      auto [it, inserted] = unnormalized.try_emplace(t.observation);
      if (inserted) it->second.assign(n0, 0.0);
      it->second[t.next_state] += p * t.prob;
    }
  }
  std::vector<ChanceBranch> out;
  out.reserve(unnormalized.size());
  for (auto& [o, vec] : unnormalized) {
    double total = 0.0;
    for (double v : vec) total += v;
    if (total <= 0.0) continue;
    for (double& v : vec) v /= total;
    out.push_back({o, total, StagedBelief{0, std::move(vec)}});
  }
  return out;
}

double expected_reward(const StagedModel& staged, const StagedBelief& belief) {
  check_chance(staged, belief);
  double r = 0.0;
  for (int x = 0; x < static_cast<int>(belief.probs.size()); ++x)
    if (belief.probs[x] != 0.0) r += belief.probs[x] * staged.stage_reward(x);
  return r;
}

}  // namespace chsvi
