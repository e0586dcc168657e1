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

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chsvi/lower_bound.hpp"
#include "chsvi/model.hpp"

namespace chsvi {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinator policy read off a lower bound: at a prescription-stage belief
/// it plays the tag of the maximizing vector.
class CoordinationPolicy {
 public:
  CoordinationPolicy() = default;
  CoordinationPolicy(int num_agents, std::vector<int> stage_sizes,
                     std::vector<std::vector<AlphaVector>> stages);

  int num_agents() const { return num_agents_; }
  const std::vector<int>& stage_sizes() const { return stage_sizes_; }
  const std::vector<AlphaVector>& vectors(int stage) const { return stages_[stage]; }

  /// Prescription for agent b.stage; nothing at the chance stage. Ties go to
  /// the vector with the lower birth stamp.
  std::optional<Prescription> act(const StagedBelief& b) const;
  /// max αᵀb over the stored vectors.
  double value(const StagedBelief& b) const;

  /// Throws PolicyError if the stage layout differs from the model's.
  void check_compatible(const StagedModel& staged) const;

  std::string to_json() const;
  static CoordinationPolicy from_json(const std::string& text);

 private:
  int argmax(const StagedBelief& b) const;

  int num_agents_ = 0;
  std::vector<int> stage_sizes_;
  std::vector<std::vector<AlphaVector>> stages_;
};

CoordinationPolicy direct_control_policy(const LowerBoundSet& lb);

void save_policy(const CoordinationPolicy& policy, const std::filesystem::path& path);
CoordinationPolicy load_policy(const std::filesystem::path& path);

}  // namespace chsvi
