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

#include "chsvi/model.hpp"

namespace chsvi {

/// Two agents facing N doors, sharing their (action, observation) history
/// with each other after a delay of d steps.
struct DecTigerParams {
  int doors = 2;
  int delay = 1;
  double discount = 0.9;

  double correct_prob() const { return 0.85 / (0.7 + 0.15 * doors); }
  double wrong_prob() const { return 0.15 / (0.7 + 0.15 * doors); }
};

/// Two-user slotted broadcast channel with finite buffers.
struct MultiCastParams {
  int capacity1 = 8;
  int capacity2 = 8;
  double arrival1 = 0.1;
  double arrival2 = 0.2;
  double discount = 0.9;
  double drop_cost = 2.0;
  double transmit_cost = 0.5;
};

/// Action indices used by the DecTiger generator: 0 listens, 1 + k opens
/// door k.
inline constexpr int kListen = 0;
/// Action indices used by the MultiCast generator.
inline constexpr int kNoTransmit = 0;
inline constexpr int kTransmit = 1;

DecModel gen_dectiger(const DecTigerParams& params);
DecModel gen_multicast(const MultiCastParams& params);

/// Single-agent relaxation in which every private label is common: the
/// coordinator acts with joint actions and observes (o, m_{s'}) after each
/// step. Its optimal value upper-bounds the original at beliefs supported on
/// a single private-information tuple.
DecModel relax_model(const DecModel& model);

/// True iff all states in the support of `belief` (over S) share one private
/// tuple.
bool single_private_tuple(const DecModel& model, const std::vector<double>& belief);

}  // namespace chsvi
