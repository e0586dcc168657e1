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
#include <stdexcept>
#include <vector>

#include "chsvi/model.hpp"
#include "chsvi/policy.hpp"

namespace chsvi {

/// Raised when an oracle would exceed its size guard.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalReport {
  std::int64_t episodes = 0;
  int horizon = 0;
  double mean = 0.0;       // mean discounted return over H steps
  double std_error = 0.0;  // sample std / sqrt(episodes)
  double tail = 0.0;       // β^H · max(|v_min|, |v_max|)
};

/// ⌈log(precision / (2 · max(|v_min|, |v_max|))) / log β⌉, so the truncation
/// error is at most precision / 2. At least 1.
int default_eval_horizon(const DecModel& model, double precision);

/// β^H · max(|v_min|, |v_max|).
double truncation_tail(const DecModel& model, int horizon);

/// Simulates the coordinator loop under `policy` for `episodes` runs of
/// `horizon` steps. Episode k draws from an mt19937_64 seeded by
/// seed_seq{seed, k}, so the result is bit-for-bit reproducible for any
/// thread count. Workers: min(hardware threads, CHSVI_THREADS) when set.
/// Throws PolicyError when the policy does not fit the model.
EvalReport monte_carlo_eval(const StagedModel& staged, const CoordinationPolicy& policy,
                            std::int64_t episodes, int horizon, std::uint64_t seed);

/// Sum in fixed pairwise order (deterministic, low rounding growth).
double pairwise_sum(const double* data, std::size_t count);

inline constexpr double kOracleNodeLimit = 1e6;

/// Upper estimate of the belief nodes the finite-horizon oracle visits.
double finite_horizon_nodes(const DecModel& model, int horizon);

/// V*_T(b₀) by backward induction over common-information beliefs, maximizing
/// over every prescription tuple (restricted to labels with mass, which does
/// not change the value). Throws OracleError above kOracleNodeLimit nodes.
double finite_horizon_oracle(const StagedModel& staged, int horizon);

/// One exact value-iteration step on a single-agent model with one private
/// label: {α^{a,μ}} for every action a and map μ from observations to
/// vectors of `current`, without pruning. Size |A|·|V|^|O|.
std::vector<std::vector<double>> exact_vi_step(const DecModel& model,
                                               const std::vector<std::vector<double>>& current);

/// Removes pointwise-dominated vectors (of equal vectors the first survives).
std::vector<std::vector<double>> prune_dominated(std::vector<std::vector<double>> set);

/// `iterations` exact steps with pruning, starting from `initial` (the zero
/// vector when empty). Requires one agent with one label and an unpruned
/// step size of at most kOracleNodeLimit; throws OracleError otherwise.
std::vector<std::vector<double>> exact_vi_oracle(const DecModel& model, int iterations,
                                                 std::vector<std::vector<double>> initial = {});

}  // namespace chsvi
