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

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chsvi/bilinear.hpp"
#include "chsvi/initialization.hpp"
#include "chsvi/lower_bound.hpp"
#include "chsvi/model.hpp"
#include "chsvi/policy.hpp"
#include "chsvi/upper_bound.hpp"

namespace chsvi {

struct SolverConfig {
  double zeta = 0.85;
  double precision = 0.01;
  double time_limit_s = 86400.0;
  int max_depth = 0;  // 0: default_max_depth()
  std::uint64_t seed = 0;
  BpMode bp_mode = BpMode::kAuto;
  double presolve_precision = 0.01;
  bool presolve = true;
  double presolve_fraction = 0.1;  // share of time_limit_s given to the presolve
  int tick_every = 200;            // explore calls between periodic progress records

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// 5 · n · ⌈log((v_max − v_min) / precision) / log(1/β)⌉, at least n + 1.
int default_max_depth(const DecModel& model, double precision);

struct ProgressRecord {
  double t_s = 0.0;
  double upper = 0.0;  // U(b₀)
  double lower = 0.0;  // L(b₀)
  std::vector<int> num_vectors;      // |V^ℓ| per stage
  std::vector<int> num_constraints;  // belief rows of C^ℓ per stage
  std::int64_t explore_calls = 0;
  std::int64_t lp_solves = 0;
  std::int64_t bp_solves = 0;
};

struct NextStep {
  StagedBelief belief;
  double epsilon = 0.0;
  int observation = -1;  // chosen observation at the chance stage
};

/// CHSVI engine over initialized bounds.
class Chsvi {
 public:
  using Clock = std::chrono::steady_clock;
  using Observer = std::function<void(const ProgressRecord&)>;

  Chsvi(const StagedModel& staged, SolverConfig cfg, const RelaxedSolution* relaxed = nullptr);

  LowerBoundSet& lower() { return lower_; }
  UpperBoundSet& upper() { return upper_; }
  const SolverConfig& config() const { return cfg_; }
  int max_depth() const { return max_depth_; }

  /// Bound updates at b, then recursion on the next belief while the gap
  /// exceeds ε (and the depth cap and time budget allow), then updates again.
  void explore(const StagedBelief& b, double epsilon, int depth);
  NextStep choose_next(const StagedBelief& b, const std::optional<Prescription>& gamma, double epsilon);

  /// Outer loop until U(b₀) − L(b₀) <= precision or `deadline`.
  /// Returns the termination reason ("converged" or "time_limit").
  std::string run(Clock::time_point deadline);

  void set_observer(Observer obs) { observer_ = std::move(obs); }
  /// Called at every explored belief after each pair of bound updates.
  void set_visit_hook(std::function<void(const StagedBelief&)> hook) { visit_ = std::move(hook); }
  const std::vector<ProgressRecord>& log() const { return log_; }
  double best_upper() const { return best_upper_; }
  double best_lower() const { return best_lower_; }
  std::int64_t explore_calls() const { return explore_calls_; }
  int deepest() const { return deepest_; }
  int depth_cap_hits() const { return depth_cap_hits_; }
  int outer_iterations() const { return outer_; }

  /// Appends a progress record with freshly solved bounds at b₀.
  void record();

 private:
  const StagedModel* staged_;
  SolverConfig cfg_;
  LowerBoundSet lower_;
  UpperBoundSet upper_;
  StagedBelief b0_;
  int max_depth_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  Observer observer_;
  std::function<void(const StagedBelief&)> visit_;
  std::vector<ProgressRecord> log_;
  double best_upper_;
  double best_lower_;
  std::int64_t explore_calls_ = 0;
  int deepest_ = 0;
  int depth_cap_hits_ = 0;
  int outer_ = 0;
};

/// Relaxed-model presolve: FIB tables plus the stage-0 belief rows of a CHSVI
/// run on relax_model(model), stopped at presolve_precision or `budget_s`.
struct PresolveReport {
  RelaxedSolution solution;
  double upper = 0.0;  // relaxed U(b₀)
  double lower = 0.0;  // relaxed L(b₀)
  double seconds = 0.0;
  std::string termination;
};
PresolveReport presolve_relaxed(const DecModel& model, const SolverConfig& cfg, double budget_s);

struct SolveResult {
  CoordinationPolicy policy;
  double upper = 0.0;
  double lower = 0.0;
  std::vector<ProgressRecord> log;
  std::string termination;  // converged | time_limit | error
  std::string error;
  bool valid = true;
  bool certified = true;
  double seconds = 0.0;
  double presolve_seconds = 0.0;
  double presolve_upper = 0.0;
  int presolve_rows = 0;
  int outer_iterations = 0;
  std::int64_t explore_calls = 0;
  int deepest = 0;
  int max_depth = 0;
  std::vector<LinearProgram> programs;  // final C^ℓ per stage, when requested
};

/// Presolve, initialization and the CHSVI loop within cfg.time_limit_s.
/// Failures after initialization are reported in the result (termination
/// "error", valid = false) together with the bounds reached so far.
SolveResult solve(const StagedModel& staged, const SolverConfig& cfg,
                  const Chsvi::Observer& observer = nullptr, bool keep_programs = false);

void write_progress_csv(const std::vector<ProgressRecord>& log, int num_stages, std::ostream& os);
std::string summary_json(const SolveResult& result, const SolverConfig& cfg);

}  // namespace chsvi
