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

#include <vector>

#include "chsvi/bilinear.hpp"
#include "chsvi/model.hpp"
#include "chsvi/upper_bound.hpp"

namespace chsvi {

/// Fast Informed Bound tables indexed like the model's kernel rows
/// (state * |A| + joint).
struct FibTables {
  std::vector<double> upper;  // Q̂, from reward maximization
  std::vector<double> lower;  // Q̌, from reward minimization
  int iterations_upper = 0;
  int iterations_lower = 0;
};

/// Iterates Q(s,a) = r(s,a) + β Σ_o opt_a' Σ_s' Pr(s', o | s, a) Q(s', a')
/// with opt = max from v_max (upper) and opt = min from v_min (lower) until
/// the sup-norm change is at most `tol`.
FibTables fast_informed_bound(const DecModel& model, double tol = 1e-9);

/// One FIB sweep for the maximizing side; exposed for monotonicity tests.
std::vector<double> fib_sweep_upper(const DecModel& model, const std::vector<double>& q);

struct MarginalBound {
  std::vector<double> belief;  // over S
  double value = 0.0;
};

/// Output of the relaxed-model presolve.
struct RelaxedSolution {
  std::vector<MarginalBound> rows;
  FibTables fib;
};

/// Box rows from the FIB caps, plus marginal rows for the relaxed bounds whose
/// belief lies on a single private-information tuple (the only beliefs at
/// which the relaxed value dominates). Without a relaxed solution the bound is
/// the plain box [v_min, v_max].
///
/// The minimizing FIB table raises the lower box only on stages that carry no
/// marginal rows: a raised lower box breaks the witness that keeps the
/// marginal rows sound.
UpperBoundSet init_upper_bound(const StagedModel& staged, const RelaxedSolution* relaxed,
                               BpMode mode = BpMode::kAuto);

}  // namespace chsvi
