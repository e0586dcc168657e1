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
#include <functional>
#include <string>
#include <vector>

#include "chsvi/lp.hpp"

namespace chsvi {

/// max over prescriptions γ and y in a polytope of
///   Σ_x b(x) · y(x · |A| + γ(m(x))).
///
/// The polytope lives in `polytope`, whose first variables are indexed by
/// x · |A| + a. Further (auxiliary) variables may follow. The solver's
/// objective is overwritten; its rows are left untouched.
struct BilinearPrescriptionProgram {
  struct Entry {
    int composite = 0;  // x
    int label = 0;      // m(x)
    double prob = 0.0;  // b(x) > 0
  };

  int num_actions = 1;
  int num_labels = 1;
  std::vector<Entry> entries;
  SimplexSolver* polytope = nullptr;
  /// Optional row generator for a polytope kept as a relaxation. Called after
  /// every optimal inner solve with the objective and result; returns true
  /// when it added rows, and the inner LP is then solved again.
  std::function<bool(const SparseRow&, LpResult&)> separate;

  int var(int composite, int action) const { return composite * num_actions + action; }
  /// Objective coefficients induced by a prescription.
  SparseRow objective(const std::vector<int>& gamma) const;
  /// Labels carrying positive mass, in increasing order.
  std::vector<int> supported_labels() const;
  /// J(b, γ, y).
  double evaluate(const std::vector<int>& gamma, const std::vector<double>& y) const;
};

enum class BpMode { kAuto, kEnumerate, kBranchBound, kAlternate };

std::string to_string(BpMode mode);
BpMode parse_bp_mode(const std::string& text);

/// Effective prescription count |A|^(number of supported labels) beneath
/// which kAuto enumerates.
inline constexpr double kEnumerationThreshold = 4096.0;

struct BpResult {
  double value = 0.0;
  std::vector<int> gamma;  // total over labels; unsupported labels map to 0
  std::vector<double> y;
  bool exact = true;  // false for the heuristic mode
  int lp_solves = 0;
  std::int64_t nodes = 0;
};

/// Brute force over every prescription restricted to the supported labels.
BpResult solve_bp_exact(const BilinearPrescriptionProgram& bp);

BpResult solve_bp(const BilinearPrescriptionProgram& bp, BpMode mode, std::uint64_t seed = 0);

/// Block-coordinate ascent from a single starting prescription. The value is
/// a lower bound on the optimum and never below the start's inner LP value.
BpResult ascend_bp(const BilinearPrescriptionProgram& bp, std::vector<int> start);

}  // namespace chsvi
