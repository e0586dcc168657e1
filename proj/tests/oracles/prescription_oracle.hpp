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

// Lexicographic enumeration of every prescription with a cold LP solve per
// prescription. No warm starts, no support restriction.

#pragma once

#include <stdexcept>
#include <vector>

#include "chsvi/bilinear.hpp"
#include "chsvi/lp.hpp"

namespace oracle {

inline double inner_value(const chsvi::LinearProgram& polytope,
                          const chsvi::BilinearPrescriptionProgram& bp,
                          const std::vector<int>& gamma) {
  chsvi::LinearProgram lp = polytope;
  lp.objective.assign(polytope.num_vars(), 0.0);
  for (const auto& e : bp.entries) lp.objective[bp.var(e.composite, gamma[e.label])] += e.prob;
  const auto res = chsvi::solve_lp(lp);
  if (!res.optimal()) throw std::runtime_error("oracle LP not optimal");
  return res.value;
}

struct BruteForce {
  double value = -chsvi::kInfinity;
  std::vector<int> gamma;
  long count = 0;
};

inline BruteForce brute_force_bp(const chsvi::LinearProgram& polytope,
                                 const chsvi::BilinearPrescriptionProgram& bp) {
  BruteForce out;
  std::vector<int> gamma(bp.num_labels, 0);
  while (true) {
    const double v = inner_value(polytope, bp, gamma);
    ++out.count;
    if (v > out.value) {
      out.value = v;
      out.gamma = gamma;
    }
    int j = bp.num_labels - 1;
    while (j >= 0 && gamma[j] == bp.num_actions - 1) gamma[j--] = 0;
    if (j < 0) break;
    ++gamma[j];
  }
  return out;
}

}  // namespace oracle
