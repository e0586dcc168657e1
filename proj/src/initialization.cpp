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

#include "chsvi/initialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chsvi/envs.hpp"

namespace chsvi {

namespace {

// Σ_o opt_a' Σ_s' Pr(s', o | row) q(s', a') for every kernel row.
std::vector<double> sweep(const DecModel& m, const std::vector<double>& q, bool maximize) {
  const int na = m.num_joint_actions();
  const int no = m.num_observations();
  std::vector<double> out(q.size());
  std::vector<double> acc(static_cast<std::size_t>(no) * na);
  std::vector<int> touched;
  std::vector<char> seen(no, 0);
  for (std::size_t r = 0; r < m.kernel.size(); ++r) {
    for (const auto& t : m.kernel[r]) {
      if (!seen[t.observation]) {
        seen[t.observation] = 1;
        touched.push_back(t.observation);
        std::fill_n(acc.begin() + static_cast<std::ptrdiff_t>(t.observation) * na, na, 0.0);
      }
      const double* qs = &q[static_cast<std::size_t>(t.next_state) * na];
      double* dst = &acc[static_cast<std::size_t>(t.observation) * na];
      for (int a = 0; a < na; ++a) dst[a] += t.prob * qs[a];
    }
    double future = 0.0;
    for (int o : touched) {
      const double* v = &acc[static_cast<std::size_t>(o) * na];
      future += maximize ? *std::max_element(v, v + na) : *std::min_element(v, v + na);
      seen[o] = 0;
    }
    touched.clear();
    out[r] = m.reward[r] + m.discount * future;
  }
  return out;
}

std::vector<double> iterate(const DecModel& m, double start, bool maximize, double tol, int& iterations) {
  std::vector<double> q(m.kernel.size(), start);
  iterations = 0;
  for (;;) {
    auto next = sweep(m, q, maximize);
    ++iterations;
    double change = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) change = std::max(change, std::abs(next[k] - q[k]));
    q = std::move(next);
    if (change <= tol) return q;
  }
}

}  // namespace

std::vector<double> fib_sweep_upper(const DecModel& model, const std::vector<double>& q) {
  return sweep(model, q, true);
}

FibTables fast_informed_bound(const DecModel& model, double tol) {
  FibTables t;
  t.upper = iterate(model, value_upper_limit(model), true, tol, t.iterations_upper);
  t.lower = iterate(model, value_lower_limit(model), false, tol, t.iterations_lower);
  return t;
}

UpperBoundSet init_upper_bound(const StagedModel& staged, const RelaxedSolution* relaxed, BpMode mode) {
  UpperBoundSet ub(staged, mode);
  if (!relaxed) return ub;
  const DecModel& m = staged.base();
  const int n = staged.chance_stage();

  std::vector<const MarginalBound*> usable;
  for (const auto& row : relaxed->rows)
    if (single_private_tuple(m, row.belief)) usable.push_back(&row);

  const auto& qhi = relaxed->fib.upper;
  const auto& qlo = relaxed->fib.lower;
  const bool have_fib = qhi.size() == m.kernel.size();
  for (int l = 0; l <= n; ++l) {
    const int size = staged.stage_size(l);
    if (have_fib) {
      // Stage-l composite x covers the chance-stage composites
      // x * suffix + k for k < suffix.
      const int suffix = staged.stage_size(n) / size;
      std::vector<double> hi(size, -std::numeric_limits<double>::infinity());
      std::vector<double> lo(size, ub.v_min());
      for (int x = 0; x < size; ++x)
        for (int k = 0; k < suffix; ++k) hi[x] = std::max(hi[x], qhi[static_cast<std::size_t>(x) * suffix + k]);
      if (l == n && usable.empty() && qlo.size() == m.kernel.size()) lo = qlo;
      ub.set_box(l, lo, hi);
    }
    for (const auto* row : usable) ub.add_marginal_row(l, row->belief, row->value);
  }
  return ub;
}

}  // namespace chsvi
