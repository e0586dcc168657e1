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

#include "chsvi/upper_bound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chsvi {

namespace {

SparseRow sparse(const std::vector<double>& dense) {
  SparseRow out;
  for (int k = 0; k < static_cast<int>(dense.size()); ++k)
    if (dense[k] != 0.0) out.emplace_back(k, dense[k]);
  return out;
}

}  // namespace

double value_upper_limit(const DecModel& model) {
  return model.max_reward() / (1.0 - model.discount);
}

double value_lower_limit(const DecModel& model) {
  return model.min_reward() / (1.0 - model.discount);
}

UpperBoundSet::UpperBoundSet(const StagedModel& staged, BpMode mode)
    : staged_(&staged),
      mode_(mode),
      v_min_(value_lower_limit(staged.base())),
      v_max_(value_upper_limit(staged.base())),
      groups_(staged.num_stages()),
      marginals_(staged.num_stages()),
      by_state_(staged.num_stages()),
      since_prune_(staged.num_stages(), 0),
      kept_at_prune_(staged.num_stages(), 0) {
  const int ns = staged.base().num_states();
  for (int l = 0; l < staged.num_stages(); ++l) {
    const int ny = staged.stage_size(l);
    auto solver = std::make_unique<SimplexSolver>(ny);
    for (int j = 0; j < ny; ++j) solver->set_var_bounds(j, v_min_, v_max_);
    solvers_.push_back(std::move(solver));
    by_state_[l].assign(ns, {});
    for (int x = 0; x < ny; ++x) by_state_[l][staged.base_state(l, x)].push_back(x);
  }
}

UpperBoundSet::UpperBoundSet(UpperBoundSet&&) noexcept = default;
UpperBoundSet& UpperBoundSet::operator=(UpperBoundSet&&) noexcept = default;
UpperBoundSet::~UpperBoundSet() = default;

double UpperBoundSet::solve_at(int stage, const SparseRow& objective) {
  auto& lp = *solvers_[stage];
  for (;;) {
    lp.set_objective_sparse(objective);
    auto res = lp.solve();
    ++lp_solves_;
    if (!res.optimal()) {
      // One retry from a fresh basis before giving up.
      lp.reset_basis();
      res = lp.solve();
      ++lp_solves_;
    }
    if (!res.optimal())
      throw LpError("upper bound LP at stage " + std::to_string(stage) + ": " + to_string(res.status));
    if (!separate(stage, objective, res)) return res.value;
  }
}

bool UpperBoundSet::separate(int stage, const SparseRow& objective, LpResult& result) {
  const auto& groups = marginals_[stage];
  if (groups.empty()) return false;
  auto& lp = *solvers_[stage];
  // Every row has nonnegative coefficients on y, so coordinates without
  // objective weight can sit at their lower bounds.
  std::vector<double> y(lp.num_vars());
  for (int x = 0; x < lp.num_vars(); ++x) y[x] = lp.var_lower(x);
  for (const auto& [x, c] : objective)
    if (c != 0.0) y[x] = result.x[x];
  const int ns = staged_->base().num_states();
  std::vector<int> sigma(ns, -1);
  for (int s = 0; s < ns; ++s)
    for (int x : by_state_[stage][s])
      if (sigma[s] < 0 || y[x] > y[sigma[s]]) sigma[s] = x;
  bool added = false;
  for (const auto& g : groups) {
    double lhs = 0.0;
    for (const auto& [s, w] : g.b1) lhs += w * y[sigma[s]];
    if (lhs <= g.value + kFeasibilityTol * (1.0 + std::abs(g.value))) continue;
    SparseRow row;
    for (const auto& [s, w] : g.b1) row.emplace_back(sigma[s], w);
    lp.add_row(std::move(row), Sense::kLessEqual, g.value);
    groups_[stage].push_back(ConstraintGroup::kSelection);
    added = true;
  }
  if (!added) result.x = std::move(y);
  return added;
}

double UpperBoundSet::value(const StagedBelief& b) {
  return solve_at(b.stage, sparse(b.probs));
}

UbUpdate UpperBoundSet::backup(const StagedBelief& b) {
  const int l = b.stage;
  UbUpdate out;
  if (l == staged_->chance_stage()) {
    double v = expected_reward(*staged_, b);
    double future = 0.0;
    for (const auto& br : chance_branches(*staged_, b)) future += br.prob * value(br.posterior);
    out.value = v + staged_->discount() * future;
    return out;
  }
  if (l < 0 || l > staged_->chance_stage()) throw std::invalid_argument("backup: stage out of range");
  const DecModel& m = staged_->base();
  BilinearPrescriptionProgram bp;
  bp.num_actions = m.num_actions(l);
  bp.num_labels = m.num_labels(l);
  for (int x = 0; x < static_cast<int>(b.probs.size()); ++x)
    if (b.probs[x] > 0.0) bp.entries.push_back({x, staged_->acting_label(l, x), b.probs[x]});
  bp.polytope = solvers_[l + 1].get();
  if (!marginals_[l + 1].empty())
    bp.separate = [this, l](const SparseRow& c, LpResult& r) { return separate(l + 1, c, r); };
  const auto res = solve_bp(bp, mode_, seed_ + bp_calls_++);
  ++bp_solves_;
  lp_solves_ += res.lp_solves;
  out.value = res.value;
  out.exact = res.exact;
  out.gamma = Prescription{l, res.gamma};
  return out;
}

UbUpdate UpperBoundSet::update(const StagedBelief& b) {
  UbUpdate out = backup(b);
  out.previous = value(b);
  if (out.value < out.previous) {
    add_belief_row(b.stage, b.probs, out.value);
    out.inserted = true;
    if (!out.exact) certified_ = false;
    const int due = std::max(kPruneEvery, kept_at_prune_[b.stage] / 2);
    if (++since_prune_[b.stage] >= due && auto_prune_) prune(b.stage);
  }
  return out;
}

void UpperBoundSet::set_box(int stage, const std::vector<double>& lower,
                            const std::vector<double>& upper) {
  auto& lp = *solvers_[stage];
  const int ny = staged_->stage_size(stage);
  if (static_cast<int>(lower.size()) != ny || static_cast<int>(upper.size()) != ny)
    throw std::invalid_argument("set_box: size mismatch");
  for (int x = 0; x < ny; ++x) {
    const double lo = std::max(v_min_, lower[x]);
    const double hi = std::min(v_max_, upper[x]);
    lp.set_var_bounds(x, lo, std::max(lo, hi));
  }
}

void UpperBoundSet::add_marginal_row(int stage, const std::vector<double>& b1, double value) {
  if (static_cast<int>(b1.size()) != staged_->base().num_states())
    throw std::invalid_argument("add_marginal_row: belief must be over S");
  if (stage > 0) {
    marginals_[stage].push_back({sparse(b1), value});
    return;
  }
  solvers_[stage]->add_row(sparse(b1), Sense::kLessEqual, value);
  groups_[stage].push_back(ConstraintGroup::kMarginal);
}

void UpperBoundSet::add_belief_row(int stage, const std::vector<double>& b, double value) {
  if (static_cast<int>(b.size()) != staged_->stage_size(stage))
    throw std::invalid_argument("add_belief_row: size mismatch");
  solvers_[stage]->add_row(sparse(b), Sense::kLessEqual, value);
  groups_[stage].push_back(ConstraintGroup::kBelief);
}

int UpperBoundSet::prune(int stage) {
  auto& lp = *solvers_[stage];
  auto& groups = groups_[stage];
  std::vector<int> removed;
  for (int r = lp.num_rows() - 1; r >= 0; --r) {
    if (groups[r] != ConstraintGroup::kBelief) continue;
    lp.set_row_active(r, false);
    const double best = solve_at(stage, lp.row(r));
    if (best <= lp.row_rhs(r) + kRedundancyTol) {
      removed.push_back(r);
    } else {
      lp.set_row_active(r, true);
    }
  }
  since_prune_[stage] = 0;
  kept_at_prune_[stage] = static_cast<int>(std::count(groups.begin(), groups.end(), ConstraintGroup::kBelief)) -
                          static_cast<int>(removed.size());
  if (removed.empty()) return 0;
  std::vector<char> gone(groups.size(), 0);
  for (int r : removed) gone[r] = 1;
  std::vector<ConstraintGroup> kept;
  for (std::size_t r = 0; r < groups.size(); ++r)
    if (!gone[r]) kept.push_back(groups[r]);
  groups = std::move(kept);
  lp.remove_rows(removed);
  return static_cast<int>(removed.size());
}

int UpperBoundSet::belief_rows(int stage) const {
  return static_cast<int>(
      std::count(groups_[stage].begin(), groups_[stage].end(), ConstraintGroup::kBelief));
}

std::vector<AlphaConstraint> UpperBoundSet::constraints(int stage) const {
  const auto& lp = *solvers_[stage];
  const int ny = lp.num_vars();
  std::vector<AlphaConstraint> out;
  auto box = [&](int j, double lo, double hi) {
    out.push_back({stage, ConstraintGroup::kBox, {{j, 1.0}}, Sense::kGreaterEqual, lo});
    out.push_back({stage, ConstraintGroup::kBox, {{j, 1.0}}, Sense::kLessEqual, hi});
  };
  for (int j = 0; j < ny; ++j) box(j, lp.var_lower(j), lp.var_upper(j));
  if (!marginals_[stage].empty()) {
    // ȳ(s) never needs to exceed the largest cap among the composites of s.
    const int ns = staged_->base().num_states();
    for (int s = 0; s < ns; ++s) {
      double cap = v_min_;
      for (int x : by_state_[stage][s]) cap = std::max(cap, lp.var_upper(x));
      box(ny + s, v_min_, cap);
    }
    for (int x = 0; x < ny; ++x)
      out.push_back({stage, ConstraintGroup::kLink, {{x, 1.0}, {ny + staged_->base_state(stage, x), -1.0}},
                     Sense::kLessEqual, 0.0});
    for (const auto& g : marginals_[stage]) {
      SparseRow row = g.b1;
      for (auto& [j, c] : row) j += ny;
      out.push_back({stage, ConstraintGroup::kMarginal, std::move(row), Sense::kLessEqual, g.value});
    }
  }
  for (int r = 0; r < lp.num_rows(); ++r)
    if (lp.row_active(r) && groups_[stage][r] != ConstraintGroup::kSelection)
      out.push_back({stage, groups_[stage][r], lp.row(r), lp.row_sense(r), lp.row_rhs(r)});
  return out;
}

LinearProgram UpperBoundSet::program(int stage) const {
  const auto rows = constraints(stage);
  int nv = solvers_[stage]->num_vars();
  if (!marginals_[stage].empty()) nv += staged_->base().num_states();
  LinearProgram out;
  out.objective.assign(nv, 0.0);
  out.lower.assign(nv, -kInfinity);
  out.upper.assign(nv, kInfinity);
  for (const auto& c : rows) {
    if (c.group != ConstraintGroup::kBox) {
      out.constraints.push_back({c.coeffs, c.sense, c.rhs});
    } else if (c.sense == Sense::kGreaterEqual) {
      out.lower[c.coeffs[0].first] = c.rhs;
    } else {
      out.upper[c.coeffs[0].first] = c.rhs;
    }
  }
  return out;
}

}  // namespace chsvi
