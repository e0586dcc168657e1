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

#include "chsvi/lower_bound.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace chsvi {

namespace {

struct SupportEntry {
  int composite;
  double prob;
};

std::vector<SupportEntry> support_of(const StagedBelief& b) {
  std::vector<SupportEntry> out;
  for (int x = 0; x < static_cast<int>(b.probs.size()); ++x)
    if (b.probs[x] > 0.0) out.push_back({x, b.probs[x]});
  return out;
}

}  // namespace

LowerBoundSet::LowerBoundSet(const StagedModel& staged)
    : staged_(&staged),
      sets_(staged.num_stages()),
      since_prune_(staged.num_stages(), 0),
      checked_(staged.num_stages(), 0),
      composites_by_label_(staged.num_agents()) {
  const DecModel& m = staged.base();
  for (int l = 0; l < staged.num_agents(); ++l) {
    composites_by_label_[l].assign(m.num_labels(l), {});
    for (int x = 0; x < staged.stage_size(l); ++x)
      composites_by_label_[l][staged.acting_label(l, x)].push_back(x);
  }
  std::vector<std::map<int, double>> weights(m.num_observations());
  for (int x = 0; x < staged.stage_size(staged.chance_stage()); ++x)
    for (const auto& t : staged.chance_kernel(x)) weights[t.observation][t.next_state] += t.prob;
  obs_weights_.resize(m.num_observations());
  for (int o = 0; o < m.num_observations(); ++o)
    obs_weights_[o].assign(weights[o].begin(), weights[o].end());
  fallback_.assign(m.num_observations(), -1);
  fallback_score_.assign(m.num_observations(), -std::numeric_limits<double>::infinity());
}

LbValue LowerBoundSet::value(const StagedBelief& b) const {
  const auto& set = sets_.at(b.stage);
  if (set.empty()) throw std::logic_error("lower bound queried on an empty vector set");
  const auto supp = support_of(b);
  LbValue best{-std::numeric_limits<double>::infinity(), -1};
  for (int k = 0; k < static_cast<int>(set.size()); ++k) {
    double v = 0.0;
    for (const auto& e : supp) v += e.prob * set[k].values[e.composite];
    if (v > best.value) best = {v, k};
  }
  return best;
}

AlphaVector LowerBoundSet::backup(const StagedBelief& b) const {
  if (b.stage < 0 || b.stage > staged_->chance_stage())
    throw std::invalid_argument("backup: belief stage out of range");
  return b.stage == staged_->chance_stage() ? backup_chance(b) : backup_prescription(b);
}

AlphaVector LowerBoundSet::backup_prescription(const StagedBelief& b) const {
  const int l = b.stage;
  const DecModel& m = staged_->base();
  const int na = m.num_actions(l);
  const int nlab = m.num_labels(l);
  const auto& next = sets_[l + 1];
  if (next.empty()) throw std::logic_error("backup: next-stage vector set is empty");

  struct Entry {
    int base;  // child index of action 0
    int slot;  // local label index
    double prob;
  };
  std::vector<int> slot_of(nlab, -1);
  std::vector<int> labels;
  std::vector<Entry> entries;
  for (const auto& e : support_of(b)) {
    const int lab = staged_->acting_label(l, e.composite);
    if (slot_of[lab] < 0) {
      slot_of[lab] = static_cast<int>(labels.size());
      labels.push_back(lab);
    }
    entries.push_back({staged_->child(l, e.composite, 0), slot_of[lab], e.prob});
  }
  const int nslots = static_cast<int>(labels.size());

  std::vector<double> score(static_cast<std::size_t>(nslots) * na);
  std::vector<int> gamma_local(nslots), best_local(nslots);
  double best_j = -std::numeric_limits<double>::infinity();
  int best_k = -1;
  for (int k = 0; k < static_cast<int>(next.size()); ++k) {
    const auto& alpha = next[k].values;
    std::fill(score.begin(), score.end(), 0.0);
    for (const auto& e : entries) {
      double* row = &score[e.slot * na];
      for (int a = 0; a < na; ++a) row[a] += e.prob * alpha[e.base + a];
      ops_ += na;
    }
    double j = 0.0;
    for (int s = 0; s < nslots; ++s) {
      const double* row = &score[s * na];
      int arg = 0;
      for (int a = 1; a < na; ++a)
        if (row[a] > row[arg]) arg = a;
      ops_ += na;
      gamma_local[s] = arg;
      j += row[arg];
    }
    if (j > best_j) {
      best_j = j;
      best_k = k;
      best_local = gamma_local;
    }
  }

  const auto& star = next[best_k].values;
  std::vector<int> gamma(nlab, 0);
  for (int lab = 0; lab < nlab; ++lab) {
    if (slot_of[lab] >= 0) {
      gamma[lab] = best_local[slot_of[lab]];
      continue;
    }
    // Labels the belief cannot reach: best action under uniform weights.
    int arg = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < na; ++a) {
      double v = 0.0;
      for (int x : composites_by_label_[l][lab]) v += star[staged_->child(l, x, a)];
      if (v > top) {
        top = v;
        arg = a;
      }
    }
    gamma[lab] = arg;
  }

  AlphaVector out;
  out.stage = l;
  out.values.resize(staged_->stage_size(l));
  for (int x = 0; x < staged_->stage_size(l); ++x)
    out.values[x] = star[staged_->child(l, x, gamma[staged_->acting_label(l, x)])];
  out.tag = Prescription{l, std::move(gamma)};
  return out;
}

AlphaVector LowerBoundSet::backup_chance(const StagedBelief& b) const {
  const DecModel& m = staged_->base();
  const auto& v0 = sets_[0];
  if (v0.empty()) throw std::logic_error("backup: stage-0 vector set is empty");
  const int ns = m.num_states();
  const int no = m.num_observations();

  // Unnormalized posteriors for the observations the belief can produce.
  std::vector<int> slot(no, -1);
  std::vector<int> seen;
  std::vector<std::vector<double>> post;
  for (const auto& e : support_of(b)) {
    for (const auto& t : staged_->chance_kernel(e.composite)) {
      if (t.prob == 0.0) continue;
      if (slot[t.observation] < 0) {
        slot[t.observation] = static_cast<int>(post.size());
        seen.push_back(t.observation);
        post.emplace_back(ns, 0.0);
      }
      post[slot[t.observation]][t.next_state] += e.prob * t.prob;
    }
  }
  std::vector<int> choice(fallback_.begin(), fallback_.end());
  for (int o : seen) {
    const auto& q = post[slot[o]];
    std::vector<int> nz;
    for (int s = 0; s < ns; ++s)
      if (q[s] != 0.0) nz.push_back(s);
    double top = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int k = 0; k < static_cast<int>(v0.size()); ++k) {
      double v = 0.0;
      for (int s : nz) v += q[s] * v0[k].values[s];
      if (v > top) {
        top = v;
        arg = k;
      }
    }
    choice[o] = arg;
  }
  for (int& c : choice)
    if (c < 0) c = 0;

  const double beta = staged_->discount();
  AlphaVector out;
  out.stage = staged_->chance_stage();
  out.values.resize(staged_->stage_size(out.stage));
  for (int x = 0; x < static_cast<int>(out.values.size()); ++x) {
    double v = 0.0;
    for (const auto& t : staged_->chance_kernel(x)) v += t.prob * v0[choice[t.observation]].values[t.next_state];
    out.values[x] = staged_->stage_reward(x) + beta * v;
  }
  return out;
}

AlphaVector LowerBoundSet::update(const StagedBelief& b) {
  AlphaVector alpha = backup(b);
  insert(alpha);
  return alpha;
}

void LowerBoundSet::insert(AlphaVector alpha) {
  const int l = alpha.stage;
  if (static_cast<int>(alpha.values.size()) != staged_->stage_size(l))
    throw std::invalid_argument("alpha vector size does not match its stage");
  alpha.birth = births_++;
  sets_[l].push_back(std::move(alpha));
  if (l == 0) refresh_fallback(static_cast<int>(sets_[0].size()) - 1);
  if (++since_prune_[l] >= kPruneEvery && auto_prune_) prune(l);
}

void LowerBoundSet::refresh_fallback(int index) {
  const auto& alpha = sets_[0][index].values;
  for (int o = 0; o < static_cast<int>(obs_weights_.size()); ++o) {
    double v = 0.0;
    for (const auto& [s, w] : obs_weights_[o]) v += w * alpha[s];
    if (fallback_[o] < 0 || v > fallback_score_[o]) {
      fallback_[o] = index;
      fallback_score_[o] = v;
    }
  }
}

void LowerBoundSet::refresh_fallback_all() {
  std::fill(fallback_.begin(), fallback_.end(), -1);
  for (int k = 0; k < static_cast<int>(sets_[0].size()); ++k) refresh_fallback(k);
}

int LowerBoundSet::prune(int stage) {
  auto& set = sets_[stage];
  const int n = static_cast<int>(set.size());
  const int old = std::min(checked_[stage], n);
  std::vector<char> removed(n, 0);
  // Returns +1 if a >= b componentwise, -1 if b >= a, 2 if equal, 0 otherwise.
  auto compare = [](const std::vector<double>& a, const std::vector<double>& b) {
    bool ge = true, le = true;
    for (std::size_t k = 0; k < a.size() && (ge || le); ++k) {
      if (a[k] < b[k]) ge = false;
      if (a[k] > b[k]) le = false;
    }
    if (ge && le) return 2;
    return ge ? 1 : le ? -1 : 0;
  };
  for (int j = old; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j || removed[i] || removed[j]) continue;
      if (i >= old && i > j) continue;  // new pairs are visited once
      const int c = compare(set[i].values, set[j].values);
      if (c == 2) {
        removed[std::max(i, j)] = 1;
      } else if (c == 1) {
        removed[j] = 1;
      } else if (c == -1) {
        removed[i] = 1;
      }
    }
  }
  int count = 0;
  std::vector<AlphaVector> kept;
  kept.reserve(n);
  for (int k = 0; k < n; ++k) {
    if (removed[k]) {
      ++count;
    } else {
      kept.push_back(std::move(set[k]));
    }
  }
  set = std::move(kept);
  checked_[stage] = static_cast<int>(set.size());
  since_prune_[stage] = 0;
  if (stage == 0 && count > 0) refresh_fallback_all();
  return count;
}

std::vector<std::vector<double>> blind_policy_values(const DecModel& model) {
  const int ns = model.num_states();
  std::vector<std::vector<double>> out;
  for (int a = 0; a < model.num_joint_actions(); ++a) {
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(ns, ns);
    Eigen::VectorXd rhs(ns);
    for (int s = 0; s < ns; ++s) {
      rhs(s) = model.reward_at(s, a);
      for (const auto& t : model.transitions(s, a)) lhs(s, t.next_state) -= model.discount * t.prob;
    }
    const Eigen::VectorXd sol = lhs.partialPivLu().solve(rhs);
    out.emplace_back(sol.data(), sol.data() + ns);
  }
  return out;
}

LowerBoundSet init_lower_bound(const StagedModel& staged) {
  LowerBoundSet lb(staged);
  lb.set_auto_prune(false);
  const DecModel& m = staged.base();
  const int n = staged.num_agents();
  const double beta = staged.discount();
  const auto blind = blind_policy_values(m);

  // Chance stage: act a'' now, then repeat a forever.
  std::vector<std::vector<double>> lookahead;
  for (const auto& alpha : blind) {
    std::vector<double> q(staged.stage_size(n));
    for (int x = 0; x < staged.stage_size(n); ++x) {
      double v = 0.0;
      for (const auto& t : staged.chance_kernel(x)) v += t.prob * alpha[t.next_state];
      q[x] = staged.stage_reward(x) + beta * v;
    }
    lookahead.push_back(q);
    lb.insert(AlphaVector{n, std::move(q), std::nullopt, 0});
  }
  // Intermediate stages: fix the actions of agents l..n-1.
  for (int l = n - 1; l >= 1; --l) {
    int block = 1;
    for (int j = l; j < n; ++j) block *= m.num_actions(j);
    const int inner = block / m.num_actions(l);
    for (const auto& q : lookahead) {
      for (int suffix = 0; suffix < block; ++suffix) {
        std::vector<double> v(staged.stage_size(l));
        for (int x = 0; x < staged.stage_size(l); ++x) v[x] = q[x * block + suffix];
        lb.insert(AlphaVector{l, std::move(v),
                              Prescription::constant(l, m.num_labels(l), suffix / inner), 0});
      }
    }
  }
  for (int a = 0; a < m.num_joint_actions(); ++a) {
    const int first = m.split_joint_action(a)[0];
    lb.insert(AlphaVector{0, blind[a], Prescription::constant(0, m.num_labels(0), first), 0});
  }
  for (int l = 0; l < staged.num_stages(); ++l) lb.prune(l);
  lb.set_auto_prune(true);
  return lb;
}

}  // namespace chsvi
