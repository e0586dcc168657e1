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

#include "chsvi/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "chsvi/upper_bound.hpp"

namespace chsvi {

namespace {

double value_scale(const DecModel& model) {
  return std::max(std::abs(value_lower_limit(model)), std::abs(value_upper_limit(model)));
}

int worker_count(std::int64_t episodes) {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CHSVI_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) workers = std::min(workers, cap);
  }
  return static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(episodes, 1)));
}

struct BeliefHash {
  std::size_t operator()(const std::vector<double>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (double d : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof bits);
      h = (h ^ bits) * 1099511628211ull;
    }
    return h;
  }
};

// Common-information belief nodes reached during simulation, with the
// prescriptions the policy plays there. Beliefs depend only on the observation
// history, so caching never changes a sampled return.
class BeliefTree {
 public:
  static constexpr std::size_t kMaxNodes = 200000;

  BeliefTree(const StagedModel& staged, const CoordinationPolicy& policy)
      : staged_(staged), policy_(policy) {}

  int root() {
    if (nodes_.empty()) intern(initial_belief(staged_).probs);
    return 0;
  }
  const std::vector<Prescription>& plan(int node) const { return nodes_[node].plan; }

  int next(int node, int observation) {
    auto& kids = nodes_[node].kids;
    auto it = kids.find(observation);
    if (it != kids.end()) return it->second;
    const auto out = advance_chance(staged_, nodes_[node].chance, observation);
    if (!out.posterior) throw std::logic_error("simulation drew an observation of zero probability");
    if (nodes_.size() >= kMaxNodes) {
      // Start over; the root is rebuilt from b₀ and the new node follows it.
      nodes_.clear();
      index_.clear();
      root();
      return intern(out.posterior->probs);
    }
    const int id = intern(out.posterior->probs);
    nodes_[node].kids.emplace(observation, id);
    return id;
  }

 private:
  struct Node {
    std::vector<Prescription> plan;
    StagedBelief chance;
    std::unordered_map<int, int> kids;
  };

  int intern(const std::vector<double>& probs) {
    auto it = index_.find(probs);
    if (it != index_.end()) return it->second;
    Node node;
    StagedBelief b{0, probs};
    for (int l = 0; l < staged_.num_agents(); ++l) {
      auto gamma = policy_.act(b);
      b = advance_prescription(staged_, b, *gamma);
      node.plan.push_back(std::move(*gamma));
    }
    node.chance = std::move(b);
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    index_.emplace(probs, id);
    return id;
  }

  const StagedModel& staged_;
  const CoordinationPolicy& policy_;
  std::vector<Node> nodes_;
  std::unordered_map<std::vector<double>, int, BeliefHash> index_;
};

template <class Weights>
int draw(std::mt19937_64& rng, std::size_t count, Weights weight) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t k = 0; k < count; ++k) {
    const double w = weight(k);
    if (w <= 0.0) continue;
    last = static_cast<int>(k);
    acc += w;
    if (u < acc) return last;
  }
  return last;  // rounding left u past the total
}

double episode_return(const StagedModel& staged, BeliefTree& tree, int horizon, std::uint64_t seed,
                      std::int64_t episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32)};
  std::mt19937_64 rng(seq);
  const DecModel& m = staged.base();
  int s = draw(rng, m.b0.size(), [&](std::size_t k) { return m.b0[k]; });
  int node = tree.root();
  double ret = 0.0, disc = 1.0;
  for (int t = 0; t < horizon; ++t) {
    int x = s;
    const auto& plan = tree.plan(node);
    for (int l = 0; l < staged.num_agents(); ++l) x = staged.child(l, x, plan[l](staged.acting_label(l, x)));
    ret += disc * staged.stage_reward(x);
    disc *= m.discount;
    if (t + 1 == horizon) break;
    const auto& row = staged.chance_kernel(x);
    const int k = draw(rng, row.size(), [&](std::size_t j) { return row[j].prob; });
    s = row[k].next_state;
    node = tree.next(node, row[k].observation);
  }
  return ret;
}

}  // namespace

int default_eval_horizon(const DecModel& model, double precision) {
  const double scale = value_scale(model);
  if (model.discount <= 0.0 || scale <= 0.0) return 1;
  const double h = std::ceil(std::log(precision / (2.0 * scale)) / std::log(model.discount));
  return std::max(1, static_cast<int>(h));
}

double truncation_tail(const DecModel& model, int horizon) {
  return std::pow(model.discount, horizon) * value_scale(model);
}

double pairwise_sum(const double* data, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) s += data[k];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

EvalReport monte_carlo_eval(const StagedModel& staged, const CoordinationPolicy& policy,
                            std::int64_t episodes, int horizon, std::uint64_t seed) {
  policy.check_compatible(staged);
  if (episodes < 1) throw std::invalid_argument("episodes must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  std::vector<double> returns(static_cast<std::size_t>(episodes));
  const int workers = worker_count(episodes);
  auto run = [&](std::int64_t begin, std::int64_t end) {
    BeliefTree tree(staged, policy);
    for (std::int64_t k = begin; k < end; ++k) returns[k] = episode_return(staged, tree, horizon, seed, k);
  };
  if (workers == 1) {
    run(0, episodes);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      const std::int64_t begin = episodes * w / workers, end = episodes * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  EvalReport rep;
  rep.episodes = episodes;
  rep.horizon = horizon;
  rep.mean = pairwise_sum(returns.data(), returns.size()) / static_cast<double>(episodes);
  if (episodes > 1) {
    std::vector<double> sq(returns.size());
    for (std::size_t k = 0; k < returns.size(); ++k) sq[k] = (returns[k] - rep.mean) * (returns[k] - rep.mean);
    const double var = pairwise_sum(sq.data(), sq.size()) / static_cast<double>(episodes - 1);
    rep.std_error = std::sqrt(var / static_cast<double>(episodes));
  }
  rep.tail = truncation_tail(staged.base(), horizon);
  return rep;
}

double finite_horizon_nodes(const DecModel& model, int horizon) {
  double per_step = 1.0;
  for (int i = 0; i < model.num_agents(); ++i) per_step *= prescription_count(model, i);
  const double branch = per_step * model.num_observations();
  double total = 0.0, layer = per_step;
  for (int t = 0; t < horizon; ++t) {
    total += layer;
    layer *= branch;
    if (!std::isfinite(total) || total > 1e300) return std::numeric_limits<double>::infinity();
  }
  return total;
}

namespace {

class FiniteHorizon {
 public:
  explicit FiniteHorizon(const StagedModel& staged) : staged_(staged) {}

  double value(const StagedBelief& b, int steps) {
    if (steps == 0) return 0.0;
    if (++nodes_ > kOracleNodeLimit) throw OracleError("finite-horizon oracle exceeded its node limit");
    const int l = b.stage;
    if (l == staged_.chance_stage()) {
      double v = expected_reward(staged_, b);
      if (steps > 1)
        for (const auto& br : chance_branches(staged_, b))
          v += staged_.discount() * br.prob * value(br.posterior, steps - 1);
      return v;
    }
    const DecModel& m = staged_.base();
    std::vector<char> seen(m.num_labels(l), 0);
    for (int x = 0; x < static_cast<int>(b.probs.size()); ++x)
      if (b.probs[x] > 0.0) seen[staged_.acting_label(l, x)] = 1;
    std::vector<int> labels;
    for (int k = 0; k < m.num_labels(l); ++k)
      if (seen[k]) labels.push_back(k);
    Prescription gamma = Prescription::constant(l, m.num_labels(l), 0);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
      best = std::max(best, value(advance_prescription(staged_, b, gamma), steps));
      std::size_t j = 0;
      for (; j < labels.size(); ++j) {
        if (++gamma.map[labels[j]] < m.num_actions(l)) break;
        gamma.map[labels[j]] = 0;
      }
      if (j == labels.size()) break;
    }
    return best;
  }

 private:
  const StagedModel& staged_;
  double nodes_ = 0;
};

}  // namespace

double finite_horizon_oracle(const StagedModel& staged, int horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (horizon == 0) return 0.0;
  const double estimate = finite_horizon_nodes(staged.base(), horizon);
  if (estimate > kOracleNodeLimit) {
    std::ostringstream os;
    os << "finite-horizon oracle refused: about " << estimate << " belief nodes for horizon " << horizon
       << " (limit " << kOracleNodeLimit << ")";
    throw OracleError(os.str());
  }
  FiniteHorizon fh(staged);
  return fh.value(initial_belief(staged), horizon);
}

std::vector<std::vector<double>> exact_vi_step(const DecModel& model,
                                               const std::vector<std::vector<double>>& current) {
  if (model.num_agents() != 1 || model.num_labels(0) != 1)
    throw OracleError("exact VI needs one agent with a single private label");
  const int ns = model.num_states();
  const int na = model.num_joint_actions();
  const int no = model.num_observations();
  const int nv = static_cast<int>(current.size());
  if (nv == 0) throw std::invalid_argument("exact VI needs a nonempty vector set");
  const double size = na * std::pow(static_cast<double>(nv), no);
  if (size > kOracleNodeLimit) {
    std::ostringstream os;
    os << "exact VI refused: step would build " << size << " vectors (limit " << kOracleNodeLimit << ")";
    throw OracleError(os.str());
  }
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(size));
  // g[(o * nv + k) * ns + s] = Σ_{s'} P(s', o | s, a) α_k(s')
  std::vector<double> g(static_cast<std::size_t>(no) * nv * ns);
  for (int a = 0; a < na; ++a) {
    std::fill(g.begin(), g.end(), 0.0);
    for (int s = 0; s < ns; ++s)
      for (const auto& t : model.transitions(s, a))
        for (int k = 0; k < nv; ++k) g[(t.observation * nv + k) * ns + s] += t.prob * current[k][t.next_state];
    std::vector<int> mu(no, 0);
    for (;;) {
      std::vector<double> alpha(ns);
      for (int s = 0; s < ns; ++s) {
        double v = 0.0;
        for (int o = 0; o < no; ++o) v += g[(o * nv + mu[o]) * ns + s];
        alpha[s] = model.reward_at(s, a) + model.discount * v;
      }
      out.push_back(std::move(alpha));
      int o = 0;
      for (; o < no; ++o) {
        if (++mu[o] < nv) break;
        mu[o] = 0;
      }
      if (o == no) break;
    }
  }
  return out;
}

std::vector<std::vector<double>> prune_dominated(std::vector<std::vector<double>> set) {
  const int n = static_cast<int>(set.size());
  std::vector<char> removed(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n && !removed[i]; ++j) {
      if (i == j || removed[j]) continue;
      bool ge = true, eq = true;
      for (std::size_t s = 0; s < set[i].size() && ge; ++s) {
        if (set[j][s] < set[i][s]) ge = false;
        if (set[j][s] != set[i][s]) eq = false;
      }
      if (ge && (!eq || j < i)) removed[i] = 1;
    }
  }
  std::vector<std::vector<double>> out;
  for (int i = 0; i < n; ++i)
    if (!removed[i]) out.push_back(std::move(set[i]));
  return out;
}

std::vector<std::vector<double>> exact_vi_oracle(const DecModel& model, int iterations,
                                                 std::vector<std::vector<double>> initial) {
  if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (initial.empty()) initial.assign(1, std::vector<double>(model.num_states(), 0.0));
  auto set = std::move(initial);
  for (int k = 0; k < iterations; ++k) set = prune_dominated(exact_vi_step(model, set));
  return set;
}

}  // namespace chsvi
