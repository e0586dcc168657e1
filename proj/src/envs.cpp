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

#include "chsvi/envs.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace chsvi {
namespace {

// Histories of (observation, action) pairs, encoded as pair indices
// z * |A| + a, oldest first.
using History = std::vector<int>;

void enumerate_histories(int pairs, int length, History& prefix,
                         std::vector<History>& out) {
  if (static_cast<int>(prefix.size()) == length) {
    out.push_back(prefix);
    return;
  }
  for (int p = 0; p < pairs; ++p) {
    prefix.push_back(p);
    enumerate_histories(pairs, length, prefix, out);
    prefix.pop_back();
  }
}

std::string pair_name(int pair, int num_actions) {
  return "z" + std::to_string(pair / num_actions) + "a" + std::to_string(pair % num_actions);
}

std::string history_name(const History& h, int num_actions) {
  if (h.empty()) return "none";
  std::string s;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (k) s += ".";
    s += pair_name(h[k], num_actions);
  }
  return s;
}

double tiger_reward(int doors, int tiger, int a1, int a2) {
  enum Kind { kListens, kTigerDoor, kOtherDoor };
  auto kind = [tiger](int a) {
    if (a == kListen) return kListens;
    return a - 1 == tiger ? kTigerDoor : kOtherDoor;
  };
  const Kind k1 = kind(a1), k2 = kind(a2);
  const double n = doors;
  if (k1 == kListens && k2 == kListens) return -2.0;
  if ((k1 == kListens && k2 == kTigerDoor) || (k1 == kTigerDoor && k2 == kListens)) return -101.0;
  if ((k1 == kListens && k2 == kOtherDoor) || (k1 == kOtherDoor && k2 == kListens))
    return 20.0 / n - 1.0;
  if (k1 == kTigerDoor && k2 == kTigerDoor) return -50.0;
  if (k1 == kOtherDoor && k2 == kOtherDoor) return 40.0 / n;
  return -100.0;
}

}  // namespace

DecModel gen_dectiger(const DecTigerParams& params) {
  if (params.doors < 2) throw std::invalid_argument("DecTiger needs at least 2 doors");
  if (params.delay < 1) throw std::invalid_argument("DecTiger needs a sharing delay >= 1");
  if (!(params.discount > 0.0 && params.discount < 1.0))
    throw std::invalid_argument("discount must lie in (0, 1)");

  const int doors = params.doors;
  const int na = doors + 1;
  const int pairs = doors * na;
  const double p = params.correct_prob();
  const double q = params.wrong_prob();

  DecModel m;
  m.agents = {"agent1", "agent2"};
  std::vector<std::string> acts{"listen"};
  for (int k = 0; k < doors; ++k) acts.push_back("open" + std::to_string(k));
  m.actions = {acts, acts};
  m.discount = params.discount;

  // Private labels: all histories of length 0..d.
  std::vector<std::vector<History>> by_length(params.delay + 1);
  std::map<History, int> label_index;
  std::vector<std::string> labels;
  for (int len = 0; len <= params.delay; ++len) {
    History prefix;
    enumerate_histories(pairs, len, prefix, by_length[len]);
    for (const auto& h : by_length[len]) {
      label_index[h] = static_cast<int>(labels.size());
      labels.push_back(history_name(h, na));
    }
  }
  m.private_labels = {labels, labels};

  // Observations: nothing, or the joint (z, a) block leaving the delay window.
  m.observations.push_back("none");
  for (int p1 = 0; p1 < pairs; ++p1)
    for (int p2 = 0; p2 < pairs; ++p2)
      m.observations.push_back(pair_name(p1, na) + "|" + pair_name(p2, na));
  auto block_obs = [pairs](int p1, int p2) { return 1 + p1 * pairs + p2; };

  // States: (tiger, h1, h2) with |h1| = |h2|.
  struct Key {
    int tiger;
    History h1, h2;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, int> state_index;
  std::vector<Key> keys;
  for (int t = 0; t < doors; ++t)
    for (int len = 0; len <= params.delay; ++len)
      for (const auto& h1 : by_length[len])
        for (const auto& h2 : by_length[len]) {
          state_index[{t, h1, h2}] = static_cast<int>(keys.size());
          keys.push_back({t, h1, h2});
          m.states.push_back("t" + std::to_string(t) + "|" + history_name(h1, na) + "|" +
                             history_name(h2, na));
          m.private_of_state.push_back({label_index.at(h1), label_index.at(h2)});
        }

  const int ns = static_cast<int>(keys.size());
  m.b0.assign(ns, 0.0);
  for (int t = 0; t < doors; ++t) m.b0[state_index.at({t, {}, {}})] = 1.0 / doors;

  const int nj = na * na;
  m.kernel.resize(static_cast<std::size_t>(ns) * nj);
  m.reward.resize(static_cast<std::size_t>(ns) * nj);
  for (int s = 0; s < ns; ++s) {
    const Key& key = keys[s];
    for (int a1 = 0; a1 < na; ++a1) {
      for (int a2 = 0; a2 < na; ++a2) {
        const int joint = a1 * na + a2;
        m.reward[m.row(s, joint)] = tiger_reward(doors, key.tiger, a1, a2);
        const bool both_listen = a1 == kListen && a2 == kListen;
        std::map<std::pair<int, int>, double> outcomes;
        for (int t2 = 0; t2 < doors; ++t2) {
          const double pt = both_listen ? (t2 == key.tiger ? 1.0 : 0.0) : 1.0 / doors;
          if (pt == 0.0) continue;
          for (int z1 = 0; z1 < doors; ++z1) {
            for (int z2 = 0; z2 < doors; ++z2) {
              const double pz1 = both_listen ? (z1 == t2 ? p : q) : 1.0 / doors;
              const double pz2 = both_listen ? (z2 == t2 ? p : q) : 1.0 / doors;
              History h1 = key.h1, h2 = key.h2;
              h1.push_back(z1 * na + a1);
              h2.push_back(z2 * na + a2);
              int obs = 0;
              if (static_cast<int>(h1.size()) > params.delay) {
                obs = block_obs(h1.front(), h2.front());
                h1.erase(h1.begin());
                h2.erase(h2.begin());
              }
              outcomes[{state_index.at({t2, h1, h2}), obs}] += pt * pz1 * pz2;
            }
          }
        }
        auto& row = m.kernel[m.row(s, joint)];
        for (const auto& [so, prob] : outcomes) row.push_back({so.first, so.second, prob});
      }
    }
  }
  return m;
}

DecModel gen_multicast(const MultiCastParams& params) {
  if (params.capacity1 < 1 || params.capacity2 < 1)
    throw std::invalid_argument("MultiCast buffer sizes must be >= 1");
  for (double pa : {params.arrival1, params.arrival2})
    if (!(pa > 0.0 && pa < 1.0)) throw std::invalid_argument("arrival probabilities must lie in (0, 1)");
  if (!(params.discount > 0.0 && params.discount < 1.0))
    throw std::invalid_argument("discount must lie in (0, 1)");

  const int c[2] = {params.capacity1, params.capacity2};
  const double arrival[2] = {params.arrival1, params.arrival2};

  DecModel m;
  m.agents = {"user1", "user2"};
  m.actions = {{"NT", "T"}, {"NT", "T"}};
  m.discount = params.discount;
  for (int i = 0; i < 2; ++i) {
    std::vector<std::string> labels;
    for (int k = 0; k <= c[i]; ++k) labels.push_back(std::to_string(k));
    m.private_labels.push_back(labels);
  }
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      m.observations.push_back(m.actions[0][a1] + "|" + m.actions[1][a2]);

  auto index = [&c](int n1, int n2) { return n1 * (c[1] + 1) + n2; };
  for (int n1 = 0; n1 <= c[0]; ++n1)
    for (int n2 = 0; n2 <= c[1]; ++n2) {
      m.states.push_back(std::to_string(n1) + "," + std::to_string(n2));
      m.private_of_state.push_back({n1, n2});
    }
  const int ns = m.num_states();
  m.b0.assign(ns, 0.0);
  m.b0[index(0, 0)] = 1.0;

  m.kernel.resize(static_cast<std::size_t>(ns) * 4);
  m.reward.resize(static_cast<std::size_t>(ns) * 4);
  for (int n1 = 0; n1 <= c[0]; ++n1) {
    for (int n2 = 0; n2 <= c[1]; ++n2) {
      const int s = index(n1, n2);
      const int occupancy[2] = {n1, n2};
      for (int a1 = 0; a1 < 2; ++a1) {
        for (int a2 = 0; a2 < 2; ++a2) {
          const int act[2] = {a1, a2};
          const int joint = a1 * 2 + a2;
          double r = 0.0;
          for (int i = 0; i < 2; ++i) {
            r -= occupancy[i];
            if (occupancy[i] == c[i]) r -= params.drop_cost * arrival[i];
            if (act[i] == kTransmit) r -= params.transmit_cost;
          }
          m.reward[m.row(s, joint)] = r;

          // Transmission resolves before arrivals.
          int after[2] = {n1, n2};
          for (int i = 0; i < 2; ++i)
            if (act[i] == kTransmit && act[1 - i] == kNoTransmit && after[i] > 0) --after[i];
          std::map<int, double> next;
          for (int e1 = 0; e1 < 2; ++e1) {
            for (int e2 = 0; e2 < 2; ++e2) {
              const int event[2] = {e1, e2};
              double pr = 1.0;
              int fin[2];
              for (int i = 0; i < 2; ++i) {
                pr *= event[i] ? arrival[i] : 1.0 - arrival[i];
                fin[i] = std::min(c[i], after[i] + event[i]);
              }
              next[index(fin[0], fin[1])] += pr;
            }
          }
          auto& row = m.kernel[m.row(s, joint)];
          for (const auto& [sp, pr] : next) row.push_back({sp, joint, pr});
        }
      }
    }
  }
  return m;
}

DecModel relax_model(const DecModel& model) {
  const int ns = model.num_states();
  const int nj = model.num_joint_actions();

  DecModel r;
  r.agents = {"coordinator"};
  std::vector<std::string> joint_names;
  for (int a = 0; a < nj; ++a) {
    auto parts = model.split_joint_action(a);
    std::string name;
    for (int i = 0; i < model.num_agents(); ++i) {
      if (i) name += "|";
      name += model.actions[i][parts[i]];
    }
    joint_names.push_back(name);
  }
  r.actions = {joint_names};
  r.private_labels = {{"common"}};
  r.states = model.states;
  r.private_of_state.assign(ns, std::vector<int>{0});
  r.b0 = model.b0;
  r.reward = model.reward;
  r.discount = model.discount;

  // Observations (o, m_{s'}), in lexicographic order of (o, private tuple).
  std::map<std::pair<int, std::vector<int>>, int> obs;
  for (const auto& row : model.kernel)
    for (const auto& t : row) obs.try_emplace({t.observation, model.private_of_state[t.next_state]}, 0);
  for (auto& [key, idx] : obs) {
    idx = static_cast<int>(r.observations.size());
    std::string name = model.observations[key.first] + "#";
    for (int i = 0; i < model.num_agents(); ++i) {
      if (i) name += "|";
      name += model.private_labels[i][key.second[i]];
    }
    r.observations.push_back(name);
  }
  r.kernel.resize(model.kernel.size());
  for (std::size_t k = 0; k < model.kernel.size(); ++k)
    for (const auto& t : model.kernel[k])
      r.kernel[k].push_back(
          {t.next_state, obs.at({t.observation, model.private_of_state[t.next_state]}), t.prob});
  return r;
}

bool single_private_tuple(const DecModel& model, const std::vector<double>& belief) {
  const std::vector<int>* first = nullptr;
  for (int s = 0; s < model.num_states(); ++s) {
    if (belief[s] <= 0.0) continue;
    if (!first) {
      first = &model.private_of_state[s];
    } else if (*first != model.private_of_state[s]) {
      return false;
    }
  }
  return true;
}

}  // namespace chsvi
