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

#include "chsvi/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace chsvi {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class IdTable {
 public:
  IdTable() = default;
  IdTable(const std::vector<std::string>& ids, std::string what) : what_(std::move(what)) {
    for (std::size_t k = 0; k < ids.size(); ++k) index_[ids[k]] = static_cast<int>(k);
  }
  int at(const std::string& id, const std::string& where) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ParseError(where + ": unknown " + what_ + " '" + id + "'");
    return it->second;
  }

 private:
  std::unordered_map<std::string, int> index_;
  std::string what_;
};

std::string line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_string()) throw ParseError(where + "[" + std::to_string(k) + "]: expected a string");
    out.push_back(j[k].get<std::string>());
  }
  return out;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

std::string id(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected an id string");
  return j.get<std::string>();
}

}  // namespace

DecModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_col(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("model file must hold a JSON object");

  DecModel m;
  m.agents = string_list(field(doc, "agents", "model"), "agents");
  const int n = m.num_agents();

  const json& acts = field(doc, "actions", "model");
  if (!acts.is_array() || static_cast<int>(acts.size()) != n)
    throw ParseError("actions: expected one action list per agent");
  for (int i = 0; i < n; ++i)
    m.actions.push_back(string_list(acts[i], "actions[" + std::to_string(i) + "]"));

  m.observations = string_list(field(doc, "observations", "model"), "observations");

  // States with their private labels. Label order follows the optional
  // "private_labels" key, otherwise first appearance.
  const json& states = field(doc, "states", "model");
  if (!states.is_array()) throw ParseError("states: expected an array");
  m.private_labels.assign(n, {});
  std::vector<std::unordered_map<std::string, int>> label_index(n);
  if (doc.contains("private_labels")) {
    const json& pl = doc.at("private_labels");
    if (!pl.is_array() || static_cast<int>(pl.size()) != n)
      throw ParseError("private_labels: expected one label list per agent");
    for (int i = 0; i < n; ++i) {
      m.private_labels[i] = string_list(pl[i], "private_labels[" + std::to_string(i) + "]");
      for (std::size_t k = 0; k < m.private_labels[i].size(); ++k)
        label_index[i][m.private_labels[i][k]] = static_cast<int>(k);
    }
  }
  const bool fixed_labels = doc.contains("private_labels");
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::string where = "states[" + std::to_string(k) + "]";
    m.states.push_back(id(field(states[k], "id", where), where + ".id"));
    auto priv = string_list(field(states[k], "private", where), where + ".private");
    if (static_cast<int>(priv.size()) != n)
      throw ParseError(where + ".private: expected one label per agent");
    std::vector<int> tuple(n);
    for (int i = 0; i < n; ++i) {
      auto it = label_index[i].find(priv[i]);
      if (it == label_index[i].end()) {
        if (fixed_labels)
          throw ParseError(where + ".private[" + std::to_string(i) + "]: unknown label '" +
                           priv[i] + "'");
        it = label_index[i].emplace(priv[i], m.num_labels(i)).first;
        m.private_labels[i].push_back(priv[i]);
      }
      tuple[i] = it->second;
    }
    m.private_of_state.push_back(std::move(tuple));
  }

  const IdTable state_ids(m.states, "state");
  const IdTable obs_ids(m.observations, "observation");
  std::vector<IdTable> action_ids;
  for (int i = 0; i < n; ++i) action_ids.emplace_back(m.actions[i], "action for agent '" + m.agents[i] + "'");

  auto joint_of = [&](const json& a, const std::string& where) {
    if (!a.is_array() || static_cast<int>(a.size()) != n)
      throw ParseError(where + ": expected one action per agent");
    std::vector<int> per(n);
    for (int i = 0; i < n; ++i) {
      const std::string w = where + "[" + std::to_string(i) + "]";
      per[i] = action_ids[i].at(id(a[i], w), w);
    }
    return m.joint_action(per);
  };

  m.discount = number(field(doc, "discount", "model"), "discount");

  const int ns = m.num_states();
  const int nj = m.num_joint_actions();
  m.b0.assign(ns, 0.0);
  const json& b0 = field(doc, "b0", "model");
  if (!b0.is_object()) throw ParseError("b0: expected an object mapping state ids to probabilities");
  for (const auto& [key, value] : b0.items())
    m.b0[state_ids.at(key, "b0")] = number(value, "b0[" + key + "]");

  m.kernel.assign(static_cast<std::size_t>(ns) * nj, {});
  const json& kernel = field(doc, "kernel", "model");
  if (!kernel.is_array()) throw ParseError("kernel: expected an array");
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    const std::string where = "kernel[" + std::to_string(k) + "]";
    const json& rec = kernel[k];
    const int s = state_ids.at(id(field(rec, "s", where), where + ".s"), where + ".s");
    const int a = joint_of(field(rec, "a", where), where + ".a");
    const int sp = state_ids.at(id(field(rec, "sp", where), where + ".sp"), where + ".sp");
    const int o = obs_ids.at(id(field(rec, "o", where), where + ".o"), where + ".o");
    const double p = number(field(rec, "p", where), where + ".p");
    m.kernel[m.row(s, a)].push_back({sp, o, p});
  }

  m.reward.assign(static_cast<std::size_t>(ns) * nj, 0.0);
  std::vector<bool> seen(m.reward.size(), false);
  const json& reward = field(doc, "reward", "model");
  if (!reward.is_array()) throw ParseError("reward: expected an array");
  for (std::size_t k = 0; k < reward.size(); ++k) {
    const std::string where = "reward[" + std::to_string(k) + "]";
    const json& rec = reward[k];
    const int s = state_ids.at(id(field(rec, "s", where), where + ".s"), where + ".s");
    const int a = joint_of(field(rec, "a", where), where + ".a");
    const std::size_t r = m.row(s, a);
    if (seen[r]) throw ParseError(where + ": duplicate reward record");
    seen[r] = true;
    m.reward[r] = number(field(rec, "r", where), where + ".r");
  }

  auto report = validate_model(m);
  if (!report.empty()) throw ValidationError(std::move(report));
  return m;
}

std::string serialize_model(const DecModel& m) {
  ordered_json doc;
  doc["agents"] = m.agents;
  ordered_json states = ordered_json::array();
  for (int s = 0; s < m.num_states(); ++s) {
    std::vector<std::string> priv;
    for (int i = 0; i < m.num_agents(); ++i) priv.push_back(m.private_labels[i][m.private_of_state[s][i]]);
    states.push_back({{"id", m.states[s]}, {"private", priv}});
  }
  doc["states"] = std::move(states);
  doc["private_labels"] = m.private_labels;
  doc["actions"] = m.actions;
  doc["observations"] = m.observations;

  ordered_json b0 = ordered_json::object();
  for (int s = 0; s < m.num_states(); ++s)
    if (m.b0[s] != 0.0) b0[m.states[s]] = m.b0[s];
  doc["b0"] = std::move(b0);

  auto action_names = [&m](int joint) {
    auto parts = m.split_joint_action(joint);
    std::vector<std::string> out;
    for (int i = 0; i < m.num_agents(); ++i) out.push_back(m.actions[i][parts[i]]);
    return out;
  };
  ordered_json kernel = ordered_json::array();
  ordered_json reward = ordered_json::array();
  for (int s = 0; s < m.num_states(); ++s) {
    for (int a = 0; a < m.num_joint_actions(); ++a) {
      const auto names = action_names(a);
      for (const auto& t : m.transitions(s, a))
        kernel.push_back({{"s", m.states[s]},
                          {"a", names},
                          {"sp", m.states[t.next_state]},
                          {"o", m.observations[t.observation]},
                          {"p", t.prob}});
      if (m.reward_at(s, a) != 0.0)
        reward.push_back({{"s", m.states[s]}, {"a", names}, {"r", m.reward_at(s, a)}});
    }
  }
  doc["kernel"] = std::move(kernel);
  doc["reward"] = std::move(reward);
  doc["discount"] = m.discount;
  return doc.dump(1);
}

DecModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void save_model(const DecModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << serialize_model(model) << "\n";
}

}  // namespace chsvi
