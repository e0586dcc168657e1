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

#include "chsvi/policy.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace chsvi {

using nlohmann::json;

CoordinationPolicy::CoordinationPolicy(int num_agents, std::vector<int> stage_sizes,
                                       std::vector<std::vector<AlphaVector>> stages)
    : num_agents_(num_agents), stage_sizes_(std::move(stage_sizes)), stages_(std::move(stages)) {
  if (static_cast<int>(stage_sizes_.size()) != num_agents_ + 1 ||
      static_cast<int>(stages_.size()) != num_agents_ + 1)
    throw PolicyError("policy needs one vector list per stage");
  for (int l = 0; l <= num_agents_; ++l)
    for (const auto& a : stages_[l]) {
      if (static_cast<int>(a.values.size()) != stage_sizes_[l])
        throw PolicyError("policy vector size does not match stage " + std::to_string(l));
      if (l < num_agents_ && !a.tag) throw PolicyError("prescription-stage vector without a tag");
    }
}

int CoordinationPolicy::argmax(const StagedBelief& b) const {
  if (b.stage < 0 || b.stage > num_agents_) throw PolicyError("belief stage out of range");
  const auto& set = stages_[b.stage];
  if (set.empty()) throw PolicyError("no vectors at stage " + std::to_string(b.stage));
  int best = -1;
  double top = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(set.size()); ++k) {
    double v = 0.0;
    for (std::size_t x = 0; x < b.probs.size(); ++x)
      if (b.probs[x] != 0.0) v += b.probs[x] * set[k].values[x];
    if (v > top || (v == top && set[k].birth < set[best].birth)) {
      top = v;
      best = k;
    }
  }
  return best;
}

std::optional<Prescription> CoordinationPolicy::act(const StagedBelief& b) const {
  if (b.stage == num_agents_) return std::nullopt;
  return stages_[b.stage][argmax(b)].tag;
}

double CoordinationPolicy::value(const StagedBelief& b) const {
  const auto& a = stages_[b.stage][argmax(b)];
  double v = 0.0;
  for (std::size_t x = 0; x < b.probs.size(); ++x) v += b.probs[x] * a.values[x];
  return v;
}

void CoordinationPolicy::check_compatible(const StagedModel& staged) const {
  if (num_agents_ != staged.num_agents()) throw PolicyError("policy agent count differs from the model");
  for (int l = 0; l < staged.num_stages(); ++l) {
    if (stage_sizes_[l] != staged.stage_size(l))
      throw PolicyError("policy stage " + std::to_string(l) + " has size " + std::to_string(stage_sizes_[l]) +
                        ", model has " + std::to_string(staged.stage_size(l)));
    if (l < num_agents_)
      for (const auto& a : stages_[l])
        if (a.tag->agent != l || static_cast<int>(a.tag->map.size()) != staged.base().num_labels(l))
          throw PolicyError("policy prescription does not fit agent " + std::to_string(l));
  }
}

std::string CoordinationPolicy::to_json() const {
  json j;
  j["format"] = "chsvi-policy";
  j["version"] = 1;
  j["num_agents"] = num_agents_;
  j["stage_sizes"] = stage_sizes_;
  json stages = json::array();
  for (const auto& set : stages_) {
    json list = json::array();
    for (const auto& a : set) {
      json v;
      v["birth"] = a.birth;
      v["values"] = a.values;
      v["prescription"] = a.tag ? json(a.tag->map) : json(nullptr);
      list.push_back(std::move(v));
    }
    stages.push_back(std::move(list));
  }
  j["stages"] = std::move(stages);
  return j.dump();
}

CoordinationPolicy CoordinationPolicy::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PolicyError(std::string("malformed policy JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "chsvi-policy") throw PolicyError("not a policy file");
    const int n = j.at("num_agents").get<int>();
    auto sizes = j.at("stage_sizes").get<std::vector<int>>();
    std::vector<std::vector<AlphaVector>> stages;
    int l = 0;
    for (const auto& list : j.at("stages")) {
      std::vector<AlphaVector> set;
      for (const auto& v : list) {
        AlphaVector a;
        a.stage = l;
        a.birth = v.at("birth").get<std::int64_t>();
        a.values = v.at("values").get<std::vector<double>>();
        if (!v.at("prescription").is_null()) a.tag = Prescription{l, v.at("prescription").get<std::vector<int>>()};
        set.push_back(std::move(a));
      }
      stages.push_back(std::move(set));
      ++l;
    }
    return CoordinationPolicy(n, std::move(sizes), std::move(stages));
  } catch (const json::exception& e) {
    throw PolicyError(std::string("invalid policy file: ") + e.what());
  }
}

CoordinationPolicy direct_control_policy(const LowerBoundSet& lb) {
  const auto& staged = lb.staged();
  std::vector<int> sizes;
  std::vector<std::vector<AlphaVector>> stages;
  for (int l = 0; l < staged.num_stages(); ++l) {
    sizes.push_back(staged.stage_size(l));
    stages.push_back(lb.vectors(l));
  }
  return CoordinationPolicy(staged.num_agents(), std::move(sizes), std::move(stages));
}

void save_policy(const CoordinationPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << policy.to_json() << '\n';
}

CoordinationPolicy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return CoordinationPolicy::from_json(ss.str());
}

}  // namespace chsvi
