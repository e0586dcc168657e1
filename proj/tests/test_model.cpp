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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "chsvi/envs.hpp"
#include "chsvi/model.hpp"
#include "chsvi/model_io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "toy_models.hpp"

using namespace chsvi;

namespace {

int state_id(const DecModel& m, const std::string& name) {
  const auto it = std::find(m.states.begin(), m.states.end(), name);
  REQUIRE(it != m.states.end());
  return static_cast<int>(it - m.states.begin());
}

int obs_id(const DecModel& m, const std::string& name) {
  const auto it = std::find(m.observations.begin(), m.observations.end(), name);
  REQUIRE(it != m.observations.end());
  return static_cast<int>(it - m.observations.begin());
}

double kernel_prob(const DecModel& m, int s, int joint, int next, int obs) {
  double p = 0.0;
  for (const auto& t : m.transitions(s, joint))
    if (t.next_state == next && t.observation == obs) p += t.prob;
  return p;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("chsvi_test_" + name);
}

const DecTigerParams kTiger{2, 1, 0.9};

}  // namespace

TEST_CASE("validation reports constructed violations") {
  std::mt19937 rng(1);
  auto m = toy::random_model(rng, {});
  CHECK(validate_model(m).empty());

  auto bad_row = m;
  for (auto& t : bad_row.kernel[3]) t.prob *= 0.98;
  const auto r1 = validate_model(bad_row);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].kind == "row mass");

  auto bad_b0 = m;
  std::fill(bad_b0.b0.begin(), bad_b0.b0.end(), 0.0);
  const auto r2 = validate_model(bad_b0);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].kind == "b0 mass");

  CHECK_THROWS_AS(StagedModel{bad_row}, ModelError);
}

TEST_CASE("DecTiger rows match hand computation") {
  const auto m = gen_dectiger(kTiger);
  CHECK(validate_model(m).empty());
  const double p = kTiger.correct_prob(), q = kTiger.wrong_prob();
  CHECK(std::abs(p - 0.85) < 1e-12);
  CHECK(std::abs(p + q - 1.0) < 1e-12);
  const int none = obs_id(m, "none");
  const int listen2 = m.joint_action(std::vector<int>{kListen, kListen});

  // Start state, both listen: the tiger stays, roars are private.
  const int s0 = state_id(m, "t0|none|none");
  CHECK(m.transitions(s0, listen2).size() == 4);
  CHECK(std::abs(kernel_prob(m, s0, listen2, state_id(m, "t0|z0a0|z0a0"), none) - p * p) < 1e-12);
  CHECK(std::abs(kernel_prob(m, s0, listen2, state_id(m, "t0|z0a0|z1a0"), none) - p * q) < 1e-12);
  CHECK(std::abs(kernel_prob(m, s0, listen2, state_id(m, "t0|z1a0|z1a0"), none) - q * q) < 1e-12);

  // Start state, agent 1 opens door 0: reset and uniform noise.
  const int open_listen = m.joint_action(std::vector<int>{1, kListen});
  CHECK(m.transitions(s0, open_listen).size() == 8);
  for (const auto& t : m.transitions(s0, open_listen)) {
    CHECK(t.observation == none);
    CHECK(std::abs(t.prob - 0.125) < 1e-12);
  }

  // A delayed state: the old block becomes the common observation.
  const int s1 = state_id(m, "t1|z1a0|z0a0");
  const int block = obs_id(m, "z1a0|z0a0");
  CHECK(std::abs(kernel_prob(m, s1, listen2, state_id(m, "t1|z1a0|z1a0"), block) - p * p) < 1e-12);
  CHECK(std::abs(kernel_prob(m, s1, listen2, state_id(m, "t1|z0a0|z1a0"), block) - q * p) < 1e-12);
  CHECK(kernel_prob(m, s1, listen2, state_id(m, "t0|z1a0|z1a0"), block) == 0.0);
}

TEST_CASE("DecTiger rewards") {
  const auto m = gen_dectiger(kTiger);
  const int s = state_id(m, "t0|none|none");  // tiger behind door 0 (action 1)
  auto r = [&](int a1, int a2) { return m.reward_at(s, m.joint_action(std::vector<int>{a1, a2})); };
  CHECK(r(kListen, kListen) == -2.0);
  CHECK(r(1, 1) == -50.0);
  CHECK(r(kListen, 2) == 9.0);
  CHECK(r(2, kListen) == 9.0);
  CHECK(r(2, 2) == 20.0);
}

TEST_CASE("DecTiger sizes") {
  const auto m2 = gen_dectiger(kTiger);
  CHECK(m2.num_states() == 74);
  CHECK(m2.num_observations() == 37);
  CHECK(prescription_count(m2, 0) == std::pow(3.0, 7));
  CHECK(prescription_count(m2, 1) == std::pow(3.0, 7));
  const StagedModel st(m2);
  CHECK(st.stage_size(0) == 74);
  CHECK(st.stage_size(1) == 222);
  CHECK(st.stage_size(2) == 666);

  const auto m3 = gen_dectiger({3, 1, 0.9});
  CHECK(m3.num_states() == 435);
  CHECK(m3.num_observations() == 145);
  CHECK(prescription_count(m3, 0) == std::pow(4.0, 13));
}

TEST_CASE("DecTiger listening noise is conditionally independent") {
  const auto m = gen_dectiger(kTiger);
  const int listen2 = m.joint_action(std::vector<int>{kListen, kListen});
  for (int s = 0; s < m.num_states(); ++s) {
    // Joint distribution of the two new private pairs given the new tiger.
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> z1, z2;
    double total = 0.0;
    for (const auto& t : m.transitions(s, listen2)) {
      const auto& priv = m.private_of_state[t.next_state];
      const std::string& l1 = m.private_labels[0][priv[0]];
      const std::string& l2 = m.private_labels[1][priv[1]];
      const int a = l1[1] - '0', b = l2[1] - '0';  // "z<k>a<j>": the roar digit
      joint[{a, b}] += t.prob;
      z1[a] += t.prob;
      z2[b] += t.prob;
      total += t.prob;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (const auto& [ab, pr] : joint) CHECK(std::abs(pr - z1[ab.first] * z2[ab.second]) < 1e-12);
  }
  // Any door opening: observation law is uniform and state independent.
  const int open = m.joint_action(std::vector<int>{1, 2});
  std::map<int, double> first;
  for (const auto& t : m.transitions(state_id(m, "t0|none|none"), open)) first[t.observation] += t.prob;
  for (int s = 0; s < m.num_states(); ++s) {
    std::map<int, double> law;
    for (const auto& t : m.transitions(s, open)) law[t.observation] += t.prob;
    REQUIRE(law.size() == 1);  // the common observation is set by the state's history
  }
  CHECK(first.size() == 1);
}

TEST_CASE("staged index maps are mutually inverse") {
  const StagedModel st(gen_dectiger(kTiger));
  for (int l = 0; l < st.num_stages(); ++l) {
    for (int x = 0; x < st.stage_size(l); ++x) {
      const auto [s, acts] = st.decompose(l, x);
      CHECK(static_cast<int>(acts.size()) == l);
      CHECK(st.compose(l, s, acts) == x);
      CHECK(st.base_state(l, x) == s);
    }
  }
  std::mt19937 rng(2);
  toy::Shape one;
  one.actions = {2};
  one.labels = {1};
  const StagedModel single(toy::random_model(rng, one));
  CHECK(single.num_stages() == 2);
  CHECK(single.stage_size(0) == 2);
  CHECK(single.stage_size(1) == 4);
}

TEST_CASE("prescription lift examples") {
  std::mt19937 rng(3);
  const StagedModel st(toy::random_model(rng, {}));
  const StagedBelief uniform{0, {0.5, 0.5}};
  const auto lifted = advance_prescription(st, uniform, Prescription::constant(0, 2, 1));
  CHECK(lifted.stage == 1);
  CHECK(lifted.probs == std::vector<double>{0.0, 0.5, 0.0, 0.5});

  const StagedBelief point{0, {0.0, 1.0}};
  const Prescription g{0, {0, 1}};
  const auto moved = advance_prescription(st, point, g);
  const int label = st.acting_label(0, 1);
  CHECK(moved.probs[st.child(0, 1, g(label))] == 1.0);
  CHECK(moved.mass() == 1.0);

  CHECK_THROWS_AS(advance_prescription(st, uniform, Prescription::constant(1, 2, 0)), std::invalid_argument);

  // DecTiger start with agent 1 listening.
  const StagedModel tiger(gen_dectiger(kTiger));
  const auto b1 = advance_prescription(tiger, initial_belief(tiger),
                                       Prescription::constant(0, tiger.base().num_labels(0), kListen));
  const auto supp = b1.support();
  REQUIRE(supp.size() == 2);
  for (int x : supp) {
    CHECK(b1.probs[x] == 0.5);
    const auto [s, acts] = tiger.decompose(1, x);
    CHECK(acts[0] == kListen);
    CHECK(tiger.base().private_labels[0][tiger.base().private_of_state[s][0]] == "none");
  }
}

TEST_CASE("prescription lift preserves mass and has the label L1 identity") {
  std::mt19937 rng(4);
  toy::Shape shape;
  shape.states = 5;
  shape.labels = {3, 3};
  shape.actions = {3, 2};
  const StagedModel st(toy::random_model(rng, shape));
  for (int trial = 0; trial < 50; ++trial) {
    const StagedBelief b{0, toy::random_belief(rng, 5)};
    Prescription g{0, {static_cast<int>(rng() % 3), static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)}};
    const int label = static_cast<int>(rng() % 3);
    Prescription h = g;
    h.map[label] = (h.map[label] + 1) % 3;
    const auto bg = advance_prescription(st, b, g);
    const auto bh = advance_prescription(st, b, h);
    CHECK(std::abs(bg.mass() - b.mass()) < 1e-15);
    double l1 = 0.0, mass = 0.0;
    for (std::size_t x = 0; x < bg.probs.size(); ++x) l1 += std::abs(bg.probs[x] - bh.probs[x]);
    for (int x = 0; x < 5; ++x)
      if (st.acting_label(0, x) == label) mass += b.probs[x];
    CHECK(std::abs(l1 - 2.0 * mass) < 1e-12);
  }
}

TEST_CASE("chance update examples") {
  std::mt19937 rng(5);
  auto m = toy::random_model(rng, {});
  // Deterministic observation 1 everywhere.
  for (auto& row : m.kernel)
    for (auto& t : row) t.observation = 1;
  for (auto& row : m.kernel) {
    std::map<int, double> merged;
    for (const auto& t : row) merged[t.next_state] += t.prob;
    row.clear();
    for (const auto& [s2, pr] : merged) row.push_back({s2, 1, pr});
  }
  const StagedModel st(m);
  const StagedBelief b{2, toy::random_belief(rng, st.stage_size(2))};
  const auto out = advance_chance(st, b, 1);
  CHECK(std::abs(out.prob - 1.0) < 1e-12);
  std::vector<double> push(2, 0.0);
  for (int x = 0; x < st.stage_size(2); ++x)
    for (const auto& t : st.chance_kernel(x)) push[t.next_state] += b.probs[x] * t.prob;
  REQUIRE(out.posterior);
  for (int s = 0; s < 2; ++s) CHECK(std::abs(out.posterior->probs[s] - push[s]) < 1e-12);
  const auto none = advance_chance(st, b, 0);
  CHECK(none.prob == 0.0);
  CHECK_FALSE(none.posterior.has_value());

  // Two equally likely observations with disjoint posteriors.
  DecModel coin = m;
  for (auto& row : coin.kernel) row = {{0, 0, 0.5}, {1, 1, 0.5}};
  const StagedModel cs(coin);
  const auto branches = chance_branches(cs, StagedBelief{2, toy::random_belief(rng, cs.stage_size(2))});
  REQUIRE(branches.size() == 2);
  for (const auto& br : branches) CHECK(std::abs(br.prob - 0.5) < 1e-12);
  CHECK(branches[0].posterior.probs == std::vector<double>{1.0, 0.0});
}

TEST_CASE("observation probabilities sum to one") {
  std::mt19937 rng(6);
  toy::Shape shape;
  shape.states = 4;
  shape.observations = 3;
  const StagedModel st(toy::random_model(rng, shape));
  for (int trial = 0; trial < 100; ++trial) {
    const StagedBelief b{2, toy::random_belief(rng, st.stage_size(2))};
    double total = 0.0;
    for (int o = 0; o < 3; ++o) total += advance_chance(st, b, o).prob;
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("DecTiger matching roars give the squared likelihood ratio") {
  const StagedModel st(gen_dectiger(kTiger));
  const auto& m = st.base();
  StagedBelief b = initial_belief(st);
  for (int l = 0; l < 2; ++l) b = advance_prescription(st, b, Prescription::constant(l, m.num_labels(l), kListen));
  const auto out = advance_chance(st, b, obs_id(m, "none"));
  REQUIRE(out.posterior);
  const double p = kTiger.correct_prob(), q = kTiger.wrong_prob();
  // Restricted to both agents privately hearing the roar at door 0.
  const double t0 = out.posterior->probs[state_id(m, "t0|z0a0|z0a0")];
  const double t1 = out.posterior->probs[state_id(m, "t1|z0a0|z0a0")];
  CHECK(std::abs(t0 / (t0 + t1) - p * p / (p * p + q * q)) < 1e-12);
  CHECK(std::abs(t1 / (t0 + t1) - q * q / (p * p + q * q)) < 1e-12);
}

TEST_CASE("MultiCast dynamics and rewards") {
  MultiCastParams prm;
  const auto m = gen_multicast(prm);
  CHECK(validate_model(m).empty());
  CHECK(m.num_states() == 81);
  CHECK(StagedModel(m).stage_size(2) == 324);
  CHECK(m.num_observations() == 4);
  auto at = [&](int n1, int n2) { return state_id(m, std::to_string(n1) + "," + std::to_string(n2)); };
  auto joint = [&](int a1, int a2) { return m.joint_action(std::vector<int>{a1, a2}); };
  CHECK(m.b0[at(0, 0)] == 1.0);

  // From (0,0) with nobody transmitting only arrivals move the buffers.
  const int idle = joint(kNoTransmit, kNoTransmit);
  const double p1 = prm.arrival1, p2 = prm.arrival2;
  CHECK(std::abs(kernel_prob(m, at(0, 0), idle, at(1, 1), idle) - p1 * p2) < 1e-12);
  CHECK(std::abs(kernel_prob(m, at(0, 0), idle, at(0, 0), idle) - (1 - p1) * (1 - p2)) < 1e-12);

  // Collision from (1,1): both keep their packet before arrivals.
  const int both = joint(kTransmit, kTransmit);
  CHECK(std::abs(kernel_prob(m, at(1, 1), both, at(1, 1), both) - (1 - p1) * (1 - p2)) < 1e-12);
  CHECK(kernel_prob(m, at(1, 1), both, at(0, 1), both) == 0.0);

  // Full buffer 1 transmitting: -C1 - c_D p1 - c_T, plus agent 2's -n2.
  const double r = m.reward_at(at(8, 0), joint(kTransmit, kNoTransmit));
  CHECK(std::abs(r - (-8.0 - 2.0 * p1 - 0.5)) < 1e-12);

  for (int s = 0; s < m.num_states(); ++s)
    for (int a = 0; a < m.num_joint_actions(); ++a) CHECK(m.reward_at(s, a) <= 0.0);
}

TEST_CASE("relaxation shares all private information") {
  const auto m = gen_dectiger(kTiger);
  const auto r = relax_model(m);
  CHECK(validate_model(r).empty());
  CHECK(r.num_agents() == 1);
  CHECK(r.num_actions(0) == 9);
  CHECK(r.num_labels(0) == 1);
  CHECK(r.num_states() == m.num_states());
  CHECK(single_private_tuple(m, m.b0));

  const auto mc = relax_model(gen_multicast({}));
  CHECK(mc.num_observations() == 4 * 81);
}

TEST_CASE("model files round trip") {
  const auto m = gen_dectiger(kTiger);
  const auto path = temp_file("dectiger.json");
  save_model(m, path);
  CHECK(load_model(path) == m);
  std::filesystem::remove(path);

  std::mt19937 rng(7);
  const auto toy_model = toy::random_model(rng, {});
  CHECK(parse_model(serialize_model(toy_model)) == toy_model);
}

TEST_CASE("model file errors") {
  std::mt19937 rng(8);
  const auto text = serialize_model(toy::random_model(rng, {}));

  auto doc = nlohmann::json::parse(text);
  doc["kernel"][0]["a"][0] = "bogus";
  try {
    parse_model(doc.dump());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("kernel[") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }

  auto m = toy::random_model(rng, {});
  for (auto& t : m.kernel[0]) t.prob *= 0.5;
  const auto path = temp_file("half.json");
  {
    std::ofstream out(path);
    out << serialize_model(m);
  }
  try {
    load_model(path);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.report().size() == 1);
    CHECK(e.report()[0].kind == "row mass");
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(parse_model("{ not json"), ParseError);
}
