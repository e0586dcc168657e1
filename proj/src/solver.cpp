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

#include "chsvi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "chsvi/envs.hpp"
#include "json.hpp"

namespace chsvi {

namespace {

double seconds_since(Chsvi::Clock::time_point t0) {
  return std::chrono::duration<double>(Chsvi::Clock::now() - t0).count();
}

Chsvi::Clock::time_point deadline_after(double seconds) {
  const auto cap = std::chrono::hours(24 * 365);
  const auto d = seconds >= 3600.0 * 24 * 365 ? cap : std::chrono::duration<double>(seconds);
  return Chsvi::Clock::now() + std::chrono::duration_cast<Chsvi::Clock::duration>(d);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0, 1)");
  if (!(precision > 0.0)) throw std::invalid_argument("precision must be positive");
  if (!(time_limit_s > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (max_depth < 0) throw std::invalid_argument("max depth must be nonnegative");
  if (!(presolve_precision > 0.0)) throw std::invalid_argument("presolve precision must be positive");
  if (!(presolve_fraction >= 0.0 && presolve_fraction < 1.0))
    throw std::invalid_argument("presolve fraction must lie in [0, 1)");
  if (tick_every < 1) throw std::invalid_argument("tick interval must be at least 1");
}

int default_max_depth(const DecModel& model, double precision) {
  const int n = model.num_agents();
  const double span = value_upper_limit(model) - value_lower_limit(model);
  if (model.discount <= 0.0 || span <= precision) return n + 1;
  const double steps = std::ceil(std::log(span / precision) / std::log(1.0 / model.discount));
  return std::max(n + 1, static_cast<int>(5.0 * n * steps));
}

Chsvi::Chsvi(const StagedModel& staged, SolverConfig cfg, const RelaxedSolution* relaxed)
    : staged_(&staged),
      cfg_(cfg),
      lower_(init_lower_bound(staged)),
      upper_(init_upper_bound(staged, relaxed, cfg.bp_mode)),
      b0_(initial_belief(staged)),
      max_depth_(cfg.max_depth > 0 ? cfg.max_depth : default_max_depth(staged.base(), cfg.precision)),
      start_(Clock::now()),
      deadline_(Clock::time_point::max()),
      best_upper_(std::numeric_limits<double>::infinity()),
      best_lower_(-std::numeric_limits<double>::infinity()) {
  cfg_.validate();
  upper_.set_seed(cfg.seed);
}

void Chsvi::record() {
  ProgressRecord r;
  r.t_s = seconds_since(start_);
  // Every recorded value is a sound bound, so the bracket reported is the
  // tightest seen so far.
  best_upper_ = std::min(best_upper_, upper_.value(b0_));
  best_lower_ = std::max(best_lower_, lower_.value(b0_).value);
  r.upper = best_upper_;
  r.lower = best_lower_;
  for (int l = 0; l < staged_->num_stages(); ++l) {
    r.num_vectors.push_back(lower_.size(l));
    r.num_constraints.push_back(upper_.belief_rows(l));
  }
  r.explore_calls = explore_calls_;
  r.lp_solves = upper_.lp_solves();
  r.bp_solves = upper_.bp_solves();
  log_.push_back(r);
  if (observer_) observer_(r);
}

NextStep Chsvi::choose_next(const StagedBelief& b, const std::optional<Prescription>& gamma,
                            double epsilon) {
  if (b.stage < staged_->chance_stage()) {
    if (!gamma) throw std::logic_error("choose_next needs a prescription at a prescription stage");
    return {advance_prescription(*staged_, b, *gamma), epsilon, -1};
  }
  const double next_eps = epsilon / staged_->discount();
  NextStep best;
  double top = -std::numeric_limits<double>::infinity();
  for (auto& br : chance_branches(*staged_, b)) {
    const double score =
        br.prob * (upper_.value(br.posterior) - lower_.value(br.posterior).value - next_eps);
    if (best.observation < 0 || score > top) {
      top = score;
      best = {std::move(br.posterior), next_eps, br.observation};
    }
  }
  if (best.observation < 0) throw std::logic_error("chance stage without any positive-probability outcome");
  return best;
}

void Chsvi::explore(const StagedBelief& b, double epsilon, int depth) {
  ++explore_calls_;
  deepest_ = std::max(deepest_, depth);
  if (explore_calls_ % cfg_.tick_every == 0) record();

  const auto up = upper_.update(b);
  lower_.update(b);
  if (visit_) visit_(b);
  const double gap = upper_.value(b) - lower_.value(b).value;
  if (gap <= epsilon) return;
  if (depth >= max_depth_) {
    ++depth_cap_hits_;
    return;
  }
  if (Clock::now() >= deadline_) return;

  const auto next = choose_next(b, up.gamma, epsilon);
  explore(next.belief, next.epsilon, depth + 1);
  upper_.update(b);
  lower_.update(b);
  if (visit_) visit_(b);
}

std::string Chsvi::run(Clock::time_point deadline) {
  deadline_ = deadline;
  if (log_.empty()) record();
  for (;;) {
    const double gap = upper_.value(b0_) - lower_.value(b0_).value;
    if (gap <= cfg_.precision || best_upper_ - best_lower_ <= cfg_.precision) return "converged";
    if (Clock::now() >= deadline_) return "time_limit";
    explore(b0_, cfg_.zeta * gap, 0);
    ++outer_;
    record();
  }
}

PresolveReport presolve_relaxed(const DecModel& model, const SolverConfig& cfg, double budget_s) {
  const auto t0 = Chsvi::Clock::now();
  PresolveReport rep;
  StagedModel relaxed(relax_model(model));
  rep.solution.fib = fast_informed_bound(relaxed.base());

  SolverConfig rcfg = cfg;
  rcfg.precision = cfg.presolve_precision;
  rcfg.max_depth = 0;
  RelaxedSolution caps;
  caps.fib = rep.solution.fib;
  Chsvi engine(relaxed, rcfg, &caps);
  rep.termination = engine.run(deadline_after(budget_s));
  rep.upper = engine.best_upper();
  rep.lower = engine.best_lower();

  const int ns = model.num_states();
  for (const auto& c : engine.upper().constraints(0)) {
    if (c.group != ConstraintGroup::kBelief) continue;
    MarginalBound row;
    row.belief.assign(ns, 0.0);
    for (const auto& [j, v] : c.coeffs) row.belief[j] = v;
    row.value = c.rhs;
    rep.solution.rows.push_back(std::move(row));
  }
  // The relaxed bound at b₀ itself, as one more row.
  MarginalBound root{model.b0, rep.upper};
  rep.solution.rows.push_back(std::move(root));
  rep.seconds = seconds_since(t0);
  return rep;
}

SolveResult solve(const StagedModel& staged, const SolverConfig& cfg, const Chsvi::Observer& observer,
                  bool keep_programs) {
  cfg.validate();
  const auto t0 = Chsvi::Clock::now();
  const auto deadline = deadline_after(cfg.time_limit_s);
  SolveResult out;
  try {
    std::optional<PresolveReport> pre;
    if (cfg.presolve) {
      pre = presolve_relaxed(staged.base(), cfg, cfg.presolve_fraction * cfg.time_limit_s);
      out.presolve_seconds = pre->seconds;
      out.presolve_upper = pre->upper;
      out.presolve_rows = static_cast<int>(pre->solution.rows.size());
    }
    Chsvi engine(staged, cfg, pre ? &pre->solution : nullptr);
    if (observer) engine.set_observer(observer);
    out.max_depth = engine.max_depth();
    try {
      out.termination = engine.run(deadline);
    } catch (const std::exception& e) {
      out.termination = "error";
      out.error = e.what();
      out.valid = false;
    }
    out.policy = direct_control_policy(engine.lower());
    out.upper = engine.best_upper();
    out.lower = engine.best_lower();
    out.log = engine.log();
    out.certified = engine.upper().certified() && out.valid;
    out.outer_iterations = engine.outer_iterations();
    out.explore_calls = engine.explore_calls();
    out.deepest = engine.deepest();
    if (keep_programs)
      for (int l = 0; l < staged.num_stages(); ++l) out.programs.push_back(engine.upper().program(l));
  } catch (const std::exception& e) {
    out.termination = "error";
    out.error = e.what();
    out.valid = false;
    out.certified = false;
  }
  out.seconds = seconds_since(t0);
  return out;
}

void write_progress_csv(const std::vector<ProgressRecord>& log, int num_stages, std::ostream& os) {
  os << "t_s,U0,L0";
  for (int l = 0; l < num_stages; ++l) os << ",nV" << l;
  for (int l = 0; l < num_stages; ++l) os << ",nC" << l;
  os << ",explore_calls,lp_solves,bp_solves\n";
  const auto old = os.precision(17);
  for (const auto& r : log) {
    os << r.t_s << ',' << r.upper << ',' << r.lower;
    for (int v : r.num_vectors) os << ',' << v;
    for (int c : r.num_constraints) os << ',' << c;
    os << ',' << r.explore_calls << ',' << r.lp_solves << ',' << r.bp_solves << '\n';
  }
  os.precision(old);
}

std::string summary_json(const SolveResult& result, const SolverConfig& cfg) {
  nlohmann::ordered_json j;
  j["termination"] = result.termination;
  if (!result.error.empty()) j["error"] = result.error;
  j["valid"] = result.valid;
  j["certified"] = result.certified;
  j["upper"] = result.upper;
  j["lower"] = result.lower;
  j["gap"] = result.upper - result.lower;
  j["seconds"] = result.seconds;
  j["presolve"] = {{"seconds", result.presolve_seconds},
                   {"relaxed_upper", result.presolve_upper},
                   {"rows", result.presolve_rows}};
  j["outer_iterations"] = result.outer_iterations;
  j["explore_calls"] = result.explore_calls;
  j["deepest"] = result.deepest;
  j["max_depth"] = result.max_depth;
  j["config"] = {{"zeta", cfg.zeta},
                 {"precision", cfg.precision},
                 {"time_limit_s", cfg.time_limit_s},
                 {"max_depth", cfg.max_depth},
                 {"seed", cfg.seed},
                 {"bp_mode", to_string(cfg.bp_mode)},
                 {"presolve", cfg.presolve},
                 {"presolve_precision", cfg.presolve_precision},
                 {"presolve_fraction", cfg.presolve_fraction},
                 {"tick_every", cfg.tick_every}};
  return j.dump(2);
}

}  // namespace chsvi
