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

// chsvi: generate benchmark models, solve them and check the results.
//
// Exit codes: 0 success, 1 internal error, 2 bad command line, 3 file not
// found or unwritable, 4 malformed model or policy file, 5 invalid model,
// 6 policy does not fit the model, 7 oracle size guard, 8 solver failure.
// Every failure prints one JSON object {"error": {...}} on stderr.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "chsvi/envs.hpp"
#include "chsvi/evaluation.hpp"
#include "chsvi/model_io.hpp"
#include "chsvi/policy.hpp"
#include "chsvi/solver.hpp"
#include "json.hpp"

namespace {

using namespace chsvi;
using nlohmann::ordered_json;

enum Exit {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kFile = 3,
  kMalformed = 4,
  kInvalidModel = 5,
  kPolicyMismatch = 6,
  kOracleRefused = 7,
  kSolverFailed = 8,
};

struct CliError {
  Exit code;
  std::string kind;
  std::string message;
};

int report(const CliError& e) {
  ordered_json j;
  j["error"] = {{"kind", e.kind}, {"message", e.message}, {"exit_code", static_cast<int>(e.code)}};
  std::cerr << j.dump() << '\n';
  return e.code;
}

void require_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw CliError{kFile, "file", "no such file: " + path};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CliError{kFile, "file", "cannot write " + path};
  return out;
}

DecModel read_model(const std::string& path) {
  require_file(path);
  return load_model(path);
}

std::string power_text(int base, int exponent) {
  std::ostringstream os;
  os << base << '^' << exponent;
  const double v = std::pow(static_cast<double>(base), exponent);
  if (v < 1e15) os << " = " << static_cast<long long>(v);
  return os.str();
}

struct GenArgs {
  std::string kind;
  std::vector<std::string> params;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  auto num = [&](std::size_t k) {
    try {
      return std::stod(a.params.at(k));
    } catch (const std::exception&) {
      throw CliError{kUsage, "usage", "parameter " + std::to_string(k + 1) + " of '" + a.kind + "' must be a number"};
    }
  };
  auto whole = [&](std::size_t k) {
    const double v = num(k);
    if (v != std::floor(v)) throw CliError{kUsage, "usage", "parameter " + std::to_string(k + 1) + " must be an integer"};
    return static_cast<int>(v);
  };
  DecModel model;
  try {
    if (a.kind == "dectiger") {
      if (a.params.size() != 3) throw CliError{kUsage, "usage", "gen dectiger expects: DOORS DELAY DISCOUNT"};
      model = gen_dectiger({whole(0), whole(1), num(2)});
    } else if (a.kind == "multicast") {
      if (a.params.size() != 5)
        throw CliError{kUsage, "usage", "gen multicast expects: CAP1 CAP2 ARRIVAL1 ARRIVAL2 DISCOUNT"};
      MultiCastParams p;
      p.capacity1 = whole(0);
      p.capacity2 = whole(1);
      p.arrival1 = num(2);
      p.arrival2 = num(3);
      p.discount = num(4);
      model = gen_multicast(p);
    } else {
      throw CliError{kUsage, "usage", "unknown model family '" + a.kind + "' (dectiger, multicast)"};
    }
  } catch (const std::invalid_argument& e) {
    throw CliError{kUsage, "usage", e.what()};
  }
  try {
    save_model(model, a.out);
  } catch (const std::runtime_error& e) {
    throw CliError{kFile, "file", e.what()};
  }
  return kOk;
}

int cmd_info(const std::string& path, bool as_json) {
  const StagedModel staged(read_model(path));
  const DecModel& m = staged.base();
  if (as_json) {
    ordered_json j;
    j["agents"] = m.num_agents();
    j["states"] = m.num_states();
    j["observations"] = m.num_observations();
    j["discount"] = m.discount;
    ordered_json per = ordered_json::array();
    for (int i = 0; i < m.num_agents(); ++i)
      per.push_back({{"actions", m.num_actions(i)},
                     {"labels", m.num_labels(i)},
                     {"prescriptions", prescription_count(m, i)}});
    j["per_agent"] = per;
    std::vector<int> sizes;
    for (int l = 0; l < staged.num_stages(); ++l) sizes.push_back(staged.stage_size(l));
    j["stage_sizes"] = sizes;
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "agents: " << m.num_agents() << '\n'
            << "|S|: " << m.num_states() << '\n'
            << "|O|: " << m.num_observations() << '\n'
            << "discount: " << m.discount << '\n';
  for (int i = 0; i < m.num_agents(); ++i)
    std::cout << "agent " << i + 1 << ": |A| " << m.num_actions(i) << ", |M| " << m.num_labels(i)
              << ", prescriptions " << power_text(m.num_actions(i), m.num_labels(i)) << '\n';
  std::cout << "stage sizes:";
  for (int l = 0; l < staged.num_stages(); ++l) std::cout << ' ' << staged.stage_size(l);
  std::cout << '\n';
  return kOk;
}

struct SolveArgs {
  std::string model;
  SolverConfig cfg;
  std::string bp_mode = "auto";
  bool no_presolve = false;
  std::string progress, policy, summary, lp_dump;
  bool quiet = false;
};

int cmd_solve(SolveArgs a) {
  try {
    a.cfg.bp_mode = parse_bp_mode(a.bp_mode);
    a.cfg.presolve = !a.no_presolve;
    a.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError{kUsage, "usage", e.what()};
  }
  const StagedModel staged(read_model(a.model));
  std::optional<std::ofstream> progress;
  if (!a.progress.empty()) progress = open_out(a.progress);
  if (!a.lp_dump.empty()) std::filesystem::create_directories(a.lp_dump);

  Chsvi::Observer observer;
  if (!a.quiet)
    observer = [](const ProgressRecord& r) {
      std::cerr << "t=" << r.t_s << "s U=" << r.upper << " L=" << r.lower << " gap=" << r.upper - r.lower << '\n';
    };
  const auto result = solve(staged, a.cfg, observer, !a.lp_dump.empty());

  if (progress) write_progress_csv(result.log, staged.num_stages(), *progress);
  if (!a.policy.empty() && !result.policy.stage_sizes().empty()) {
    auto out = open_out(a.policy);
    out << result.policy.to_json() << '\n';
  }
  for (std::size_t l = 0; l < result.programs.size(); ++l) {
    auto out = open_out((std::filesystem::path(a.lp_dump) / ("stage" + std::to_string(l) + ".lp")).string());
    write_lp_format(result.programs[l], out);
  }
  const std::string text = summary_json(result, a.cfg);
  if (!a.summary.empty()) {
    auto out = open_out(a.summary);
    out << text << '\n';
  }
  std::cout << text << '\n';
  if (!result.valid) return report({kSolverFailed, "solver", result.error});
  return kOk;
}

struct EvalArgs {
  std::string model, policy;
  std::int64_t episodes = 100000;
  int horizon = 0;
  double precision = 0.01;
  std::uint64_t seed = 0;
};

int cmd_eval(const EvalArgs& a) {
  const StagedModel staged(read_model(a.model));
  require_file(a.policy);
  const auto policy = load_policy(a.policy);
  const int horizon = a.horizon > 0 ? a.horizon : default_eval_horizon(staged.base(), a.precision);
  const auto rep = monte_carlo_eval(staged, policy, a.episodes, horizon, a.seed);
  ordered_json j;
  j["episodes"] = rep.episodes;
  j["horizon"] = rep.horizon;
  j["seed"] = a.seed;
  j["mean"] = rep.mean;
  j["std_error"] = rep.std_error;
  j["tail"] = rep.tail;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_oracle(const std::string& path, int horizon) {
  const StagedModel staged(read_model(path));
  const double v = finite_horizon_oracle(staged, horizon);
  ordered_json j;
  j["horizon"] = horizon;
  j["value"] = v;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHSVI solver for coordinated multi-agent control"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file; a [solve] table runs the solve subcommand with those options");
  app.allow_config_extras(false);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a benchmark model file");
  g->add_option("family", gen.kind, "dectiger | multicast")->required();
  g->add_option("params", gen.params,
                "dectiger: DOORS DELAY DISCOUNT; multicast: CAP1 CAP2 ARRIVAL1 ARRIVAL2 DISCOUNT")
      ->required();
  g->add_option("-o,--output", gen.out, "Output model file")->required();

  std::string info_file;
  bool info_json = false;
  auto* in = app.add_subcommand("info", "Print model dimensions");
  in->add_option("model", info_file)->required();
  in->add_flag("--json", info_json, "Print JSON instead of text");

  SolveArgs sv;
  auto* s = app.add_subcommand("solve", "Run CHSVI on a model");
  s->configurable();
  s->add_option("model,--model", sv.model, "Model JSON file")->required();
  s->add_option("--precision", sv.cfg.precision, "Target gap at b0")->capture_default_str();
  s->add_option("--zeta", sv.cfg.zeta, "Gap contraction factor in (0, 1)")->capture_default_str();
  s->add_option("--time-limit", sv.cfg.time_limit_s, "Wall-clock budget in seconds")->capture_default_str();
  s->add_option("--seed", sv.cfg.seed, "Seed")->capture_default_str();
  s->add_option("--bp-mode", sv.bp_mode, "auto | enumerate | branch_bound | alternate")->capture_default_str();
  s->add_option("--max-depth", sv.cfg.max_depth, "Recursion cap (0: automatic)")->capture_default_str();
  s->add_option("--presolve-precision", sv.cfg.presolve_precision, "Gap target of the relaxed presolve")
      ->capture_default_str();
  s->add_flag("--no-presolve", sv.no_presolve, "Start from box-only upper bounds");
  s->add_option("--progress", sv.progress, "Progress CSV output");
  s->add_option("--policy", sv.policy, "Policy JSON output");
  s->add_option("--summary", sv.summary, "Also write the summary JSON here");
  s->add_option("--lp-dump", sv.lp_dump, "Directory for the final upper-bound programs (LP format)");
  s->add_flag("-q,--quiet", sv.quiet, "No progress lines on stderr");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Monte-Carlo value of a policy");
  e->add_option("model", ev.model)->required();
  e->add_option("--policy", ev.policy, "Policy JSON")->required();
  e->add_option("--episodes", ev.episodes)->capture_default_str()->check(CLI::PositiveNumber);
  e->add_option("--horizon", ev.horizon, "Steps per episode (0: from --precision)")->capture_default_str();
  e->add_option("--precision", ev.precision, "Truncation target for the default horizon")->capture_default_str();
  e->add_option("--seed", ev.seed)->capture_default_str();

  std::string oracle_file;
  int oracle_horizon = 0;
  auto* o = app.add_subcommand("oracle", "Exact finite-horizon value by enumeration");
  o->add_option("model", oracle_file)->required();
  o->add_option("--horizon", oracle_horizon, "Horizon T")->required()->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    return report({kUsage, "usage", ex.what()});
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (in->parsed()) return cmd_info(info_file, info_json);
    if (s->parsed()) return cmd_solve(sv);
    if (e->parsed()) return cmd_eval(ev);
    if (o->parsed()) return cmd_oracle(oracle_file, oracle_horizon);
  } catch (const CliError& ex) {
    return report(ex);
  } catch (const ParseError& ex) {
    return report({kMalformed, "parse", ex.what()});
  } catch (const ValidationError& ex) {
    return report({kInvalidModel, "validation", ex.what()});
  } catch (const ModelError& ex) {
    return report({kInvalidModel, "validation", ex.what()});
  } catch (const PolicyError& ex) {
    return report({kPolicyMismatch, "policy", ex.what()});
  } catch (const OracleError& ex) {
    return report({kOracleRefused, "oracle", ex.what()});
  } catch (const LpError& ex) {
    return report({kSolverFailed, "solver", ex.what()});
  } catch (const std::exception& ex) {
    return report({kInternal, "internal", ex.what()});
  }
  return kInternal;
}
