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

#include "chsvi/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace chsvi {

SparseRow BilinearPrescriptionProgram::objective(const std::vector<int>& gamma) const {
  SparseRow c;
  c.reserve(entries.size());
  for (const auto& e : entries) c.emplace_back(var(e.composite, gamma[e.label]), e.prob);
  return c;
}

std::vector<int> BilinearPrescriptionProgram::supported_labels() const {
  std::vector<char> seen(num_labels, 0);
  for (const auto& e : entries)
    if (e.prob > 0.0) seen[e.label] = 1;
  std::vector<int> out;
  for (int m = 0; m < num_labels; ++m)
    if (seen[m]) out.push_back(m);
  return out;
}

double BilinearPrescriptionProgram::evaluate(const std::vector<int>& gamma,
                                             const std::vector<double>& y) const {
  double v = 0.0;
  for (const auto& e : entries) v += e.prob * y[var(e.composite, gamma[e.label])];
  return v;
}

std::string to_string(BpMode mode) {
  switch (mode) {
    case BpMode::kAuto: return "auto";
    case BpMode::kEnumerate: return "enumerate";
    case BpMode::kBranchBound: return "branch_bound";
    case BpMode::kAlternate: return "alternate";
  }
  return "unknown";
}

BpMode parse_bp_mode(const std::string& text) {
  if (text == "auto") return BpMode::kAuto;
  if (text == "enumerate") return BpMode::kEnumerate;
  if (text == "branch_bound") return BpMode::kBranchBound;
  if (text == "alternate") return BpMode::kAlternate;
  throw std::invalid_argument("unknown BP mode '" + text + "'");
}

namespace {

class InnerLp {
 public:
  explicit InnerLp(const BilinearPrescriptionProgram& bp) : bp_(bp) {
    if (bp.polytope == nullptr) throw std::invalid_argument("bilinear program without a polytope");
  }

  const LpResult& solve(const std::vector<int>& gamma) {
    const SparseRow c = bp_.objective(gamma);
    do {
      bp_.polytope->set_objective_sparse(c);
      last_ = bp_.polytope->solve();
      ++solves_;
      if (!last_.optimal())
        throw LpError("inner LP of the prescription program ended with status " +
                      to_string(last_.status));
    } while (bp_.separate && bp_.separate(c, last_));
    return last_;
  }

  int solves() const { return solves_; }

 private:
  const BilinearPrescriptionProgram& bp_;
  LpResult last_;
  int solves_ = 0;
};

struct Best {
  double value = -kInfinity;
  std::vector<int> gamma;
  std::vector<double> y;

  void offer(double v, const std::vector<int>& g, const std::vector<double>& x) {
    if (v > value + 1e-12 || (v >= value - 1e-12 && g < gamma)) {
      value = v;
      gamma = g;
      y = x;
    }
  }
};

BpResult finish(Best best, bool exact, int solves, std::int64_t nodes) {
  BpResult r;
  r.value = best.value;
  r.gamma = std::move(best.gamma);
  r.y = std::move(best.y);
  r.exact = exact;
  r.lp_solves = solves;
  r.nodes = nodes;
  return r;
}

BpResult enumerate(const BilinearPrescriptionProgram& bp) {
  const auto labels = bp.supported_labels();
  const int k = static_cast<int>(labels.size());
  InnerLp lp(bp);
  Best best;
  std::vector<int> gamma(bp.num_labels, 0);
  std::vector<int> dir(k, 1);
  std::int64_t nodes = 0;
  // Reflected mixed-radix Gray code: consecutive prescriptions differ in one
  // label, so every inner LP warm starts one pivot or so away.
  while (true) {
    const auto& res = lp.solve(gamma);
    ++nodes;
    best.offer(res.value, gamma, res.x);
    int j = 0;
    for (; j < k; ++j) {
      const int next = gamma[labels[j]] + dir[j];
      if (next >= 0 && next < bp.num_actions) {
        gamma[labels[j]] = next;
        break;
      }
      dir[j] = -dir[j];
    }
    if (j == k) break;
  }
  return finish(std::move(best), true, lp.solves(), nodes);
}

std::vector<int> best_response(const BilinearPrescriptionProgram& bp, const std::vector<double>& y,
                               const std::vector<int>& current) {
  std::vector<double> score(static_cast<std::size_t>(bp.num_labels) * bp.num_actions, 0.0);
  for (const auto& e : bp.entries)
    for (int a = 0; a < bp.num_actions; ++a)
      score[e.label * bp.num_actions + a] += e.prob * y[bp.var(e.composite, a)];
  std::vector<int> out = current;
  for (int m = 0; m < bp.num_labels; ++m) {
    int arg = current[m];
    double top = score[m * bp.num_actions + arg];
    for (int a = 0; a < bp.num_actions; ++a) {
      if (score[m * bp.num_actions + a] > top + 1e-12) {
        top = score[m * bp.num_actions + a];
        arg = a;
      }
    }
    out[m] = arg;
  }
  return out;
}

// Block-coordinate ascent from one start. Returns the final LP value.
void ascend(const BilinearPrescriptionProgram& bp, InnerLp& lp, std::vector<int> gamma, Best& best,
            std::int64_t& nodes, int max_sweeps = 50) {
  const auto labels = bp.supported_labels();
  std::vector<char> supported(bp.num_labels, 0);
  for (int m : labels) supported[m] = 1;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const auto& res = lp.solve(gamma);
    ++nodes;
    best.offer(res.value, gamma, res.x);
    auto next = best_response(bp, res.x, gamma);
    for (int m = 0; m < bp.num_labels; ++m)
      if (!supported[m]) next[m] = 0;
    if (next == gamma) break;
    gamma = std::move(next);
  }
}

BpResult alternate(const BilinearPrescriptionProgram& bp, std::uint64_t seed) {
  InnerLp lp(bp);
  Best best;
  std::int64_t nodes = 0;
  const auto labels = bp.supported_labels();
  for (int a = 0; a < bp.num_actions; ++a) {
    std::vector<int> gamma(bp.num_labels, 0);
    for (int m : labels) gamma[m] = a;
    ascend(bp, lp, gamma, best, nodes);
  }
  std::mt19937_64 rng(seed);
  for (int start = 0; start < 2; ++start) {
    std::vector<int> gamma(bp.num_labels, 0);
    for (int m : labels) gamma[m] = static_cast<int>(rng() % bp.num_actions);
    ascend(bp, lp, gamma, best, nodes);
  }
  return finish(std::move(best), false, lp.solves(), nodes);
}

// Separable dual bound. For sign-feasible row multipliers λ and g = Aᵀλ,
//   max{cᵀy : y ∈ P} <= Σ_i λ_i rhs_i + Σ_j max_{l_j <= y_j <= u_j} (c_j - g_j) y_j,
// and the prescription only moves the c_j of the (x, γ(m(x))) variables, so
// the right side splits into a constant plus one term per label.
struct DualCut {
  double base = 0.0;
  std::vector<double> delta;   // [position in label order][action]
  std::vector<double> suffix;  // Σ_{t >= p} max_a delta[t][a]
};

class DualBound {
 public:
  DualBound(const BilinearPrescriptionProgram& bp, const std::vector<int>& order)
      : bp_(bp), order_(order), position_(bp.num_labels, -1) {
    for (int p = 0; p < static_cast<int>(order.size()); ++p) position_[order[p]] = p;
  }

  void add(const LpResult& res) {
    const SimplexSolver& s = *bp_.polytope;
    const int nv = s.num_vars();
    std::vector<double> g(nv, 0.0);
    DualCut cut;
    for (int r = 0; r < s.num_rows(); ++r) {
      if (!s.row_active(r)) continue;
      double lam = res.duals[r];
      if (s.row_sense(r) == Sense::kLessEqual) lam = std::max(lam, 0.0);
      if (s.row_sense(r) == Sense::kGreaterEqual) lam = std::min(lam, 0.0);
      if (lam == 0.0) continue;
      cut.base += lam * s.row_rhs(r);
      for (const auto& [j, a] : s.row(r)) g[j] += lam * a;
    }
    auto phi = [&s](int j, double t) {
      if (t == 0.0) return 0.0;
      const double b = t > 0 ? s.var_upper(j) : s.var_lower(j);
      return std::isfinite(b) ? t * b : kInfinity;
    };
    for (int j = 0; j < nv; ++j) cut.base += phi(j, -g[j]);
    if (!std::isfinite(cut.base)) return;
    const int k = static_cast<int>(order_.size());
    const int na = bp_.num_actions;
    cut.delta.assign(static_cast<std::size_t>(k) * na, 0.0);
    for (const auto& e : bp_.entries) {
      const int p = position_[e.label];
      for (int a = 0; a < na; ++a) {
        const int j = bp_.var(e.composite, a);
        cut.delta[p * na + a] += phi(j, e.prob - g[j]) - phi(j, -g[j]);
      }
    }
    cut.suffix.assign(k + 1, 0.0);
    for (int p = k - 1; p >= 0; --p) {
      double top = -kInfinity;
      for (int a = 0; a < na; ++a) top = std::max(top, cut.delta[p * na + a]);
      cut.suffix[p] = cut.suffix[p + 1] + top;
    }
    cuts_.push_back(std::move(cut));
    if (cuts_.size() > kMaxCuts) cuts_.erase(cuts_.begin());
  }

  // Bound for the node fixing order[0..depth) to `fixed`, optionally with
  // order[depth] set to `next`.
  double bound(const std::vector<int>& fixed, int depth, int next = -1) const {
    if (cuts_.empty()) return kInfinity;
    const int na = bp_.num_actions;
    double best = kInfinity;
    for (const auto& cut : cuts_) {
      double v = cut.base;
      for (int p = 0; p < depth; ++p) v += cut.delta[p * na + fixed[p]];
      if (next >= 0) v += cut.delta[depth * na + next] + cut.suffix[depth + 1];
      else v += cut.suffix[depth];
      best = std::min(best, v);
    }
    return best;
  }

 private:
  static constexpr std::size_t kMaxCuts = 256;
  const BilinearPrescriptionProgram& bp_;
  std::vector<int> order_;
  std::vector<int> position_;
  std::vector<DualCut> cuts_;
};

BpResult branch_bound(const BilinearPrescriptionProgram& bp, std::uint64_t seed) {
  // Heavier labels first.
  std::vector<double> mass(bp.num_labels, 0.0);
  for (const auto& e : bp.entries) mass[e.label] += e.prob;
  auto order = bp.supported_labels();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mass[a] > mass[b]; });
  const int k = static_cast<int>(order.size());

  InnerLp lp(bp);
  DualBound bound(bp, order);
  Best best;
  std::int64_t nodes = 0;
  std::map<std::vector<int>, double> solved;

  auto leaf = [&](const std::vector<int>& gamma) {
    auto it = solved.find(gamma);
    if (it != solved.end()) return;
    const auto& res = lp.solve(gamma);
    solved.emplace(gamma, res.value);
    best.offer(res.value, gamma, res.x);
    bound.add(res);
  };

  // Incumbent and initial multipliers from a short ascent.
  {
    Best warm;
    std::int64_t warm_nodes = 0;
    for (int a = 0; a < bp.num_actions; ++a) {
      std::vector<int> gamma(bp.num_labels, 0);
      for (int m : order) gamma[m] = a;
      leaf(gamma);
      ascend(bp, lp, gamma, warm, warm_nodes, 5);
      leaf(warm.gamma);
    }
    (void)seed;
  }

  std::vector<int> fixed(k, 0);
  std::vector<int> gamma(bp.num_labels, 0);
  // Explicit DFS stack of (depth, candidate actions in visiting order, cursor).
  struct Frame {
    std::vector<int> actions;
    std::size_t cursor = 0;
  };
  std::vector<Frame> stack;
  auto expand = [&](int depth) {
    Frame f;
    std::vector<std::pair<double, int>> kids;
    for (int a = 0; a < bp.num_actions; ++a) kids.emplace_back(bound.bound(fixed, depth, a), a);
    std::stable_sort(kids.begin(), kids.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (const auto& kd : kids) f.actions.push_back(kd.second);
    stack.push_back(std::move(f));
  };
  if (k == 0) {
    leaf(gamma);
  } else {
    expand(0);
    while (!stack.empty()) {
      const int depth = static_cast<int>(stack.size()) - 1;
      Frame& f = stack.back();
      if (f.cursor == f.actions.size()) {
        stack.pop_back();
        continue;
      }
      const int a = f.actions[f.cursor++];
      fixed[depth] = a;
      gamma[order[depth]] = a;
      ++nodes;
      if (bound.bound(fixed, depth + 1) <= best.value + 1e-9) continue;
      if (depth + 1 == k) {
        leaf(gamma);
        continue;
      }
      expand(depth + 1);
    }
  }
  return finish(std::move(best), true, lp.solves(), nodes);
}

}  // namespace

BpResult solve_bp_exact(const BilinearPrescriptionProgram& bp) { return enumerate(bp); }

BpResult ascend_bp(const BilinearPrescriptionProgram& bp, std::vector<int> start) {
  InnerLp lp(bp);
  Best best;
  std::int64_t nodes = 0;
  ascend(bp, lp, std::move(start), best, nodes);
  return finish(std::move(best), false, lp.solves(), nodes);
}

BpResult solve_bp(const BilinearPrescriptionProgram& bp, BpMode mode, std::uint64_t seed) {
  if (mode == BpMode::kAuto) {
    const double count =
        std::pow(static_cast<double>(bp.num_actions), static_cast<double>(bp.supported_labels().size()));
    mode = count <= kEnumerationThreshold ? BpMode::kEnumerate : BpMode::kBranchBound;
  }
  switch (mode) {
    case BpMode::kEnumerate: return enumerate(bp);
    case BpMode::kBranchBound: return branch_bound(bp, seed);
    case BpMode::kAlternate: return alternate(bp, seed);
    case BpMode::kAuto: break;
  }
  throw std::logic_error("unreachable BP mode");
}

}  // namespace chsvi
