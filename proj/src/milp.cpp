// Copyright 2026 The SCSR Authors
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
//
// Best-bound branch & bound over the binary variables, with pseudocost
// branching, an LP-restriction rounding heuristic and optional warm-start
// incumbents. Node relaxations share one lazily grown active-row pool.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "lp_internal.hpp"
#include "scsr/solver.hpp"

namespace scsr {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kIntTol = 1e-6;

struct Node {
  double bound;  // parent LP objective: valid lower bound for the subtree
  int depth;
  long seq;
  std::vector<std::pair<int, std::uint8_t>> fixings;  // (binary var, value)
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq < b.seq;                              // then newest first
  }
};

struct Pseudocost {
  double up_sum = 0.0, down_sum = 0.0;
  int up_cnt = 0, down_cnt = 0;
};

int fractional_count(const std::vector<int>& bins, const std::vector<double>& x) {
  int fc = 0;
  for (int j : bins) {
    const double f = x[j] - std::floor(x[j]);
    if (std::min(f, 1.0 - f) > kIntTol) ++fc;
  }
  return fc;
}

}  // namespace

SolveResult solve_milp(const LinearModel& m, const SolveOptions& opt) {
  const auto t0 = Clock::now();
  std::vector<int> bins;
  for (int j = 0; j < m.num_vars(); ++j)
    if (m.var(j).is_binary) bins.push_back(j);

  internal::RowPool pool;
  std::vector<double> lb(m.num_vars()), ub(m.num_vars());
  for (int j = 0; j < m.num_vars(); ++j) {
    lb[j] = m.var(j).lb;
    ub[j] = m.var(j).ub;
  }

  auto node_lp = [&](const std::vector<std::pair<int, std::uint8_t>>& fixings) {
    std::vector<double> nlb = lb, nub = ub;
    for (const auto& [v, val] : fixings) {
      nlb[v] = val;
      nub[v] = val;
    }
    return internal::lp_solve(m, nlb.data(), nub.data(), opt, &pool);
  };

  SolveResult root = node_lp({});
  root.wall_seconds = seconds_since(t0);
  if (root.status != SolveStatus::Optimal) {
    root.row_duals.clear();
    return root;  // Infeasible / Unbounded / Error propagate as-is
  }
  if (bins.empty()) return root;

  long nodes = 1;
  double incumbent_obj = kInf;
  std::vector<double> incumbent_x;
  double global_bound = root.objective;

  auto report = [&] {
    if (opt.progress)
      opt.progress(seconds_since(t0),
                   incumbent_x.empty() ? kInf : incumbent_obj, global_bound);
  };

  // Improvements below LP solver noise would make ties drift between
  // equivalent binary points; require a meaningful step.
  auto improves = [&](double v) {
    if (!std::isfinite(incumbent_obj)) return std::isfinite(v);
    return v < incumbent_obj - 1e-7 * std::max(1.0, std::abs(incumbent_obj));
  };
  auto try_incumbent = [&](const std::vector<double>& binvals) {
    std::vector<double> nlb = lb, nub = ub;
    for (int j : bins) {
      const double v = binvals[j] >= 0.5 ? 1.0 : 0.0;
      nlb[j] = v;
      nub[j] = v;
    }
    SolveResult r = internal::lp_solve(m, nlb.data(), nub.data(), opt, &pool);
    if (r.status == SolveStatus::Optimal && improves(r.objective)) {
      incumbent_obj = r.objective;
      incumbent_x = r.x;
      report();
      return true;
    }
    return false;
  };

  if (!opt.warm_binaries.empty()) try_incumbent(opt.warm_binaries);

  std::vector<Pseudocost> pc(m.num_vars());
  auto pc_score = [&](int j, double frac) {
    double up = pc[j].up_cnt ? pc[j].up_sum / pc[j].up_cnt : -1.0;
    double dn = pc[j].down_cnt ? pc[j].down_sum / pc[j].down_cnt : -1.0;
    double up_avg = 0.0, dn_avg = 0.0;
    int nup = 0, ndn = 0;
    for (int k : bins) {
      if (pc[k].up_cnt) {
        up_avg += pc[k].up_sum / pc[k].up_cnt;
        ++nup;
      }
      if (pc[k].down_cnt) {
        dn_avg += pc[k].down_sum / pc[k].down_cnt;
        ++ndn;
      }
    }
    if (up < 0) up = nup ? up_avg / nup : 1.0;
    if (dn < 0) dn = ndn ? dn_avg / ndn : 1.0;
    return std::max(dn * frac, 1e-9) * std::max(up * (1.0 - frac), 1e-9);
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  open.push({root.objective, 0, seq++, {}});
  SolveResult rootcopy = root;

  const double abs_eps = 1e-9;
  bool timed_out = false;
  bool node_capped = false;

  while (!open.empty()) {
    if (seconds_since(t0) > opt.time_limit) {
      timed_out = true;
      break;
    }
    if (nodes >= opt.max_nodes) {
      node_capped = true;
      break;
    }
    Node nd = open.top();
    global_bound = nd.bound;
    const double cutoff =
        incumbent_obj -
        std::max(abs_eps, 1e-7 * std::max(1.0, std::abs(incumbent_obj)));
    if (nd.bound >= cutoff ||
        (std::isfinite(incumbent_obj) &&
         (incumbent_obj - nd.bound) <=
             opt.rel_gap * std::max(std::abs(incumbent_obj), 1e-9))) {
      // Best-bound order: nothing left can improve beyond the gap.
      break;
    }
    open.pop();

    SolveResult lp = nd.depth == 0 ? rootcopy : node_lp(nd.fixings);
    ++nodes;
    if (lp.status == SolveStatus::Infeasible) continue;
    if (lp.status != SolveStatus::Optimal) {
      // Numerical trouble: keep the subtree alive by branching blindly on
      // the first unfixed binary at the parent bound.
      int unfixed = -1;
      for (int j : bins) {
        bool fixed = false;
        for (const auto& [v, val] : nd.fixings) fixed |= v == j;
        if (!fixed) {
          unfixed = j;
          break;
        }
      }
      if (unfixed >= 0) {
        for (std::uint8_t branch : {0, 1}) {
          Node child;
          child.bound = nd.bound;
          child.depth = nd.depth + 1;
          child.seq = seq++;
          child.fixings = nd.fixings;
          child.fixings.emplace_back(unfixed, branch);
          open.push(std::move(child));
        }
      }
      continue;
    }
    if (lp.objective >= cutoff) continue;

    // Pseudocost update from parent bound to node value.
    if (!nd.fixings.empty()) {
      const auto& [v, val] = nd.fixings.back();
      const double gain = std::max(0.0, lp.objective - nd.bound);
      if (val) {
        pc[v].up_sum += gain;
        pc[v].up_cnt += 1;
      } else {
        pc[v].down_sum += gain;
        pc[v].down_cnt += 1;
      }
    }

    if (fractional_count(bins, lp.x) == 0) {
      if (improves(lp.objective)) {
        incumbent_obj = lp.objective;
        incumbent_x = lp.x;
        report();
      }
      continue;
    }

    // Rounding heuristic: occasionally probe the LP restriction at the
    // rounded relaxation point.
    if (nd.depth % 4 == 0 && nodes < 64) try_incumbent(lp.x);

    // Branch on the highest pseudocost-score fractional binary.
    int best = -1;
    double best_score = -1.0;
    for (int j : bins) {
      const double f = lp.x[j] - std::floor(lp.x[j]);
      const double frac = std::min(f, 1.0 - f);
      if (frac <= kIntTol) continue;
      const double s = pc_score(j, lp.x[j]);
      if (s > best_score + 1e-15 || (s > best_score - 1e-15 && j < best)) {
        best_score = s;
        best = j;
      }
    }
    if (best < 0) continue;

    const std::uint8_t pref = lp.x[best] >= 0.5 ? 1 : 0;
    for (std::uint8_t branch : {pref, static_cast<std::uint8_t>(1 - pref)}) {
      Node child;
      child.bound = lp.objective;
      child.depth = nd.depth + 1;
      child.seq = seq++;
      child.fixings = nd.fixings;
      child.fixings.emplace_back(best, branch);
      open.push(std::move(child));
    }
  }

  if (!open.empty()) global_bound = std::min(global_bound, open.top().bound);
  if (open.empty()) global_bound = std::isfinite(incumbent_obj) ? incumbent_obj
                                                                : global_bound;

  SolveResult res;
  res.iterations = nodes;
  res.wall_seconds = seconds_since(t0);
  res.best_bound = global_bound;
  if (!incumbent_x.empty()) {
    res.x = incumbent_x;
    res.objective = incumbent_obj;
    const double gap = (incumbent_obj - global_bound) /
                       std::max(std::abs(incumbent_obj), 1e-9);
    if (timed_out) {
      res.status = SolveStatus::TimeLimit;
    } else if (gap <= opt.rel_gap + 1e-12) {
      res.status = SolveStatus::Optimal;
    } else {
      res.status = SolveStatus::Feasible;
    }
  } else if (timed_out || node_capped) {
    res.status = SolveStatus::TimeLimit;
    res.message = "limit reached without incumbent";
  } else {
    res.status = SolveStatus::Infeasible;
    res.message = "all nodes pruned without finding a binary-feasible point";
  }
  return res;
}

SolveResult solve_milp(const LinearModel& m, double rel_gap, double time_limit) {
  SolveOptions opt;
  opt.rel_gap = rel_gap;
  opt.time_limit = time_limit;
  return solve_milp(m, opt);
}

SolveResult solve_lp(const LinearModel& m, const SolveOptions& opt) {
  if (m.has_binaries()) {
    throw std::invalid_argument("solve_lp called on a model with binaries");
  }
  internal::RowPool pool;
  return internal::lp_solve(m, nullptr, nullptr, opt, &pool);
}

SolveResult solve_fixed_lp(const LinearModel& m, const std::vector<double>& binaries,
                           const SolveOptions& opt) {
  std::vector<double> lb(m.num_vars()), ub(m.num_vars());
  for (int j = 0; j < m.num_vars(); ++j) {
    lb[j] = m.var(j).lb;
    ub[j] = m.var(j).ub;
    if (m.var(j).is_binary) {
      const double v = binaries.at(j) >= 0.5 ? 1.0 : 0.0;
      lb[j] = v;
      ub[j] = v;
    }
  }
  internal::RowPool pool;
  return internal::lp_solve(m, lb.data(), ub.data(), opt, &pool);
}

}  // namespace scsr
