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

#include "scsr/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "scsr/hmmp.hpp"
#include "scsr/parallel.hpp"

namespace scsr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// All one-binary flips of `topo` that keep the topology rules satisfied.
std::vector<TopologyAssignment> neighbor_flips(const Network& net,
                                               const ModelConfig& mc,
                                               const TopologyAssignment& topo) {
  std::vector<TopologyAssignment> out;
  auto push_if_valid = [&](TopologyAssignment t) {
    if (check_topology(net, t, mc.max_splits).empty()) out.push_back(std::move(t));
  };
  for (int i = 0; i < net.num_substations(); ++i) {
    TopologyAssignment t = topo;
    t.coupler_closed[i] = !t.coupler_closed[i];
    push_if_valid(std::move(t));
  }
  for (size_t br = 0; br < net.branches.size(); ++br) {
    for (int e = 0; e < 2; ++e) {
      TopologyAssignment t = topo;
      t.line_busbar[br][e] = 1 - t.line_busbar[br][e];
      push_if_valid(std::move(t));
    }
  }
  for (size_t g = 0; g < net.generators.size(); ++g) {
    TopologyAssignment t = topo;
    t.gen_busbar[g] = 1 - t.gen_busbar[g];
    push_if_valid(std::move(t));
  }
  for (size_t d = 0; d < net.loads.size(); ++d) {
    TopologyAssignment t = topo;
    t.load_busbar[d] = 1 - t.load_busbar[d];
    push_if_valid(std::move(t));
  }
  return out;
}

}  // namespace

BaselineResult run_one_opt(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, const ObjectiveConfig& oc,
                           const BaselineOptions& opt) {
  const auto t0 = Clock::now();
  BaselineResult out;
  out.trace.method = "1opt";

  const Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);

  TopologyAssignment cur = initial_topology(net);
  SolveResult cur_res = solve_restriction(sm, cur);
  if (cur_res.status != SolveStatus::Optimal) {
    out.bundle.method = "1opt";
    out.bundle.status = cur_res.status;
    return out;
  }
  double cur_obj = cur_res.objective;
  {
    TraceRow row;
    row.iteration = 0;
    row.ub = row.best_ub = cur_obj;
    row.seconds = seconds_since(t0);
    out.trace.rows.push_back(row);
  }

  for (int it = 1; it <= opt.max_iterations; ++it) {
    if (seconds_since(t0) > opt.time_limit) break;
    const std::vector<TopologyAssignment> flips = neighbor_flips(net, mc, cur);
    std::vector<double> objs(flips.size(), kInf);
    parallel_for(static_cast<int>(flips.size()), opt.workers, [&](int k) {
      SolveResult r = solve_restriction(sm, flips[k]);
      if (r.status == SolveStatus::Optimal) objs[k] = r.objective;
    });
    int best = -1;
    for (size_t k = 0; k < flips.size(); ++k) {
      const double eps = 1e-6 * std::max(1.0, std::abs(cur_obj));
      if (objs[k] < cur_obj - eps && (best < 0 || objs[k] < objs[best]))
        best = static_cast<int>(k);
    }
    if (best < 0) break;  // local optimum
    cur = flips[best];
    cur_obj = objs[best];
    TraceRow row;
    row.iteration = it;
    row.ub = row.best_ub = cur_obj;
    row.seconds = seconds_since(t0);
    out.trace.rows.push_back(row);
  }

  cur_res = solve_restriction(sm, cur);
  out.bundle = extract_bundle(net, cs, oc, sm, cur_res);
  out.bundle.method = "1opt";
  out.bundle.converged = true;  // local optimum reached (or limits hit)
  out.bundle.wall_seconds = seconds_since(t0);
  return out;
}

BaselineResult run_seq(const Network& net, const ContingencySet& cs,
                       const ModelConfig& mc, const ObjectiveConfig& oc,
                       std::vector<int> order, const BaselineOptions& opt) {
  const auto t0 = Clock::now();
  BaselineResult out;
  out.trace.method = "seq";

  if (order.empty()) {
    order.resize(net.num_substations());
    for (int i = 0; i < net.num_substations(); ++i) order[i] = i;
  }

  const Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);

  TopologyAssignment cur = initial_topology(net);
  SolveResult cur_res = solve_restriction(sm, cur);
  if (cur_res.status != SolveStatus::Optimal) {
    out.bundle.method = "seq";
    out.bundle.status = cur_res.status;
    return out;
  }
  double cur_obj = cur_res.objective;
  SolutionBundle cur_bundle = extract_bundle(net, cs, oc, sm, cur_res);

  int step = 0;
  for (int sweep = 1; sweep <= opt.max_iterations; ++sweep) {
    const double sweep_start_obj = cur_obj;
    for (int i : order) {
      if (seconds_since(t0) > opt.time_limit) break;
      // Substation master against the current dispatch; previously split
      // substations keep their committed two-busbar form.
      std::vector<SubstationAssignment> committed;
      int splits_elsewhere = 0;
      for (int j = 0; j < net.num_substations(); ++j) {
        if (j == i || cur.coupler_closed[j]) continue;
        ++splits_elsewhere;
        SubstationAssignment a;
        a.substation = j;
        a.coupler_closed = false;
        for (auto [br, e] : net.branch_ends_at[j])
          a.line_busbar.push_back(cur.line_busbar[br][e]);
        for (int g : net.gens_at[j]) a.gen_busbar.push_back(cur.gen_busbar[g]);
        for (int d : net.loads_at[j]) a.load_busbar.push_back(cur.load_busbar[d]);
        committed.push_back(std::move(a));
      }
      const bool budget_left = splits_elsewhere < mc.max_splits;
      SubstationTopology st =
          solve_mp_i(net, cs, mc, oc, lin, i, cur_bundle.dispatch, committed,
                     !budget_left, opt.mp_gap);
      TopologyAssignment trial = cur;
      apply_assignment(net, st.best, &trial);
      if (!check_topology(net, trial, mc.max_splits).empty()) continue;
      SolveResult trial_res = solve_restriction(sm, trial);
      if (trial_res.status != SolveStatus::Optimal) continue;
      if (trial_res.objective <
          cur_obj - 1e-6 * std::max(1.0, std::abs(cur_obj))) {
        cur = trial;
        cur_obj = trial_res.objective;
        cur_bundle = extract_bundle(net, cs, oc, sm, trial_res);
      }
      TraceRow row;
      row.iteration = ++step;
      row.ub = row.best_ub = cur_obj;
      row.splits = cur.num_splits();
      row.seconds = seconds_since(t0);
      out.trace.rows.push_back(row);
    }
    const double eps = 1e-6 * std::max(1.0, std::abs(sweep_start_obj));
    if (cur_obj >= sweep_start_obj - eps) break;  // converged sweep
    if (seconds_since(t0) > opt.time_limit) break;
  }

  cur_res = solve_restriction(sm, cur);
  out.bundle = extract_bundle(net, cs, oc, sm, cur_res);
  out.bundle.method = "seq";
  out.bundle.converged = true;
  out.bundle.wall_seconds = seconds_since(t0);
  return out;
}

}  // namespace scsr
