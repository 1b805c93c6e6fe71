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

#include "scsr/hmmp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "scsr/parallel.hpp"

namespace scsr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

Mp0Result solve_mp0(const Network& net, const ContingencySet& cs,
                    const ObjectiveConfig& oc, const std::vector<Cut>& cuts) {
  LinearModel m;
  const int ng = static_cast<int>(net.generators.size());
  std::vector<int> p0(ng), ru(ng), rd(ng);
  LinExpr total;
  double market_cost = 0.0;
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    p0[g] = m.add_var("p0." + gen.id, gen.p_min, gen.p_max);
    ru[g] = m.add_var("ru." + gen.id, 0.0, gen.ramp_up);
    rd[g] = m.add_var("rd." + gen.id, 0.0, gen.ramp_down);
    // headroom for the purchased reserves
    LinExpr up = LinExpr::term(p0[g]).add(ru[g], 1.0);
    m.add_row("cap.up." + gen.id, up, Sense::Le, gen.p_max);
    LinExpr dn = LinExpr::term(p0[g]).add(rd[g], -1.0);
    m.add_row("cap.dn." + gen.id, dn, Sense::Ge, gen.p_min);
    total.add(p0[g], 1.0);
    m.set_cost(p0[g], gen.cost * net.base_mva);
    m.set_cost(ru[g], gen.cost_up * net.base_mva);
    m.set_cost(rd[g], gen.cost_down * net.base_mva);
    market_cost += gen.cost * gen.p_market * net.base_mva;
  }
  m.add_cost_constant(-market_cost);
  m.add_row("supply", total, Sense::Ge, net.total_demand());
  if (oc.mode == ObjectiveMode::FixedDispatch) {
    for (int g = 0; g < ng; ++g)
      m.add_row("fixdisp." + net.generators[g].id, LinExpr::term(p0[g]), Sense::Eq,
                net.generators[g].p_market);
  }

  // Value variables are expressed in "one p.u. fully shed" units so the cut
  // rows stay O(1); euro-scale coefficients next to unit binaries otherwise
  // wreck the master's conditioning.
  double psi_unit = 1.0;
  for (const auto& d : net.loads)
    psi_unit = std::max(psi_unit, d.cost_shed * net.base_mva);
  std::vector<int> psi(cs.size(), -1);
  for (int ci = 1; ci < cs.size(); ++ci) {
    if (!state_allows_shedding(net, cs[ci])) continue;
    psi[ci] = m.add_var("psi." + cs[ci].id, 0.0, kInf);
    m.set_cost(psi[ci], psi_unit);
  }

  int k = 0;
  for (const Cut& cut : cuts) {
    LinExpr lhs;
    for (auto [g, la] : cut.p0_terms) lhs.add(p0[g], la / psi_unit);
    for (auto [g, la] : cut.r_up_terms) lhs.add(ru[g], la / psi_unit);
    for (auto [g, la] : cut.r_down_terms) lhs.add(rd[g], la / psi_unit);
    // Topology terms are outside this master's space and are dropped.
    if (cut.kind != CutKind::Feasibility) lhs.add(psi.at(cut.contingency), -1.0);
    m.add_row("cut." + std::to_string(k++), lhs, Sense::Le, cut.rhs / psi_unit);
  }

  Mp0Result out;
  SolveResult res = solve_lp(m);
  out.status = res.status;
  if (res.status != SolveStatus::Optimal) return out;
  out.objective = res.objective;
  out.dispatch.p0.resize(ng);
  out.dispatch.r_up.resize(ng);
  out.dispatch.r_down.resize(ng);
  for (int g = 0; g < ng; ++g) {
    out.dispatch.p0[g] = res.x[p0[g]];
    out.dispatch.r_up[g] = res.x[ru[g]];
    out.dispatch.r_down[g] = res.x[rd[g]];
  }
  out.psi.assign(cs.size(), 0.0);
  for (int ci = 0; ci < cs.size(); ++ci)
    if (psi[ci] >= 0) out.psi[ci] = res.x[psi[ci]] * psi_unit;
  return out;
}

SubstationTopology solve_mp_i(const Network& net, const ContingencySet& cs,
                              const ModelConfig& mc, const ObjectiveConfig& oc,
                              const Linearization& lin, int substation,
                              const DispatchSolution& dispatch,
                              const std::vector<SubstationAssignment>& committed,
                              bool force_no_split, double mip_gap) {
  ModelConfig mci = mc;
  mci.allow_normal_shedding = true;  // the fixed dispatch may be unroutable

  BuildOptions opts;
  opts.states = {0};
  for (int ci : cs.of_substation(substation)) opts.states.push_back(ci);
  opts.splitting_budget = false;  // the greedy selection owns the budget
  opts.dispatch_cost_in_objective = false;
  opts.collapsed.assign(net.num_substations(), 1);
  opts.collapsed[substation] = 0;
  for (const auto& a : committed) opts.collapsed[a.substation] = 0;
  // An assignment that strands the committed dispatch must price as bad,
  // not error out.
  double max_shed_cost = 0.0;
  for (const auto& d : net.loads)
    max_shed_cost = std::max(max_shed_cost, d.cost_shed);
  opts.balance_slack_penalty = 2.0 * max_shed_cost * net.base_mva;

  ScsrModel sm = build_scsr(net, cs, mci, oc, lin, opts);
  LinearModel& m = sm.model;

  // Fix the dispatch; per-busbar splits stay tied to the z variables.
  for (size_t g = 0; g < net.generators.size(); ++g) {
    const int sub = net.generators[g].substation;
    if (opts.collapsed[sub]) {
      m.set_bounds(sm.vars.p0_b[g][0], dispatch.p0[g], dispatch.p0[g]);
    } else {
      LinExpr tot =
          LinExpr::term(sm.vars.p0_b[g][0]).add(sm.vars.p0_b[g][1], 1.0);
      m.add_row("fix.p0." + net.generators[g].id, tot, Sense::Eq,
                dispatch.p0[g]);
    }
    m.set_bounds(sm.vars.r_up[g], dispatch.r_up[g], dispatch.r_up[g]);
    m.set_bounds(sm.vars.r_down[g], dispatch.r_down[g], dispatch.r_down[g]);
  }
  // Commit previous splits.
  for (const auto& a : committed) {
    TopologyAssignment scratch = initial_topology(net);
    apply_assignment(net, a, &scratch);
    m.fix_var(sm.vars.z_coupler[a.substation], a.coupler_closed ? 1.0 : 0.0);
    for (auto [br, e] : net.branch_ends_at[a.substation])
      m.fix_var(sm.vars.z_line[br][e], scratch.line_busbar[br][e]);
    for (int g : net.gens_at[a.substation])
      m.fix_var(sm.vars.z_gen[g], scratch.gen_busbar[g]);
    for (int d : net.loads_at[a.substation])
      m.fix_var(sm.vars.z_load[d], scratch.load_busbar[d]);
  }

  SolveOptions sopt;
  sopt.rel_gap = mip_gap;
  sopt.time_limit = 60.0;
  sopt.warm_binaries = topology_binaries(sm, initial_topology(net));

  auto extract_assignment = [&](const SolveResult& res) {
    SubstationAssignment a;
    a.substation = substation;
    a.coupler_closed = res.x[sm.vars.z_coupler[substation]] >= 0.5;
    for (auto [br, e] : net.branch_ends_at[substation])
      a.line_busbar.push_back(res.x[sm.vars.z_line[br][e]] >= 0.5);
    for (int g : net.gens_at[substation])
      a.gen_busbar.push_back(res.x[sm.vars.z_gen[g]] >= 0.5);
    for (int d : net.loads_at[substation])
      a.load_busbar.push_back(res.x[sm.vars.z_load[d]] >= 0.5);
    return a;
  };

  SubstationTopology out;
  out.substation = substation;

  if (force_no_split) m.fix_var(sm.vars.z_coupler[substation], 1.0);
  SolveResult best = solve_milp(m, sopt);
  if (!best.has_solution()) {
    throw std::runtime_error("substation master failed for " +
                             net.substations[substation].id + ": " +
                             to_string(best.status));
  }
  out.best = extract_assignment(best);
  out.objective_opt = best.objective;

  if (out.best.coupler_closed) {
    out.no_split = out.best;
    out.objective_no_split = out.objective_opt;
  } else {
    m.fix_var(sm.vars.z_coupler[substation], 1.0);
    SolveResult ns = solve_milp(m, sopt);
    if (!ns.has_solution()) {
      throw std::runtime_error("no-split restriction failed for " +
                               net.substations[substation].id);
    }
    out.no_split = extract_assignment(ns);
    out.objective_no_split = ns.objective;
  }
  return out;
}

int select_split(const SplittingState& state,
                 const std::vector<SubstationTopology>& results) {
  if (state.candidates.empty()) {
    throw std::invalid_argument("select_split with no candidates");
  }
  int best = -1;
  double best_gain = -kInf;
  for (int i : state.candidates) {
    const auto& r = results.at(i);
    if (r.split_gain() > best_gain + 1e-12 ||
        (r.split_gain() > best_gain - 1e-12 && (best < 0 || i < best))) {
      best_gain = r.split_gain();
      best = i;
    }
  }
  return best;
}

HmmpResult run_hmmp(const Network& net, const ContingencySet& cs,
                    const ModelConfig& mc, const ObjectiveConfig& oc,
                    const HmmpOptions& opt) {
  const auto t0 = Clock::now();
  HmmpResult out;
  out.trace.method = "hmmp";

  const Linearization lin = prepare_linearization(net, mc);

  std::vector<std::unique_ptr<Subproblem>> fsps;
  fsps.push_back(std::make_unique<Subproblem>(net, cs, mc, oc, lin, 0,
                                              Subproblem::Type::Feasibility));
  for (int ci : cs.lines()) {
    if (state_allows_shedding(net, cs[ci])) continue;
    fsps.push_back(std::make_unique<Subproblem>(net, cs, mc, oc, lin, ci,
                                                Subproblem::Type::Feasibility));
  }
  std::vector<int> osp_conts;
  std::vector<std::unique_ptr<Subproblem>> osps;
  for (int ci = 1; ci < cs.size(); ++ci) {
    if (!state_allows_shedding(net, cs[ci])) continue;
    osp_conts.push_back(ci);
    osps.push_back(std::make_unique<Subproblem>(net, cs, mc, oc, lin, ci,
                                                Subproblem::Type::Optimality));
  }
  std::vector<std::unique_ptr<Subproblem>> osp_twins(osps.size());

  std::unique_ptr<ScsrModel> full_sm;
  auto restriction_bundle = [&](const TopologyAssignment& z) {
    if (!full_sm) {
      full_sm = std::make_unique<ScsrModel>(build_scsr(net, cs, mc, oc, lin));
    }
    SolveResult r = solve_restriction(*full_sm, z);
    SolutionBundle b;
    b.status = r.status;
    if (r.status == SolveStatus::Optimal)
      b = extract_bundle(net, cs, oc, *full_sm, r);
    return b;
  };

  std::vector<Cut> cuts;
  double lb = -kInf;
  double best_ub = kInf;
  SolutionBundle best;
  best.method = "hmmp";
  best.status = SolveStatus::Error;
  const int ns = net.num_substations();

  bool pruned_feasibility_cuts = false;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    if (seconds_since(t0) > opt.time_limit) break;

    // Dispatch stage.
    Mp0Result mp0 = solve_mp0(net, cs, oc, cuts);
    if (mp0.status != SolveStatus::Optimal && !pruned_feasibility_cuts) {
      // The projected feasibility cuts over-restricted the dispatch space;
      // drop them once and continue with the value cuts only.
      std::erase_if(cuts,
                    [](const Cut& c) { return c.kind == CutKind::Feasibility; });
      pruned_feasibility_cuts = true;
      mp0 = solve_mp0(net, cs, oc, cuts);
    }
    if (mp0.status != SolveStatus::Optimal) {
      if (!std::isfinite(best_ub)) best.status = mp0.status;
      break;
    }
    lb = std::max(lb, mp0.objective);
    const DispatchSolution& xhat = mp0.dispatch;

    // Topology stage: all substation masters in parallel, then the greedy
    // splitting selection with candidate re-solves.
    const auto batch0 = Clock::now();
    const bool splits_allowed = mc.max_splits > 0;
    std::vector<SubstationTopology> results(ns);
    parallel_for(ns, opt.workers, [&](int i) {
      results[i] = solve_mp_i(net, cs, mc, oc, lin, i, xhat, {},
                              !splits_allowed, opt.mp_gap);
    });

    SplittingState split;
    std::vector<SubstationAssignment> committed;
    for (int sw = 0; sw < mc.max_splits; ++sw) {
      split.candidates.clear();
      for (int i = 0; i < ns; ++i) {
        if (results[i].wants_split() &&
            std::find(split.committed.begin(), split.committed.end(), i) ==
                split.committed.end()) {
          split.candidates.push_back(i);
        }
      }
      if (split.candidates.empty() ||
          static_cast<int>(split.candidates.size() + split.committed.size()) <=
              sw) {
        break;
      }
      const int star = select_split(split, results);
      split.committed.push_back(star);
      committed.push_back(results[star].best);
      std::vector<int> rest;
      for (int i : split.candidates)
        if (i != star) rest.push_back(i);
      parallel_for(static_cast<int>(rest.size()), opt.workers, [&](int k) {
        results[rest[k]] = solve_mp_i(net, cs, mc, oc, lin, rest[k], xhat,
                                      committed, false, opt.mp_gap);
      });
    }
    const double batch_seconds = seconds_since(batch0);

    TopologyAssignment zhat = initial_topology(net);
    for (int i = 0; i < ns; ++i) {
      const bool is_committed =
          std::find(split.committed.begin(), split.committed.end(), i) !=
          split.committed.end();
      apply_assignment(net, is_committed ? results[i].best : results[i].no_split,
                       &zhat);
    }

    // Subproblem stage.
    std::vector<SubproblemResult> fres(fsps.size());
    parallel_for(static_cast<int>(fsps.size()), opt.workers,
                 [&](int k) { fres[k] = fsps[k]->solve(zhat, xhat); });
    // A violation the dispatch cannot influence (all lambda near zero)
    // projects to a contradiction in dispatch space; the topology stage has
    // to resolve those, so such cuts are skipped.
    auto add_feas_cut = [&](const SubproblemResult& fr) {
      if (fr.objective <= opt.eps_feasibility) return false;
      Cut cut = make_cut(net, cs, fr, CutKind::Feasibility, zhat, xhat, true);
      if (cut.p0_terms.empty() && cut.r_up_terms.empty() &&
          cut.r_down_terms.empty()) {
        return false;
      }
      if (max_cut_coefficient(cut) > opt.dual_cap) return false;
      cut.iteration = iter;
      cuts.push_back(std::move(cut));
      return true;
    };
    int new_feas = 0;
    int unfixable = 0;
    for (const auto& fr : fres) {
      if (fr.objective > opt.eps_feasibility) {
        if (add_feas_cut(fr)) {
          ++new_feas;
        } else {
          ++unfixable;
        }
      }
    }
    std::vector<SubproblemResult> ores(osps.size());
    parallel_for(static_cast<int>(osps.size()), opt.workers,
                 [&](int k) { ores[k] = osps[k]->solve(zhat, xhat); });
    bool all_osp_ok = true;
    for (size_t k = 0; k < ores.size(); ++k) {
      if (ores[k].feasible) continue;
      all_osp_ok = false;
      if (!osp_twins[k]) {
        osp_twins[k] = std::make_unique<Subproblem>(
            net, cs, mc, oc, lin, osp_conts[k], Subproblem::Type::Feasibility);
      }
      SubproblemResult tw = osp_twins[k]->solve(zhat, xhat);
      if (add_feas_cut(tw)) {
        ++new_feas;
      } else {
        ++unfixable;
      }
    }
    (void)unfixable;

    double ub = kInf;
    if (new_feas == 0 && all_osp_ok) {
      ub = xhat.dispatch_cost(net);
      for (const auto& orr : ores) ub += orr.objective;
      if (ub < best_ub - 1e-9) {
        best_ub = ub;
        best = SolutionBundle{};
        best.method = "hmmp";
        best.status = SolveStatus::Feasible;
        best.objective = ub;
        best.topology = zhat;
        best.dispatch = xhat;
        for (size_t g = 0; g < net.generators.size(); ++g) {
          const auto& gen = net.generators[g];
          best.redispatch_cost +=
              net.base_mva * gen.cost * (xhat.p0[g] - gen.p_market);
          best.reserve_cost += net.base_mva * (gen.cost_up * xhat.r_up[g] +
                                               gen.cost_down * xhat.r_down[g]);
        }
        for (size_t k = 0; k < ores.size(); ++k) {
          StateShedding ss;
          ss.contingency_id = cs[osp_conts[k]].id;
          ss.probability = cs[osp_conts[k]].probability;
          ss.shed_cost = ores[k].objective;
          ss.shed_by_load = ores[k].shed_by_load;
          best.shedding_cost += ores[k].objective;
          best.states.push_back(std::move(ss));
        }
      }
    } else if (opt.restriction_ub) {
      SolutionBundle rb = restriction_bundle(zhat);
      if (rb.status != SolveStatus::Optimal && !std::isfinite(best_ub)) {
        // The per-substation choices can clash globally (say, a coupler
        // limit seen only by the full flows); the initial topology is the
        // safe incumbent of last resort.
        rb = restriction_bundle(initial_topology(net));
      }
      if (rb.status == SolveStatus::Optimal && rb.objective < best_ub - 1e-9) {
        best_ub = rb.objective;
        ub = rb.objective;
        rb.method = "hmmp";
        best = std::move(rb);
      }
    }

    // Dispatch-space optimality cuts.
    int new_opt = 0;
    for (size_t k = 0; k < ores.size(); ++k) {
      if (!ores[k].feasible) continue;
      if (mp0.psi[osp_conts[k]] <
          ores[k].objective - std::max(1e-3, 1e-7 * (1.0 + ores[k].objective))) {
        Cut cut =
            make_cut(net, cs, ores[k], CutKind::OptimalityDispatch, zhat, xhat);
        if (max_cut_coefficient(cut) > opt.dual_cap) continue;
        cut.iteration = iter;
        cuts.push_back(std::move(cut));
        ++new_opt;
      }
    }

    TraceRow row;
    row.iteration = iter;
    row.lb = lb;
    row.ub = ub;
    row.best_ub = best_ub;
    row.cuts_feasibility = new_feas;
    row.cuts_optimality = new_opt;
    row.splits = static_cast<int>(split.committed.size());
    row.batch_seconds = batch_seconds;
    row.seconds = seconds_since(t0);
    out.trace.rows.push_back(row);

    const bool converged =
        std::isfinite(best_ub) &&
        best_ub - lb <= opt.eps_optimality * std::max(1.0, std::abs(best_ub));
    if (converged || (new_feas == 0 && new_opt == 0)) {
      best.converged = converged;
      break;
    }
  }

  out.lb = lb;
  out.ub = best_ub;
  if (std::isfinite(best_ub) && best.status != SolveStatus::Infeasible) {
    best.status = best.converged ? SolveStatus::Optimal : SolveStatus::Feasible;
    best.best_bound = lb;
    best.gap = std::isfinite(lb)
                   ? (best_ub - lb) / std::max(1.0, std::abs(best_ub))
                   : kInf;
  }
  best.wall_seconds = seconds_since(t0);
  out.bundle = std::move(best);
  out.cuts = std::move(cuts);
  return out;
}

}  // namespace scsr
