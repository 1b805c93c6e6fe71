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

#include "scsr/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include "lp_internal.hpp"
#include "scsr/parallel.hpp"

namespace scsr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

double Cut::lhs_at(const TopologyAssignment& topo, const DispatchSolution& d) const {
  double v = 0.0;
  for (auto [i, mu] : coupler_terms) v += mu * topo.coupler_closed[i];
  for (auto& [be, mu] : line_terms) v += mu * topo.line_busbar[be[0]][be[1]];
  for (auto [g, mu] : gen_terms) v += mu * topo.gen_busbar[g];
  for (auto [dd, mu] : load_terms) v += mu * topo.load_busbar[dd];
  for (auto [g, la] : p0_terms) v += la * d.p0[g];
  for (auto [g, la] : r_up_terms) v += la * d.r_up[g];
  for (auto [g, la] : r_down_terms) v += la * d.r_down[g];
  return v;
}

struct Subproblem::PoolHolder {
  internal::RowPool pool;
};

Subproblem::Subproblem(const Network& net, const ContingencySet& cs,
                       const ModelConfig& mc, const ObjectiveConfig& oc,
                       const Linearization& lin, int contingency, Type type)
    : net_(&net),
      contingency_(contingency),
      type_(type),
      pool_(std::make_shared<PoolHolder>()) {
  BuildOptions opts;
  opts.states = {contingency};
  opts.binaries_as_binaries = false;
  opts.global_topology_rules = false;
  opts.dispatch_cost_in_objective = false;
  opts.balance_slacks = type == Type::Feasibility;
  opts.shedding_in_objective = type == Type::Optimality;
  sm_ = build_scsr(net, cs, mc, oc, lin, opts);
  LinearModel& m = sm_.model;

  const int ns = net.num_substations();
  fix_coupler_.resize(ns);
  for (int i = 0; i < ns; ++i) {
    fix_coupler_[i] = m.add_row("fix.z.cpl." + net.substations[i].id,
                                LinExpr::term(sm_.vars.z_coupler[i]), Sense::Eq,
                                1.0);
  }
  fix_line_.resize(net.branches.size());
  for (size_t br = 0; br < net.branches.size(); ++br) {
    for (int e = 0; e < 2; ++e) {
      fix_line_[br][e] =
          m.add_row("fix.z.ln." + net.branches[br].id + (e ? ".t" : ".f"),
                    LinExpr::term(sm_.vars.z_line[br][e]), Sense::Eq, 0.0);
    }
  }
  fix_gen_.resize(net.generators.size());
  fix_load_.resize(net.loads.size());
  for (size_t g = 0; g < net.generators.size(); ++g) {
    fix_gen_[g] = m.add_row("fix.z.g." + net.generators[g].id,
                            LinExpr::term(sm_.vars.z_gen[g]), Sense::Eq, 0.0);
  }
  for (size_t d = 0; d < net.loads.size(); ++d) {
    fix_load_[d] = m.add_row("fix.z.d." + net.loads[d].id,
                             LinExpr::term(sm_.vars.z_load[d]), Sense::Eq, 0.0);
  }
  fix_p0_.resize(net.generators.size());
  fix_r_up_.resize(net.generators.size());
  fix_r_down_.resize(net.generators.size());
  for (size_t g = 0; g < net.generators.size(); ++g) {
    LinExpr tot = LinExpr::term(sm_.vars.p0_b[g][0]).add(sm_.vars.p0_b[g][1], 1.0);
    fix_p0_[g] = m.add_row("fix.p0." + net.generators[g].id, tot, Sense::Eq, 0.0);
    fix_r_up_[g] = m.add_row("fix.ru." + net.generators[g].id,
                             LinExpr::term(sm_.vars.r_up[g]), Sense::Eq, 0.0);
    fix_r_down_[g] = m.add_row("fix.rd." + net.generators[g].id,
                               LinExpr::term(sm_.vars.r_down[g]), Sense::Eq, 0.0);
  }
}

SubproblemResult Subproblem::solve(const TopologyAssignment& topo,
                                   const DispatchSolution& dispatch) {
  const Network& net = *net_;
  LinearModel& m = sm_.model;
  for (int i = 0; i < net.num_substations(); ++i)
    m.set_row_rhs(fix_coupler_[i], topo.coupler_closed[i]);
  for (size_t br = 0; br < net.branches.size(); ++br)
    for (int e = 0; e < 2; ++e)
      m.set_row_rhs(fix_line_[br][e], topo.line_busbar[br][e]);
  for (size_t g = 0; g < net.generators.size(); ++g)
    m.set_row_rhs(fix_gen_[g], topo.gen_busbar[g]);
  for (size_t d = 0; d < net.loads.size(); ++d)
    m.set_row_rhs(fix_load_[d], topo.load_busbar[d]);
  for (size_t g = 0; g < net.generators.size(); ++g) {
    m.set_row_rhs(fix_p0_[g], dispatch.p0[g]);
    m.set_row_rhs(fix_r_up_[g], dispatch.r_up[g]);
    m.set_row_rhs(fix_r_down_[g], dispatch.r_down[g]);
  }

  SolveOptions opt;
  SolveResult res =
      internal::lp_solve(m, nullptr, nullptr, opt, &pool_->pool);
  if (res.status == SolveStatus::Infeasible && type_ == Type::Optimality) {
    SubproblemResult out;
    out.contingency = contingency_;
    out.feasible = false;
    return out;
  }
  if (res.status != SolveStatus::Optimal) {
    throw std::runtime_error("subproblem " + std::string(type_ == Type::Feasibility
                                                             ? "FSP"
                                                             : "OSP") +
                             " for contingency " +
                             std::to_string(contingency_) + " ended " +
                             to_string(res.status) + ": " + res.message);
  }

  SubproblemResult out;
  out.contingency = contingency_;
  out.objective = res.objective;
  // A zero objective admits the all-zero dual (costs are nonnegative), which
  // is the useful subgradient; the interior-point dual at such a degenerate
  // face can carry arbitrarily large components.
  const double zero_tol = type_ == Type::Optimality ? 1e-3 : 1e-8;
  if (res.objective <= zero_tol) {
    for (double& v : res.row_duals) v = 0.0;
    out.objective = std::max(0.0, out.objective);
  }
  const int ns = net.num_substations();
  out.mu_coupler.resize(ns);
  for (int i = 0; i < ns; ++i) out.mu_coupler[i] = res.row_duals[fix_coupler_[i]];
  out.mu_line.resize(net.branches.size());
  for (size_t br = 0; br < net.branches.size(); ++br)
    for (int e = 0; e < 2; ++e)
      out.mu_line[br][e] = res.row_duals[fix_line_[br][e]];
  out.mu_gen.resize(net.generators.size());
  out.mu_load.resize(net.loads.size());
  for (size_t g = 0; g < net.generators.size(); ++g)
    out.mu_gen[g] = res.row_duals[fix_gen_[g]];
  for (size_t d = 0; d < net.loads.size(); ++d)
    out.mu_load[d] = res.row_duals[fix_load_[d]];
  out.lambda_p0.resize(net.generators.size());
  out.lambda_r_up.resize(net.generators.size());
  out.lambda_r_down.resize(net.generators.size());
  for (size_t g = 0; g < net.generators.size(); ++g) {
    out.lambda_p0[g] = res.row_duals[fix_p0_[g]];
    out.lambda_r_up[g] = res.row_duals[fix_r_up_[g]];
    out.lambda_r_down[g] = res.row_duals[fix_r_down_[g]];
  }
  if (type_ == Type::Optimality) {
    out.shed_by_load.assign(net.loads.size(), 0.0);
    const auto& st = sm_.vars.states.at(0);
    for (size_t d = 0; d < net.loads.size(); ++d)
      for (int b = 0; b < 2; ++b)
        if (st.shed[d][b] >= 0) out.shed_by_load[d] += res.x[st.shed[d][b]];
  }
  return out;
}

SubproblemResult solve_fsp(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, const Linearization& lin,
                           int contingency, const TopologyAssignment& topo,
                           const DispatchSolution& dispatch) {
  ObjectiveConfig oc;
  Subproblem sp(net, cs, mc, oc, lin, contingency, Subproblem::Type::Feasibility);
  return sp.solve(topo, dispatch);
}

SubproblemResult solve_osp(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, const ObjectiveConfig& oc,
                           const Linearization& lin, int contingency,
                           const TopologyAssignment& topo,
                           const DispatchSolution& dispatch) {
  Subproblem sp(net, cs, mc, oc, lin, contingency, Subproblem::Type::Optimality);
  SubproblemResult r = sp.solve(topo, dispatch);
  if (!r.feasible) {
    throw std::runtime_error(
        "optimality subproblem infeasible for " + cs[contingency].id +
        ": the candidate strands committed generation");
  }
  return r;
}

double max_cut_coefficient(const Cut& cut) {
  double mx = 0.0;
  for (auto& [i, v] : cut.coupler_terms) mx = std::max(mx, std::abs(v));
  for (auto& [be, v] : cut.line_terms) mx = std::max(mx, std::abs(v));
  for (auto& [g, v] : cut.gen_terms) mx = std::max(mx, std::abs(v));
  for (auto& [d, v] : cut.load_terms) mx = std::max(mx, std::abs(v));
  for (auto& [g, v] : cut.p0_terms) mx = std::max(mx, std::abs(v));
  for (auto& [g, v] : cut.r_up_terms) mx = std::max(mx, std::abs(v));
  for (auto& [g, v] : cut.r_down_terms) mx = std::max(mx, std::abs(v));
  return mx;
}

double max_dual_magnitude(const SubproblemResult& r) {
  double dual_max = 0.0;
  for (double v : r.mu_coupler) dual_max = std::max(dual_max, std::abs(v));
  for (auto& a : r.mu_line)
    dual_max = std::max({dual_max, std::abs(a[0]), std::abs(a[1])});
  for (double v : r.mu_gen) dual_max = std::max(dual_max, std::abs(v));
  for (double v : r.mu_load) dual_max = std::max(dual_max, std::abs(v));
  for (double v : r.lambda_p0) dual_max = std::max(dual_max, std::abs(v));
  for (double v : r.lambda_r_up) dual_max = std::max(dual_max, std::abs(v));
  for (double v : r.lambda_r_down) dual_max = std::max(dual_max, std::abs(v));
  return dual_max;
}

Cut make_cut(const Network& net, const ContingencySet& cs,
             const SubproblemResult& r, CutKind kind,
             const TopologyAssignment& topo, const DispatchSolution& d,
             bool dispatch_only) {
  Cut cut;
  cut.kind = kind;
  cut.contingency = r.contingency;
  cut.anchor_value = r.objective;

  const bool topo_terms = kind != CutKind::OptimalityDispatch && !dispatch_only;
  const Contingency& c = cs[r.contingency];
  const bool local = kind == CutKind::OptimalityHeuristic;
  const int home = local ? c.target : -1;

  // Dual noise below this threshold only degrades the cut's conditioning.
  const double dual_max = max_dual_magnitude(r);
  const double drop = std::max(1e-9 * dual_max, 1e-9);
  auto keep = [&](double v) { return std::abs(v) > drop; };

  double anchor_dot = 0.0;
  if (topo_terms) {
    for (int i = 0; i < net.num_substations(); ++i) {
      if (local && i != home) continue;
      if (!keep(r.mu_coupler[i])) continue;
      cut.coupler_terms.push_back({i, r.mu_coupler[i]});
      anchor_dot += r.mu_coupler[i] * topo.coupler_closed[i];
    }
    for (size_t br = 0; br < net.branches.size(); ++br) {
      for (int e = 0; e < 2; ++e) {
        const int sub = net.branch_end_sub(static_cast<int>(br), e);
        if (local && sub != home) continue;
        const double mu = r.mu_line[br][e];
        if (!keep(mu)) continue;
        cut.line_terms.push_back({{static_cast<int>(br), e}, mu});
        anchor_dot += mu * topo.line_busbar[br][e];
      }
    }
    for (size_t g = 0; g < net.generators.size(); ++g) {
      if (local && net.generators[g].substation != home) continue;
      if (!keep(r.mu_gen[g])) continue;
      cut.gen_terms.push_back({static_cast<int>(g), r.mu_gen[g]});
      anchor_dot += r.mu_gen[g] * topo.gen_busbar[g];
    }
    for (size_t dd = 0; dd < net.loads.size(); ++dd) {
      if (local && net.loads[dd].substation != home) continue;
      if (!keep(r.mu_load[dd])) continue;
      cut.load_terms.push_back({static_cast<int>(dd), r.mu_load[dd]});
      anchor_dot += r.mu_load[dd] * topo.load_busbar[dd];
    }
  }
  for (size_t g = 0; g < net.generators.size(); ++g) {
    if (keep(r.lambda_p0[g])) {
      cut.p0_terms.push_back({static_cast<int>(g), r.lambda_p0[g]});
      anchor_dot += r.lambda_p0[g] * d.p0[g];
    }
    if (keep(r.lambda_r_up[g])) {
      cut.r_up_terms.push_back({static_cast<int>(g), r.lambda_r_up[g]});
      anchor_dot += r.lambda_r_up[g] * d.r_up[g];
    }
    if (keep(r.lambda_r_down[g])) {
      cut.r_down_terms.push_back({static_cast<int>(g), r.lambda_r_down[g]});
      anchor_dot += r.lambda_r_down[g] * d.r_down[g];
    }
  }
  // lhs - anchor_dot + objective <= psi (optimality) or <= 0 (feasibility)
  cut.rhs = anchor_dot - r.objective;
  return cut;
}

namespace {

void apply_cut(LinearModel& m, const ScsrVars& vars, const Cut& cut, int psi_var,
               double unit, int index) {
  LinExpr lhs;
  for (auto [i, mu] : cut.coupler_terms) lhs.add(vars.z_coupler[i], mu / unit);
  for (auto& [be, mu] : cut.line_terms)
    lhs.add(vars.z_line[be[0]][be[1]], mu / unit);
  for (auto [g, mu] : cut.gen_terms) lhs.add(vars.z_gen[g], mu / unit);
  for (auto [d, mu] : cut.load_terms) lhs.add(vars.z_load[d], mu / unit);
  for (auto [g, la] : cut.p0_terms) {
    lhs.add(vars.p0_b[g][0], la / unit);
    lhs.add(vars.p0_b[g][1], la / unit);
  }
  for (auto [g, la] : cut.r_up_terms) lhs.add(vars.r_up[g], la / unit);
  for (auto [g, la] : cut.r_down_terms) lhs.add(vars.r_down[g], la / unit);
  if (psi_var >= 0) lhs.add(psi_var, -1.0);
  m.add_row("cut." + std::to_string(index), lhs, Sense::Le, cut.rhs / unit);
}

}  // namespace

MasterModel build_master(const Network& net, const ContingencySet& cs,
                         const ModelConfig& mc, const ObjectiveConfig& oc,
                         const Linearization& lin, const std::vector<Cut>& cuts) {
  MasterModel mm;
  BuildOptions opts;
  opts.states = {0};  // normal state carries index 0 by construction
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin, opts);
  for (const auto& d : net.loads)
    mm.psi_unit = std::max(mm.psi_unit, d.cost_shed * net.base_mva);
  mm.psi.assign(cs.size(), -1);
  for (int ci = 0; ci < cs.size(); ++ci) {
    if (!state_allows_shedding(net, cs[ci])) continue;
    mm.psi[ci] = sm.model.add_var("psi." + cs[ci].id, 0.0, kInf);
    sm.model.set_cost(mm.psi[ci], mm.psi_unit);
  }
  int k = 0;
  for (const Cut& cut : cuts) {
    const int psi =
        cut.kind == CutKind::Feasibility ? -1 : mm.psi.at(cut.contingency);
    apply_cut(sm.model, sm.vars, cut, psi, mm.psi_unit, k++);
  }
  mm.sm = std::move(sm);
  return mm;
}

BdResult run_bd(const Network& net, const ContingencySet& cs, const ModelConfig& mc,
                const ObjectiveConfig& oc, const BdOptions& opt) {
  const auto t0 = Clock::now();
  BdResult out;
  out.trace.method =
      opt.variant == BdVariant::Conventional ? "bd-c" : "bd-h";

  const Linearization lin = prepare_linearization(net, mc);

  // Subproblems, reused across iterations. Index 0 is the normal-state FSP.
  std::vector<std::unique_ptr<Subproblem>> fsps, osps;
  fsps.push_back(std::make_unique<Subproblem>(net, cs, mc, oc, lin, 0,
                                              Subproblem::Type::Feasibility));
  for (int ci : cs.lines()) {
    if (state_allows_shedding(net, cs[ci])) continue;  // radial lines go to OSP
    fsps.push_back(std::make_unique<Subproblem>(net, cs, mc, oc, lin, ci,
                                                Subproblem::Type::Feasibility));
  }
  std::vector<int> osp_conts;
  for (int ci = 1; ci < cs.size(); ++ci) {
    if (!state_allows_shedding(net, cs[ci])) continue;
    osp_conts.push_back(ci);
    osps.push_back(std::make_unique<Subproblem>(net, cs, mc, oc, lin, ci,
                                                Subproblem::Type::Optimality));
  }

  // Lazily built feasibility twins for optimality states whose restriction
  // turns out infeasible at a candidate.
  std::vector<std::unique_ptr<Subproblem>> osp_twins(osps.size());

  // Full model for restriction-based incumbents.
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
  best.method = out.trace.method;
  best.status = SolveStatus::Error;
  std::vector<double> warm;

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    if (seconds_since(t0) > opt.time_limit) break;
    MasterModel master = build_master(net, cs, mc, oc, lin, cuts);
    SolveOptions mopt;
    mopt.rel_gap = opt.master_gap;
    mopt.time_limit =
        std::min(opt.master_time_limit, opt.time_limit - seconds_since(t0));
    if (!warm.empty()) {
      mopt.warm_binaries = warm;
      mopt.warm_binaries.resize(master.sm.model.num_vars(), 0.0);
    } else {
      mopt.warm_binaries = topology_binaries(master.sm, initial_topology(net));
    }
    SolveResult mres = solve_milp(master.sm.model, mopt);
    if (mres.status == SolveStatus::Infeasible) {
      best.status = SolveStatus::Infeasible;
      break;
    }
    if (!mres.has_solution()) break;
    warm = mres.x;
    lb = std::max(lb, mres.best_bound);

    SolutionBundle cand = extract_bundle(net, cs, oc, master.sm, mres);
    const TopologyAssignment& zhat = cand.topology;
    const DispatchSolution& xhat = cand.dispatch;

    // Feasibility sweep over the normal state and line outages.
    std::vector<SubproblemResult> fres(fsps.size());
    parallel_for(static_cast<int>(fsps.size()), opt.workers,
                 [&](int k) { fres[k] = fsps[k]->solve(zhat, xhat); });
    int new_feas_cuts = 0;
    for (const auto& fr : fres) {
      if (fr.objective > opt.eps_feasibility) {
        Cut cut = make_cut(net, cs, fr, CutKind::Feasibility, zhat, xhat);
        if (max_cut_coefficient(cut) > opt.dual_cap) continue;
        cut.iteration = iter;
        cuts.push_back(std::move(cut));
        ++new_feas_cuts;
      }
    }

    // Optimality sweep over the shedding contingencies.
    std::vector<SubproblemResult> ores(osps.size());
    parallel_for(static_cast<int>(osps.size()), opt.workers,
                 [&](int k) { ores[k] = osps[k]->solve(zhat, xhat); });
    for (size_t k = 0; k < ores.size(); ++k) {
      if (ores[k].feasible) continue;
      // Stranded candidate: cut it away with the state's feasibility twin.
      if (!osp_twins[k]) {
        osp_twins[k] = std::make_unique<Subproblem>(
            net, cs, mc, oc, lin, osp_conts[k], Subproblem::Type::Feasibility);
      }
      SubproblemResult tw = osp_twins[k]->solve(zhat, xhat);
      if (tw.objective > opt.eps_feasibility) {
        Cut cut = make_cut(net, cs, tw, CutKind::Feasibility, zhat, xhat);
        if (max_cut_coefficient(cut) > opt.dual_cap) continue;
        cut.iteration = iter;
        cuts.push_back(std::move(cut));
        ++new_feas_cuts;
      }
    }

    double ub = kInf;
    bool all_osp_ok = true;
    for (const auto& orr : ores) all_osp_ok &= orr.feasible;
    const bool sweep_feasible = new_feas_cuts == 0 && all_osp_ok;
    if (!sweep_feasible && opt.restriction_ub) {
      SolutionBundle rb = restriction_bundle(zhat);
      if (rb.status == SolveStatus::Optimal) {
        ub = rb.objective;
        if (ub < best_ub - 1e-9) {
          best_ub = ub;
          rb.method = best.method;
          best = std::move(rb);
        }
      }
    }
    if (sweep_feasible) {
      ub = xhat.dispatch_cost(net);
      for (const auto& orr : ores) ub += orr.objective;
      if (ub < best_ub - 1e-9) {
        best_ub = ub;
        best = cand;
        best.objective = ub;
        best.shedding_cost = 0.0;
        for (size_t k = 0; k < ores.size(); ++k) {
          StateShedding ss;
          ss.contingency_id = cs[osp_conts[k]].id;
          ss.probability = cs[osp_conts[k]].probability;
          ss.shed_cost = ores[k].objective;
          ss.shed_by_load = ores[k].shed_by_load;
          best.shedding_cost += ores[k].objective;
          // replace the master's (empty) state record for this contingency
          bool replaced = false;
          for (auto& st : best.states) {
            if (st.contingency_id == ss.contingency_id) {
              st = ss;
              replaced = true;
            }
          }
          if (!replaced) best.states.push_back(std::move(ss));
        }
        best.redispatch_cost = 0.0;
        best.reserve_cost = 0.0;
        for (size_t g = 0; g < net.generators.size(); ++g) {
          const auto& gen = net.generators[g];
          best.redispatch_cost +=
              net.base_mva * gen.cost * (xhat.p0[g] - gen.p_market);
          best.reserve_cost += net.base_mva * (gen.cost_up * xhat.r_up[g] +
                                               gen.cost_down * xhat.r_down[g]);
        }
      }
    }

    // Optimality cuts for value variables that undershoot their subproblem.
    const CutKind okind = opt.variant == BdVariant::Conventional
                              ? CutKind::OptimalityOriginal
                              : CutKind::OptimalityHeuristic;
    int new_opt_cuts = 0;
    for (size_t k = 0; k < ores.size(); ++k) {
      if (!ores[k].feasible) continue;
      const double psi_hat = master.psi_value(mres, osp_conts[k]);
      if (psi_hat <
          ores[k].objective - std::max(1e-3, 1e-7 * (1.0 + ores[k].objective))) {
        Cut cut = make_cut(net, cs, ores[k], okind, zhat, xhat);
        if (max_cut_coefficient(cut) > opt.dual_cap) continue;
        cut.iteration = iter;
        cuts.push_back(std::move(cut));
        ++new_opt_cuts;
      }
    }

    TraceRow row;
    row.iteration = iter;
    row.lb = lb;
    row.ub = ub;
    row.best_ub = best_ub;
    row.cuts_feasibility = new_feas_cuts;
    row.cuts_optimality = new_opt_cuts;
    row.seconds = seconds_since(t0);
    out.trace.rows.push_back(row);

    const bool converged =
        std::isfinite(best_ub) &&
        best_ub - lb <= opt.eps_optimality * std::max(1.0, std::abs(best_ub));
    if (converged || (new_feas_cuts == 0 && new_opt_cuts == 0)) {
      best.converged = converged;
      break;
    }
  }

  out.lb = lb;
  out.ub = best_ub;
  if (std::isfinite(best_ub)) {
    if (best.status != SolveStatus::Infeasible) {
      best.status = best.converged ? SolveStatus::Optimal : SolveStatus::Feasible;
    }
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
