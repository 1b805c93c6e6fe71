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
// Benders decomposition over the contingency states: a normal-state master
// with per-contingency value variables, feasibility subproblems for line
// outages, optimality subproblems for substation outages, and dual-based
// cuts in the conventional and heuristic (substation-local) variants.

#ifndef SCSR_BENDERS_HPP_
#define SCSR_BENDERS_HPP_

#include <array>
#include <memory>
#include <vector>

#include "scsr/scsr_model.hpp"

namespace scsr {

enum class CutKind : std::uint8_t {
  Feasibility,
  OptimalityOriginal,
  OptimalityHeuristic,
  OptimalityDispatch,
};

/// A dual cut in domain terms (substation/branch/generator indices), so the
/// same object can be applied to any master's variable mapping.
struct Cut {
  CutKind kind = CutKind::OptimalityOriginal;
  int contingency = -1;
  int iteration = -1;
  // lhs  <=  psi_c + rhs   (optimality)  /  lhs <= rhs  (feasibility)
  std::vector<std::pair<int, double>> coupler_terms;            // substation
  std::vector<std::pair<std::array<int, 2>, double>> line_terms;  // branch,end
  std::vector<std::pair<int, double>> gen_terms, load_terms;    // z_g, z_d
  std::vector<std::pair<int, double>> p0_terms, r_up_terms, r_down_terms;
  double rhs = 0.0;
  double anchor_value = 0.0;  // subproblem objective at the generating point

  /// Value of the lhs at a given candidate (for validity checks and tests).
  double lhs_at(const TopologyAssignment& topo, const DispatchSolution& d) const;
};

/// Duals of one feasibility or optimality subproblem.
struct SubproblemResult {
  int contingency = -1;
  // A fixed candidate can strand committed generation (say, a coupler outage
  // with no down-reserve); the optimality subproblem is then infeasible and
  // the caller falls back to a feasibility cut for the same state.
  bool feasible = true;
  double objective = 0.0;  // slack sum (FSP, p.u.) or shedding cost (OSP, EUR/h)
  std::vector<double> shed_by_load;  // OSP only, p.u.
  std::vector<double> mu_coupler;
  std::vector<std::array<double, 2>> mu_line;
  std::vector<double> mu_gen, mu_load;
  std::vector<double> lambda_p0, lambda_r_up, lambda_r_down;
};

/// Reusable single-state subproblem: the fixing rows' right-hand sides are
/// rewritten per candidate, so repeated solves share the model and row pool.
class Subproblem {
 public:
  enum class Type { Feasibility, Optimality };

  Subproblem(const Network& net, const ContingencySet& cs, const ModelConfig& mc,
             const ObjectiveConfig& oc, const Linearization& lin, int contingency,
             Type type);

  SubproblemResult solve(const TopologyAssignment& topo,
                         const DispatchSolution& dispatch);

  int contingency() const { return contingency_; }
  Type type() const { return type_; }

 private:
  const Network* net_;
  int contingency_;
  Type type_;
  ScsrModel sm_;
  // fixing row indices
  std::vector<int> fix_coupler_;
  std::vector<std::array<int, 2>> fix_line_;
  std::vector<int> fix_gen_, fix_load_;
  std::vector<int> fix_p0_, fix_r_up_, fix_r_down_;
  struct PoolHolder;
  std::shared_ptr<PoolHolder> pool_;
};

SubproblemResult solve_fsp(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, const Linearization& lin,
                           int contingency, const TopologyAssignment& topo,
                           const DispatchSolution& dispatch);

SubproblemResult solve_osp(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, const ObjectiveConfig& oc,
                           const Linearization& lin, int contingency,
                           const TopologyAssignment& topo,
                           const DispatchSolution& dispatch);

/// Builds the cut of the requested kind from subproblem duals, anchored at
/// the generating point. `dispatch_only` restricts a feasibility cut to the
/// dispatch terms (the form routed to a master without topology variables).
Cut make_cut(const Network& net, const ContingencySet& cs,
             const SubproblemResult& result, CutKind kind,
             const TopologyAssignment& anchor_topo,
             const DispatchSolution& anchor_dispatch, bool dispatch_only = false);

/// Master problem: normal state, topology rules, value variables for every
/// shedding contingency, accumulated cuts. Value variables are scaled by
/// psi_unit (EUR/h per unit) to keep the cut rows well conditioned.
struct MasterModel {
  ScsrModel sm;
  std::vector<int> psi;  // per contingency index; -1 where absent
  double psi_unit = 1.0;

  double psi_value(const SolveResult& res, int contingency) const {
    const int v = psi.at(contingency);
    return v >= 0 ? res.x[v] * psi_unit : 0.0;
  }
};

MasterModel build_master(const Network& net, const ContingencySet& cs,
                         const ModelConfig& mc, const ObjectiveConfig& oc,
                         const Linearization& lin, const std::vector<Cut>& cuts);

enum class BdVariant : std::uint8_t { Conventional, HeuristicCuts };

struct BdOptions {
  BdVariant variant = BdVariant::Conventional;
  double eps_feasibility = 1e-4;  // p.u. slack tolerance
  double eps_optimality = 0.01;   // relative UB-LB gap
  int max_iterations = 40;
  double time_limit = 600.0;
  int workers = 1;
  double master_gap = 1e-6;
  double master_time_limit = 120.0;
  // Cuts built from degenerate dual rays carry astronomically steep
  // coefficients and destroy the master's conditioning; anything above this
  // magnitude is discarded (the bounds stay valid, the cut is just skipped).
  double dual_cap = 1e7;
  // When the candidate fails a feasibility subproblem, re-solve the full
  // restriction at its topology (dispatch free) and use that feasible value
  // as the incumbent. Keeps the upper bound finite while the cuts learn.
  bool restriction_ub = true;
};

/// Largest dual magnitude in a subproblem result.
double max_dual_magnitude(const SubproblemResult& r);

/// Largest coefficient magnitude actually used by a cut.
double max_cut_coefficient(const Cut& cut);

struct BdResult {
  SolutionBundle bundle;
  RunTrace trace;
  std::vector<Cut> cuts;
  double lb = -kInf;
  double ub = kInf;
};

BdResult run_bd(const Network& net, const ContingencySet& cs, const ModelConfig& mc,
                const ObjectiveConfig& oc, const BdOptions& opt = {});

}  // namespace scsr

#endif  // SCSR_BENDERS_HPP_
