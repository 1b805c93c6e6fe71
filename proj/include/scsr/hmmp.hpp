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
// The multi-master heuristic: a grid-free dispatch master, independent
// per-substation topology masters solved in parallel against a collapsed
// grid, greedy selection of splitting actions, and an outer loop closed by
// feasibility/optimality subproblems feeding dispatch-space cuts back.

#ifndef SCSR_HMMP_HPP_
#define SCSR_HMMP_HPP_

#include <optional>
#include <vector>

#include "scsr/benders.hpp"
#include "scsr/scsr_model.hpp"

namespace scsr {

/// Outcome of one substation topology master.
struct SubstationTopology {
  int substation = -1;
  SubstationAssignment best;      // optimal assignment (may split)
  SubstationAssignment no_split;  // optimum of the coupler-closed restriction
  double objective_opt = 0.0;     // O* of the master
  double objective_no_split = 0.0;

  bool wants_split() const { return !best.coupler_closed; }
  double split_gain() const { return objective_no_split - objective_opt; }
};

struct SplittingState {
  std::vector<int> candidates;
  std::vector<int> committed;  // in selection order
};

/// Dispatch master: economic dispatch plus accumulated dispatch-space cuts.
/// Returns the dispatch, the master objective (lower bound), and the value
/// variables for the cut-violation checks.
struct Mp0Result {
  DispatchSolution dispatch;
  double objective = 0.0;
  std::vector<double> psi;  // per contingency index; 0 where absent
  SolveStatus status = SolveStatus::Error;
};

Mp0Result solve_mp0(const Network& net, const ContingencySet& cs,
                    const ObjectiveConfig& oc, const std::vector<Cut>& cuts);

/// One substation master at a fixed dispatch. All other substations are
/// single electric nodes except the committed splits, which are fixed at
/// their chosen two-busbar assignment.
SubstationTopology solve_mp_i(const Network& net, const ContingencySet& cs,
                              const ModelConfig& mc, const ObjectiveConfig& oc,
                              const Linearization& lin, int substation,
                              const DispatchSolution& dispatch,
                              const std::vector<SubstationAssignment>& committed,
                              bool force_no_split = false,
                              double mip_gap = 1e-6);

/// Greedy choice: the candidate with the largest no-split-to-split objective
/// reduction; ties break to the lowest substation index.
int select_split(const SplittingState& state,
                 const std::vector<SubstationTopology>& results);

struct HmmpOptions {
  double eps_feasibility = 1e-4;
  double eps_optimality = 0.01;
  int max_iterations = 20;
  double time_limit = 600.0;
  int workers = 1;
  double mp_gap = 1e-6;
  double dual_cap = 1e7;
  bool restriction_ub = true;  // guarantee a feasible incumbent per iteration
};

struct HmmpResult {
  SolutionBundle bundle;
  RunTrace trace;
  double lb = -kInf;
  double ub = kInf;
  std::vector<Cut> cuts;
};

HmmpResult run_hmmp(const Network& net, const ContingencySet& cs,
                    const ModelConfig& mc, const ObjectiveConfig& oc,
                    const HmmpOptions& opt = {});

}  // namespace scsr

#endif  // SCSR_HMMP_HPP_
