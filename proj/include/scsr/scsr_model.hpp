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
// The security-constrained substation reconfiguration MILP: node-breaker
// substation blocks per contingency state, splitting budget and symmetry
// rules, objective variants, plus the exhaustive oracle used for
// verification at small scale.

#ifndef SCSR_SCSR_MODEL_HPP_
#define SCSR_SCSR_MODEL_HPP_

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "scsr/grid.hpp"
#include "scsr/linear_model.hpp"
#include "scsr/pf_linear.hpp"
#include "scsr/solver.hpp"

namespace scsr {

struct ModelConfig {
  double big_m_theta = std::numbers::pi;  // rad
  double big_m_v = 0.0;                   // p.u.^2; 0 derives vmax-vmin+0.1
  int max_splits = 0;
  int polygon_segments = 16;
  bool symmetry_break = true;         // pin the lowest line per substation to B1
  bool dead_busbar_rules = true;      // outaged busbar kills its elements
  bool allow_normal_shedding = false; // normal state may shed (priced)

  double derived_big_m_v(const Network& net) const;
};

enum class ObjectiveMode : std::uint8_t {
  Standard,       // redispatch + reserves + shedding
  Probabilistic,  // shedding weighted by contingency probability
  FixedDispatch,  // P0 pinned to the market dispatch
  FixedCostCap,   // minimize shedding, generation cost capped at (1+alpha)
};

struct ObjectiveConfig {
  ObjectiveMode mode = ObjectiveMode::Standard;
  double alpha = 0.0;  // FixedCostCap headroom
};

/// Linearization data shared by every model built for one case.
struct Linearization {
  OperatingPoint op;
  std::vector<LossLinearization> losses;  // per branch
  CirclePolygon polygon;
};

/// Computes the lossless expansion point at the initial topology and derives
/// loss tangents and the thermal polygon.
Linearization prepare_linearization(const Network& net, const ModelConfig& mc);

// ---------------------------------------------------------------------------

/// Variable handles of one built model. Index -1 marks an absent variable
/// (fixed to zero by an outage or not part of the build).
struct ScsrVars {
  // Binary topology decisions (continuous [0,1] columns in subproblem builds).
  std::vector<int> z_coupler;
  std::vector<std::array<int, 2>> z_line;  // per branch end
  std::vector<int> z_gen, z_load;
  // Dispatch: per-busbar normal output, reserves.
  std::vector<std::array<int, 2>> p0_b;
  std::vector<int> r_up, r_down;

  struct State {
    int cont = -1;        // index into the ContingencySet
    double weight = 1.0;  // objective weight of this state's shedding
    bool sheddable = false;
    std::vector<std::array<int, 2>> th_bus, v_bus;  // [substation][busbar]
    std::vector<std::array<int, 2>> th_end, v_end;  // [branch][end]
    std::vector<std::array<int, 2>> p_b1, q_b1;     // [branch][end]
    std::vector<int> p_cp, q_cp;                    // [substation]
    std::vector<std::array<int, 2>> pg, qg;         // [generator][busbar]
    std::vector<std::array<int, 2>> shed;           // [load][busbar]
    std::vector<int> p_balance_slack_plus, p_balance_slack_minus;  // FSP only
  };
  std::vector<State> states;

  const State* state_of(int cont) const {
    for (const auto& s : states)
      if (s.cont == cont) return &s;
    return nullptr;
  }
};

struct ScsrModel {
  LinearModel model;
  ScsrVars vars;
  std::vector<int> state_conts;  // contingency indices, build order
};

/// Options controlling which parts of the full formulation are emitted.
struct BuildOptions {
  std::vector<int> states;            // contingency indices; empty = all
  bool binaries_as_binaries = true;   // false: [0,1] continuous columns
  bool global_topology_rules = true;  // two-per-busbar + symmetry pin
  bool splitting_budget = true;       // emit the total-splits cap (4a)
  bool balance_slacks = false;        // elastic nodal balances (FSP building)
  // When positive, nodal balances get slacks priced at this rate (EUR/h per
  // p.u.) in the main objective: topologies that strand committed generation
  // become expensive instead of infeasible.
  double balance_slack_penalty = 0.0;
  bool dispatch_cost_in_objective = true;
  bool shedding_in_objective = true;
  // Substations modeled as a single electric node (the per-substation
  // masters collapse everything except their own substation).
  std::vector<std::uint8_t> collapsed;
};

ScsrModel build_scsr(const Network& net, const ContingencySet& cs,
                     const ModelConfig& mc, const ObjectiveConfig& oc,
                     const Linearization& lin, const BuildOptions& opts = {});

/// FixedCostCap convenience wrapper (alpha >= 0 required).
ScsrModel fixed_cost_model(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, double alpha,
                           const Linearization& lin);

/// Shedding states are the substation contingencies plus radial line outages
/// (when present in the set); non-radial line states are feasibility-only.
bool state_allows_shedding(const Network& net, const Contingency& c);

// --- solution bundles -------------------------------------------------------

struct StateShedding {
  std::string contingency_id;
  double probability = 1.0;
  double shed_cost = 0.0;                    // EUR/h, unweighted
  std::vector<double> shed_by_load;          // p.u., summed over busbars
  double total_shed() const;
};

struct SolutionBundle {
  std::string method;
  SolveStatus status = SolveStatus::Error;
  bool converged = false;
  double objective = 0.0;       // per the objective mode
  double best_bound = -kInf;
  double gap = kInf;
  double redispatch_cost = 0.0; // EUR/h (includes the -pi*Pm constant)
  double reserve_cost = 0.0;    // EUR/h
  double shedding_cost = 0.0;   // EUR/h, weighted sum over states
  double wall_seconds = 0.0;
  TopologyAssignment topology;
  DispatchSolution dispatch;
  std::vector<StateShedding> states;
};

/// Reads a solved full model back into a bundle.
SolutionBundle extract_bundle(const Network& net, const ContingencySet& cs,
                              const ObjectiveConfig& oc, const ScsrModel& sm,
                              const SolveResult& res);

struct TraceRow {
  int iteration = 0;
  double lb = -kInf;
  double ub = kInf;
  double best_ub = kInf;
  int cuts_feasibility = 0;
  int cuts_optimality = 0;
  int splits = 0;
  double batch_seconds = 0.0;
  double seconds = 0.0;
};

struct RunTrace {
  std::string method;
  std::vector<TraceRow> rows;
  /// Delimited text export, one row per iteration.
  std::string to_tsv() const;
};

// --- monolithic solve and oracle -------------------------------------------

struct OrgResult {
  SolutionBundle bundle;
  RunTrace trace;
};

OrgResult solve_org_mip(const Network& net, const ContingencySet& cs,
                        const ModelConfig& mc, const ObjectiveConfig& oc,
                        const SolveOptions& solver,
                        const TopologyAssignment* warm_start = nullptr);

/// Enumerates every topology satisfying the splitting rules and solves the LP
/// restriction of each; refuses when more than `max_binaries` free binary
/// decisions would have to be enumerated. Restrictions are priced on
/// `workers` threads; the winner is independent of the thread count.
SolutionBundle brute_force_oracle(const Network& net, const ContingencySet& cs,
                                  const ModelConfig& mc, const ObjectiveConfig& oc,
                                  int max_binaries = 20, int workers = 1);

/// Number of free binary decisions after the symmetry pin.
int count_topology_binaries(const Network& net, const ModelConfig& mc);

/// Binary-variable vector (indexed by model column) matching a topology.
std::vector<double> topology_binaries(const ScsrModel& sm,
                                      const TopologyAssignment& topo);

/// Fixes every topology binary at the assignment and solves the LP
/// restriction of the built model.
SolveResult solve_restriction(const ScsrModel& sm, const TopologyAssignment& topo,
                              const SolveOptions& opt = {});

/// Market-style dispatch: the security-constrained OPF over the normal state
/// and the line contingencies at a fixed topology. This is the baseline of
/// the planned-outage study and the source of p_market for the fixed-cost
/// runs.
DispatchSolution scopf_dispatch(const Network& net, const ModelConfig& mc,
                                const Linearization& lin,
                                const TopologyAssignment& topo);

}  // namespace scsr

#endif  // SCSR_SCSR_MODEL_HPP_
