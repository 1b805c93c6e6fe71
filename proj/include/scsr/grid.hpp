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

#ifndef SCSR_GRID_HPP_
#define SCSR_GRID_HPP_

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scsr {

/// Raised on malformed case files; carries the 1-based source location.
class CaseError : public std::runtime_error {
 public:
  CaseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  int line;
  int column;
};

// All power quantities below are per-unit on the system base; voltage limits
// are squared magnitudes in p.u.^2; costs are EUR/MWh.

struct SubstationRecord {
  std::string id;
  double coupler_limit = 0.0;  // apparent-power limit of the busbar coupler
  double v_min = 0.0;
  double v_max = 0.0;
};

struct BranchRecord {
  std::string id;
  int from = -1;
  int to = -1;
  double g_series = 0.0;
  double b_series = 0.0;
  double g_shunt = 0.0;  // per end
  double b_shunt = 0.0;  // per end
  double s_max = 0.0;
  bool is_radial = false;  // removing the branch disconnects the grid
};

struct GeneratorRecord {
  std::string id;
  int substation = -1;
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
  double cost = 0.0;       // energy
  double cost_up = 0.0;    // up-reserve
  double cost_down = 0.0;  // down-reserve
  double p_market = 0.0;   // market-cleared dispatch
};

struct LoadRecord {
  std::string id;
  int substation = -1;
  double p_demand = 0.0;
  double pf_tangent = 0.0;  // Q = pf_tangent * P
  double cost_shed = 0.0;
};

enum class Busbar : std::uint8_t { B1 = 0, B2 = 1 };

struct Network {
  double base_mva = 100.0;
  int reference = 0;  // substation index whose B1 angle is pinned to zero
  bool has_market_dispatch = false;
  std::vector<SubstationRecord> substations;
  std::vector<BranchRecord> branches;
  std::vector<GeneratorRecord> generators;
  std::vector<LoadRecord> loads;

  // Element incidence, filled at validation time.
  std::vector<std::vector<std::pair<int, int>>> branch_ends_at;  // (branch, end)
  std::vector<std::vector<int>> gens_at;
  std::vector<std::vector<int>> loads_at;

  int num_substations() const { return static_cast<int>(substations.size()); }
  int branch_end_sub(int branch, int end) const {
    return end == 0 ? branches[branch].from : branches[branch].to;
  }
  double total_demand() const;
  int substation_index(std::string_view id) const;  // -1 when unknown

  /// Checks referential integrity and value invariants; computes incidence
  /// lists and radial flags. Throws std::invalid_argument on violations.
  void finalize();
};

Network parse_case(const std::string& text);
std::string serialize_case(const Network& net);

/// Normal-state dispatch and purchased spinning reserves, per unit.
struct DispatchSolution {
  std::vector<double> p0;
  std::vector<double> r_up;
  std::vector<double> r_down;

  double dispatch_cost(const Network& net) const;  // EUR/h, market-relative
};

// ---------------------------------------------------------------------------

enum class ContingencyKind : std::uint8_t { Normal, Line, Coupler, BusbarOutage };

struct Contingency {
  std::string id;
  ContingencyKind kind = ContingencyKind::Normal;
  int target = -1;          // branch index (Line) or substation index
  Busbar busbar = Busbar::B1;  // BusbarOutage only
  double probability = 1.0;

  bool is_outage_of_line(int branch) const {
    return kind == ContingencyKind::Line && target == branch;
  }
};

struct KindProbabilities {
  double line = 1.0;
  double coupler = 1.0;
  double busbar = 1.0;
};

struct ContingencySet {
  std::vector<Contingency> entries;  // entry 0 is always Normal

  int size() const { return static_cast<int>(entries.size()); }
  const Contingency& operator[](int i) const { return entries[i]; }
  std::vector<int> lines() const;     // indices into entries
  std::vector<int> couplers() const;
  std::vector<int> busbars() const;
  /// Coupler + busbar contingencies of one substation.
  std::vector<int> of_substation(int sub) const;
  int find(std::string_view id) const;  // -1 when unknown
};

ContingencySet build_contingency_set(const Network& net, bool include_radial_lines,
                                     const KindProbabilities& probs = {});

// ---------------------------------------------------------------------------

/// All binary topology decisions. Busbar conventions follow the model:
/// 0 selects B1, 1 selects B2; coupler_closed true keeps the coupler in.
struct TopologyAssignment {
  std::vector<std::uint8_t> coupler_closed;          // per substation
  std::vector<std::array<std::uint8_t, 2>> line_busbar;  // per branch per end
  std::vector<std::uint8_t> gen_busbar;
  std::vector<std::uint8_t> load_busbar;

  int num_splits() const;
  bool operator==(const TopologyAssignment&) const = default;
};

TopologyAssignment initial_topology(const Network& net);

/// Topology decisions local to one substation.
struct SubstationAssignment {
  int substation = -1;
  bool coupler_closed = true;
  std::vector<std::uint8_t> line_busbar;  // by position in branch_ends_at[sub]
  std::vector<std::uint8_t> gen_busbar;   // by position in gens_at[sub]
  std::vector<std::uint8_t> load_busbar;  // by position in loads_at[sub]
};

/// Enumerates the per-substation assignments of connected elements. With
/// `split` the two-lines-per-busbar rules apply (empty result when fewer
/// than four lines); `apply_symmetry_break` pins the lowest-indexed line
/// to B1.
std::vector<SubstationAssignment> enumerate_assignments(const Network& net, int sub,
                                                        bool split,
                                                        bool apply_symmetry_break);

/// Applies a per-substation assignment onto a full topology.
void apply_assignment(const Network& net, const SubstationAssignment& a,
                      TopologyAssignment* topo);

/// Verifies the splitting-budget and per-substation rules (two lines per
/// busbar when split; lowest line on B1). Returns an empty string when valid.
std::string check_topology(const Network& net, const TopologyAssignment& topo,
                           int max_splits);

}  // namespace scsr

#endif  // SCSR_GRID_HPP_
