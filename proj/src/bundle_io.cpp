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

#include "scsr/bundle_io.hpp"

#include <json.hpp>

namespace scsr {

using ordered_json = nlohmann::ordered_json;

std::string bundle_to_json(const Network& net, const SolutionBundle& b) {
  ordered_json j;
  j["schema_version"] = 1;
  j["method"] = b.method;
  j["status"] = to_string(b.status);
  j["converged"] = b.converged;
  j["objective"] = b.objective;
  j["best_bound"] = b.best_bound;
  j["gap"] = b.gap;
  j["redispatch_cost"] = b.redispatch_cost;
  j["reserve_cost"] = b.reserve_cost;
  j["shedding_cost"] = b.shedding_cost;

  ordered_json topo;
  ordered_json couplers;
  for (int i = 0; i < net.num_substations(); ++i)
    couplers[net.substations[i].id] =
        static_cast<int>(b.topology.coupler_closed[i]);
  topo["coupler_closed"] = couplers;
  ordered_json lines;
  for (size_t br = 0; br < net.branches.size(); ++br) {
    lines[net.branches[br].id] = {b.topology.line_busbar[br][0] ? 2 : 1,
                                  b.topology.line_busbar[br][1] ? 2 : 1};
  }
  topo["line_busbar"] = lines;
  ordered_json gens, loads;
  for (size_t g = 0; g < net.generators.size(); ++g)
    gens[net.generators[g].id] = b.topology.gen_busbar[g] ? 2 : 1;
  for (size_t d = 0; d < net.loads.size(); ++d)
    loads[net.loads[d].id] = b.topology.load_busbar[d] ? 2 : 1;
  topo["generator_busbar"] = gens;
  topo["load_busbar"] = loads;
  j["topology"] = topo;

  ordered_json disp;
  for (size_t g = 0; g < net.generators.size(); ++g) {
    ordered_json row;
    row["p0_mw"] = b.dispatch.p0[g] * net.base_mva;
    row["r_up_mw"] = b.dispatch.r_up[g] * net.base_mva;
    row["r_down_mw"] = b.dispatch.r_down[g] * net.base_mva;
    disp[net.generators[g].id] = row;
  }
  j["dispatch"] = disp;

  ordered_json states;
  for (const auto& st : b.states) {
    ordered_json row;
    row["probability"] = st.probability;
    row["shed_cost"] = st.shed_cost;
    ordered_json shed = ordered_json::object();
    for (size_t d = 0; d < st.shed_by_load.size(); ++d) {
      if (st.shed_by_load[d] * net.base_mva > 1e-9)
        shed[net.loads[d].id] = st.shed_by_load[d] * net.base_mva;
    }
    row["shed_mw"] = shed;
    states[st.contingency_id] = row;
  }
  j["contingency_shedding"] = states;
  return j.dump(2) + "\n";
}

SolutionBundle bundle_from_json(const Network& net, const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  if (j.value("schema_version", 0) != 1) {
    throw std::runtime_error("unsupported solution schema version");
  }
  SolutionBundle b;
  b.method = j.value("method", "");
  b.converged = j.value("converged", false);
  b.objective = j.value("objective", 0.0);
  b.best_bound = j.value("best_bound", 0.0);
  b.gap = j.value("gap", 0.0);
  b.redispatch_cost = j.value("redispatch_cost", 0.0);
  b.reserve_cost = j.value("reserve_cost", 0.0);
  b.shedding_cost = j.value("shedding_cost", 0.0);
  const std::string status = j.value("status", "error");
  for (SolveStatus s : {SolveStatus::Optimal, SolveStatus::Feasible,
                        SolveStatus::Infeasible, SolveStatus::Unbounded,
                        SolveStatus::TimeLimit, SolveStatus::Error}) {
    if (status == to_string(s)) b.status = s;
  }

  const auto& topo = j.at("topology");
  b.topology.coupler_closed.resize(net.num_substations());
  for (int i = 0; i < net.num_substations(); ++i) {
    const auto& c = topo.at("coupler_closed");
    if (!c.contains(net.substations[i].id)) {
      throw std::runtime_error("solution does not cover substation " +
                               net.substations[i].id);
    }
    b.topology.coupler_closed[i] = c.at(net.substations[i].id).get<int>() != 0;
  }
  b.topology.line_busbar.resize(net.branches.size());
  for (size_t br = 0; br < net.branches.size(); ++br) {
    const auto& l = topo.at("line_busbar");
    if (!l.contains(net.branches[br].id)) {
      throw std::runtime_error("solution does not cover branch " +
                               net.branches[br].id);
    }
    const auto& pair = l.at(net.branches[br].id);
    b.topology.line_busbar[br][0] = pair.at(0).get<int>() == 2;
    b.topology.line_busbar[br][1] = pair.at(1).get<int>() == 2;
  }
  b.topology.gen_busbar.resize(net.generators.size());
  b.topology.load_busbar.resize(net.loads.size());
  b.dispatch.p0.resize(net.generators.size());
  b.dispatch.r_up.resize(net.generators.size());
  b.dispatch.r_down.resize(net.generators.size());
  for (size_t g = 0; g < net.generators.size(); ++g) {
    const std::string& id = net.generators[g].id;
    if (!topo.at("generator_busbar").contains(id) ||
        !j.at("dispatch").contains(id)) {
      throw std::runtime_error("solution does not cover generator " + id);
    }
    b.topology.gen_busbar[g] = topo.at("generator_busbar").at(id).get<int>() == 2;
    const auto& row = j.at("dispatch").at(id);
    b.dispatch.p0[g] = row.at("p0_mw").get<double>() / net.base_mva;
    b.dispatch.r_up[g] = row.at("r_up_mw").get<double>() / net.base_mva;
    b.dispatch.r_down[g] = row.at("r_down_mw").get<double>() / net.base_mva;
  }
  for (size_t d = 0; d < net.loads.size(); ++d) {
    const std::string& id = net.loads[d].id;
    if (!topo.at("load_busbar").contains(id)) {
      throw std::runtime_error("solution does not cover load " + id);
    }
    b.topology.load_busbar[d] = topo.at("load_busbar").at(id).get<int>() == 2;
  }

  if (j.contains("contingency_shedding")) {
    for (const auto& [cid, row] : j.at("contingency_shedding").items()) {
      StateShedding ss;
      ss.contingency_id = cid;
      ss.probability = row.value("probability", 1.0);
      ss.shed_cost = row.value("shed_cost", 0.0);
      ss.shed_by_load.assign(net.loads.size(), 0.0);
      if (row.contains("shed_mw")) {
        for (const auto& [lid, mw] : row.at("shed_mw").items()) {
          bool found = false;
          for (size_t d = 0; d < net.loads.size(); ++d) {
            if (net.loads[d].id == lid) {
              ss.shed_by_load[d] = mw.get<double>() / net.base_mva;
              found = true;
            }
          }
          if (!found) {
            throw std::runtime_error("solution sheds unknown load " + lid);
          }
        }
      }
      b.states.push_back(std::move(ss));
    }
  }
  return b;
}

}  // namespace scsr
