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
// Hand-built miniature networks shared by the test suites.

#ifndef SCSR_TESTS_TEST_NETS_HPP_
#define SCSR_TESTS_TEST_NETS_HPP_

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "scsr/grid.hpp"

namespace scsr::testnets {

inline std::string case_dir() {
  const char* d = std::getenv("SCSR_CASE_DIR");
  return d ? d : "cases";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Network load_case(const std::string& name) {
  return parse_case(read_file(case_dir() + "/" + name));
}

/// Two substations, one generator, one load, two parallel lines. Each line
/// alone cannot carry the full demand, so a line outage overloads the
/// survivor unless the dispatch keeps margin (it cannot: single source).
inline Network two_parallel_lines(double line_limit_mw = 70.0,
                                  double demand_mw = 100.0) {
  Network net;
  net.base_mva = 100.0;
  net.substations = {{"A", 3.0, 0.81, 1.21}, {"B", 3.0, 0.81, 1.21}};
  for (int k = 0; k < 2; ++k) {
    BranchRecord l;
    l.id = "L" + std::to_string(k + 1);
    l.from = 0;
    l.to = 1;
    l.b_series = -8.0;
    l.s_max = line_limit_mw / net.base_mva;
    net.branches.push_back(l);
  }
  GeneratorRecord g;
  g.id = "G1";
  g.substation = 0;
  g.p_max = 2.0;
  g.q_min = -1.0;
  g.q_max = 1.0;
  g.ramp_up = 0.5;
  g.ramp_down = 0.5;
  g.cost = 20.0;
  g.cost_up = 2.0;
  g.cost_down = 2.0;
  net.generators = {g};
  LoadRecord d;
  d.id = "D1";
  d.substation = 1;
  d.p_demand = demand_mw / net.base_mva;
  d.pf_tangent = 0.1;
  d.cost_shed = 10000.0;
  net.loads = {d};
  net.finalize();
  return net;
}

/// Triangle with two generators (one cheap remote, one dear local) and one
/// load; line limits force some redispatch and substation outages shed.
inline Network triangle() {
  Network net;
  net.base_mva = 100.0;
  net.substations = {{"S1", 1.2, 0.81, 1.21},
                     {"S2", 1.2, 0.81, 1.21},
                     {"S3", 1.2, 0.81, 1.21}};
  auto line = [&](const char* id, int f, int t, double smax_mw) {
    BranchRecord l;
    l.id = id;
    l.from = f;
    l.to = t;
    l.g_series = 0.3;
    l.b_series = -6.0;
    l.b_shunt = 0.01;
    l.s_max = smax_mw / net.base_mva;
    net.branches.push_back(l);
  };
  line("L1", 0, 1, 90.0);
  line("L2", 1, 2, 90.0);
  line("L3", 0, 2, 60.0);
  GeneratorRecord g1;
  g1.id = "G1";
  g1.substation = 0;
  g1.p_max = 1.5;
  g1.q_min = -0.8;
  g1.q_max = 0.8;
  g1.ramp_up = 0.6;
  g1.ramp_down = 0.6;
  g1.cost = 15.0;
  g1.cost_up = 1.5;
  g1.cost_down = 1.0;
  g1.p_market = 0.9;
  GeneratorRecord g2 = g1;
  g2.id = "G2";
  g2.substation = 2;
  g2.p_max = 1.0;
  g2.cost = 40.0;
  g2.cost_up = 4.0;
  g2.cost_down = 2.0;
  g2.p_market = 0.0;
  net.generators = {g1, g2};
  net.has_market_dispatch = true;
  LoadRecord d;
  d.id = "D1";
  d.substation = 2;
  d.p_demand = 0.9;
  d.pf_tangent = 0.2;
  d.cost_shed = 10000.0;
  net.loads = {d};
  net.finalize();
  return net;
}

/// A substation with two incident lines, one generator and one load placed
/// on opposite busbars by the interesting topologies. Used for coupler and
/// busbar outage stories.
inline Network two_sub_gen_load(double coupler_limit_mw = 200.0) {
  Network net;
  net.base_mva = 100.0;
  net.substations = {{"A", coupler_limit_mw / 100.0, 0.81, 1.21},
                     {"B", coupler_limit_mw / 100.0, 0.81, 1.21}};
  for (int k = 0; k < 2; ++k) {
    BranchRecord l;
    l.id = "L" + std::to_string(k + 1);
    l.from = 0;
    l.to = 1;
    l.b_series = -8.0;
    l.s_max = 1.5;
    net.branches.push_back(l);
  }
  GeneratorRecord g;
  g.id = "G1";
  g.substation = 0;
  g.p_max = 2.0;
  g.q_min = -1.0;
  g.q_max = 1.0;
  g.ramp_up = 1.0;
  g.ramp_down = 1.0;
  g.cost = 10.0;
  g.cost_up = 1.0;
  g.cost_down = 1.0;
  net.generators = {g};
  LoadRecord d1;
  d1.id = "D1";
  d1.substation = 1;
  d1.p_demand = 0.5;
  d1.pf_tangent = 0.1;
  d1.cost_shed = 10000.0;
  LoadRecord d2 = d1;
  d2.id = "D2";
  d2.substation = 1;
  d2.p_demand = 0.3;
  net.loads = {d1, d2};
  net.finalize();
  return net;
}

/// Two substations, each serving its own load from its own unit at exactly
/// its capacity over lossless parallel lines: flows are zero, and with the
/// paper-literal busbar semantics no contingency sheds or strands anything.
inline Network self_sufficient_pair() {
  Network net;
  net.base_mva = 100.0;
  net.substations = {{"A", 2.0, 0.81, 1.21}, {"B", 2.0, 0.81, 1.21}};
  for (int k = 0; k < 2; ++k) {
    BranchRecord l;
    l.id = "L" + std::to_string(k + 1);
    l.from = 0;
    l.to = 1;
    l.b_series = -8.0;
    l.s_max = 1.0;
    net.branches.push_back(l);
  }
  GeneratorRecord ga;
  ga.id = "GA";
  ga.substation = 0;
  ga.p_max = 0.5;
  ga.q_min = -1.0;
  ga.q_max = 1.0;
  ga.cost = 10.0;
  GeneratorRecord gb = ga;
  gb.id = "GB";
  gb.substation = 1;
  gb.p_max = 0.3;
  net.generators = {ga, gb};
  net.loads = {{"DA", 0, 0.5, 0.0, 9000.0}, {"DB", 1, 0.3, 0.0, 9000.0}};
  net.finalize();
  return net;
}

}  // namespace scsr::testnets

#endif  // SCSR_TESTS_TEST_NETS_HPP_
