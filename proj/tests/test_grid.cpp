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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scsr/grid.hpp"

using namespace scsr;

namespace {

std::string triangle_case() {
  return R"(# three substations in a cycle
[meta]
base_mva = 100.0
reference = S1

[substations]
id s_max v_min v_max
S1 150.0 0.81 1.21
S2 150.0 0.81 1.21
S3 150.0 0.81 1.21

[branches]
id from to g_series b_series g_shunt b_shunt s_max
L1 S1 S2 0.2 -5.0 0.0 0.02 100.0
L2 S2 S3 0.2 -5.0 0.0 0.02 100.0
L3 S1 S3 0.2 -5.0 0.0 0.02 100.0

[generators]
id sub p_min p_max q_min q_max ramp_up ramp_down cost cost_up cost_down p_market
G1 S1 0.0 120.0 -50.0 50.0 30.0 30.0 20.0 2.0 2.0 60.0

[loads]
id sub p_demand pf_tangent cost_shed
D1 S3 60.0 0.2 10000.0
)";
}

std::string case_dir() {
  const char* d = std::getenv("SCSR_CASE_DIR");
  return d ? d : "cases";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("triangle case parses, normalizes and finds no bridges") {
  Network net = parse_case(triangle_case());
  CHECK(net.num_substations() == 3);
  CHECK(net.branches.size() == 3);
  CHECK(net.generators.size() == 1);
  CHECK(net.loads[0].p_demand == doctest::Approx(0.6));  // per unit
  CHECK(net.has_market_dispatch);
  for (const auto& b : net.branches) CHECK_FALSE(b.is_radial);
}

TEST_CASE("dangling reference is rejected with location") {
  std::string text = triangle_case();
  auto pos = text.find("L3 S1 S3");
  text.replace(pos, 8, "L3 S1 SX");
  CHECK_THROWS_AS(parse_case(text), CaseError);
  try {
    parse_case(text);
  } catch (const CaseError& e) {
    CHECK(e.line > 0);
    CHECK(std::string(e.what()).find("SX") != std::string::npos);
  }
}

TEST_CASE("duplicate id and unknown field rejected") {
  {
    std::string text = triangle_case();
    auto pos = text.find("L2 S2 S3");
    std::string t2 = text;
    t2.replace(pos, 2, "L1");
    CHECK_THROWS(parse_case(t2));
  }
  {
    std::string text = triangle_case();
    auto pos = text.find("id from to");
    text.replace(pos, 10, "id frm to ");
    CHECK_THROWS_AS(parse_case(text), CaseError);
  }
}

TEST_CASE("non-positive limit rejected") {
  std::string text = triangle_case();
  auto pos = text.find("S1 150.0");
  text.replace(pos, 8, "S1 0.0  ");
  CHECK_THROWS(parse_case(text));
}

TEST_CASE("radial branch detection") {
  // A spur substation hangs off S3 through one line: that line is a bridge.
  std::string spur = triangle_case();
  spur.insert(spur.find("\n[generators]"), "L4 S3 S4 0.2 -5.0 0.0 0.02 100.0\n");
  spur.insert(spur.find("\n[branches]"), "S4 150.0 0.81 1.21\n");
  Network net = parse_case(spur);
  int radial = 0;
  for (const auto& b : net.branches) radial += b.is_radial;
  CHECK(radial == 1);
  CHECK(net.branches[3].is_radial);
}

TEST_CASE("serialize round-trips") {
  Network a = parse_case(triangle_case());
  Network b = parse_case(serialize_case(a));
  CHECK(a.base_mva == b.base_mva);
  CHECK(a.reference == b.reference);
  REQUIRE(a.branches.size() == b.branches.size());
  for (size_t e = 0; e < a.branches.size(); ++e) {
    CHECK(a.branches[e].id == b.branches[e].id);
    CHECK(a.branches[e].b_series == b.branches[e].b_series);
    CHECK(a.branches[e].s_max == b.branches[e].s_max);
  }
  for (size_t g = 0; g < a.generators.size(); ++g) {
    CHECK(a.generators[g].p_max == b.generators[g].p_max);
    CHECK(a.generators[g].p_market == b.generators[g].p_market);
  }
  for (size_t d = 0; d < a.loads.size(); ++d) {
    CHECK(a.loads[d].p_demand == b.loads[d].p_demand);
    CHECK(a.loads[d].cost_shed == b.loads[d].cost_shed);
  }
}

TEST_CASE("contingency set counts and probabilities") {
  Network net = parse_case(triangle_case());
  SUBCASE("triangle: 1 + 3 + 3 + 6 entries") {
    ContingencySet cs = build_contingency_set(net, false);
    CHECK(cs.size() == 13);
    CHECK(cs.entries[0].kind == ContingencyKind::Normal);
    CHECK(cs.lines().size() == 3);
    CHECK(cs.couplers().size() == 3);
    CHECK(cs.busbars().size() == 6);
    CHECK(cs.of_substation(0).size() == 3);
  }
  SUBCASE("per-kind probabilities applied") {
    KindProbabilities p;
    p.busbar = 0.01;
    ContingencySet cs = build_contingency_set(net, false, p);
    for (int i : cs.busbars()) CHECK(cs[i].probability == 0.01);
    for (int i : cs.lines()) CHECK(cs[i].probability == 1.0);
  }
  SUBCASE("determinism") {
    ContingencySet a = build_contingency_set(net, false);
    ContingencySet b = build_contingency_set(net, false);
    REQUIRE(a.size() == b.size());
    for (int i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
  }
}

TEST_CASE("initial topology is all-closed, all-B1") {
  Network net = parse_case(triangle_case());
  TopologyAssignment t = initial_topology(net);
  for (auto z : t.coupler_closed) CHECK(z == 1);
  for (auto& lb : t.line_busbar) {
    CHECK(lb[0] == 0);
    CHECK(lb[1] == 0);
  }
  CHECK(check_topology(net, t, 0).empty());
}

TEST_CASE("assignment enumeration matches the four-line counting argument") {
  // One substation with four lines and nothing else attached.
  std::string text = R"(
[meta]
base_mva = 100.0
reference = H

[substations]
id s_max v_min v_max
H 200.0 0.81 1.21
A 200.0 0.81 1.21
B 200.0 0.81 1.21
C 200.0 0.81 1.21
D 200.0 0.81 1.21

[branches]
id from to g_series b_series g_shunt b_shunt s_max
L1 H A 0.1 -4.0 0.0 0.0 90.0
L2 H B 0.1 -4.0 0.0 0.0 90.0
L3 H C 0.1 -4.0 0.0 0.0 90.0
L4 H D 0.1 -4.0 0.0 0.0 90.0
LA A B 0.1 -4.0 0.0 0.0 90.0
LB B C 0.1 -4.0 0.0 0.0 90.0
LC C D 0.1 -4.0 0.0 0.0 90.0

[generators]
id sub p_min p_max q_min q_max ramp_up ramp_down cost cost_up cost_down
G1 A 0.0 100.0 -40.0 40.0 20.0 20.0 25.0 2.0 2.0

[loads]
id sub p_demand pf_tangent cost_shed
D1 C 50.0 0.25 9000.0
)";
  Network net = parse_case(text);
  const int hub = net.substation_index("H");
  REQUIRE(hub >= 0);

  auto with_break = enumerate_assignments(net, hub, true, true);
  auto without_break = enumerate_assignments(net, hub, true, false);
  CHECK(with_break.size() == 3);
  CHECK(without_break.size() == 6);
  CHECK(with_break.size() * 2 == without_break.size());

  // Three lines cannot split two-per-busbar.
  auto three = enumerate_assignments(net, net.substation_index("A"), true, true);
  CHECK(three.empty());

  // The expected unique partitions: {l1l2|l3l4},{l1l3|l2l4},{l1l4|l2l3}.
  for (const auto& a : with_break) {
    CHECK(a.line_busbar[0] == 0);
    int b2 = a.line_busbar[1] + a.line_busbar[2] + a.line_busbar[3];
    CHECK(b2 == 2);
  }
}

TEST_CASE("bundled cases parse") {
  for (const char* name : {"triangle.case", "oracle_a.case", "oracle_b.case",
                           "congested.case", "ieee14.case"}) {
    Network net = parse_case(read_file(case_dir() + "/" + name));
    CHECK(net.num_substations() >= 2);
  }
}
