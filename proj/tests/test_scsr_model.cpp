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

#include <cmath>

#include "scsr/scsr_model.hpp"
#include "test_nets.hpp"

using namespace scsr;
using namespace scsr::testnets;

namespace {

SolveOptions tight() {
  SolveOptions o;
  o.rel_gap = 1e-7;
  o.time_limit = 120.0;
  return o;
}

}  // namespace

TEST_CASE("org-mip equals the exhaustive oracle on the triangle") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  CHECK(cs.size() == 13);
  ModelConfig mc;
  mc.max_splits = 0;  // no substation has four lines anyway
  ObjectiveConfig oc;

  SolutionBundle oracle = brute_force_oracle(net, cs, mc, oc);
  REQUIRE(oracle.status == SolveStatus::Optimal);

  OrgResult org = solve_org_mip(net, cs, mc, oc, tight());
  REQUIRE(org.bundle.status == SolveStatus::Optimal);

  CHECK(std::abs(org.bundle.objective - oracle.objective) /
            std::max(1.0, std::abs(oracle.objective)) <
        1e-6);
}

TEST_CASE("objective breakdown sums to the reported objective") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  OrgResult org = solve_org_mip(net, cs, mc, oc, tight());
  REQUIRE(org.bundle.status == SolveStatus::Optimal);
  const double sum = org.bundle.redispatch_cost + org.bundle.reserve_cost +
                     org.bundle.shedding_cost;
  CHECK(org.bundle.objective ==
        doctest::Approx(sum).epsilon(1e-6).scale(std::abs(sum) + 1.0));
}

TEST_CASE("normal-only contingency set reduces to an OPF with binaries") {
  Network net = triangle();
  ContingencySet cs;
  cs.entries.push_back({"normal", ContingencyKind::Normal, -1, Busbar::B1, 1.0});
  ModelConfig mc;
  ObjectiveConfig oc;
  OrgResult org = solve_org_mip(net, cs, mc, oc, tight());
  REQUIRE(org.bundle.status == SolveStatus::Optimal);
  CHECK(org.bundle.states.size() == 1);
  CHECK(org.bundle.shedding_cost == 0.0);
  // Merit order: the cheap unit covers demand plus losses.
  CHECK(org.bundle.dispatch.p0[0] >= 0.85);
}

TEST_CASE("infeasible when demand exceeds capacity and shedding is off") {
  Network net = triangle();
  net.loads[0].p_demand = 5.0;  // above total generation capability
  ContingencySet cs;
  cs.entries.push_back({"normal", ContingencyKind::Normal, -1, Busbar::B1, 1.0});
  ModelConfig mc;
  ObjectiveConfig oc;
  OrgResult org = solve_org_mip(net, cs, mc, oc, tight());
  CHECK(org.bundle.status == SolveStatus::Infeasible);
}

TEST_CASE("initial topology stays feasible once normal shedding is allowed") {
  // Line-outage states forbid shedding by construction, so the any-case
  // feasibility property is over the normal and substation contingencies.
  Network net = triangle();
  net.loads[0].p_demand = 5.0;  // far beyond capacity
  ContingencySet full = build_contingency_set(net, false);
  ContingencySet cs;
  for (const auto& e : full.entries)
    if (e.kind != ContingencyKind::Line) cs.entries.push_back(e);
  ModelConfig mc;
  mc.allow_normal_shedding = true;
  ObjectiveConfig oc;
  Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);
  std::vector<double> t0(sm.model.num_vars(), 0.0);
  for (int z : sm.vars.z_coupler) t0[z] = 1.0;
  SolveResult res = solve_fixed_lp(sm.model, t0);
  CHECK(res.status == SolveStatus::Optimal);
}

TEST_CASE("all-on-B1 forces zero coupler flow in every state") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);
  std::vector<double> t0(sm.model.num_vars(), 0.0);
  for (int z : sm.vars.z_coupler) t0[z] = 1.0;
  SolveResult res = solve_fixed_lp(sm.model, t0);
  REQUIRE(res.status == SolveStatus::Optimal);
  for (const auto& st : sm.vars.states) {
    for (int i = 0; i < net.num_substations(); ++i) {
      if (st.p_cp[i] >= 0) {
        CHECK(std::abs(res.x[st.p_cp[i]]) < 1e-6);
        CHECK(std::abs(res.x[st.q_cp[i]]) < 1e-6);
      }
    }
  }
}

TEST_CASE("busbar outage sheds exactly the load pinned to it") {
  Network net = two_sub_gen_load();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);

  // Pin load D1 (index 0) to busbar 2 of substation B; leave the rest on B1.
  std::vector<double> fixed(sm.model.num_vars(), 0.0);
  for (int z : sm.vars.z_coupler) fixed[z] = 1.0;
  fixed[sm.vars.z_load[0]] = 1.0;
  SolveResult res = solve_fixed_lp(sm.model, fixed);
  REQUIRE(res.status == SolveStatus::Optimal);

  SolutionBundle b = extract_bundle(net, cs, oc, sm, res);
  const int cb2 = cs.find("busbar:B:b2");
  REQUIRE(cb2 >= 0);
  const StateShedding* target = nullptr;
  for (const auto& s : b.states)
    if (s.contingency_id == "busbar:B:b2") target = &s;
  REQUIRE(target != nullptr);
  CHECK(target->shed_by_load[0] ==
        doctest::Approx(net.loads[0].p_demand).epsilon(1e-7));
  CHECK(target->shed_by_load[1] == doctest::Approx(0.0).epsilon(1e-7));

  // And the B1 outage loses the other load instead.
  for (const auto& s : b.states) {
    if (s.contingency_id == "busbar:B:b1") {
      CHECK(s.shed_by_load[1] ==
            doctest::Approx(net.loads[1].p_demand).epsilon(1e-7));
    }
  }
}

TEST_CASE("probabilistic weighting is monotone in the busbar probability") {
  Network net = triangle();
  ModelConfig mc;
  ObjectiveConfig oc;
  oc.mode = ObjectiveMode::Probabilistic;
  double prev_inc = -kInf;
  double prev_bound = -kInf;
  for (double pb : {0.0, 0.1, 1.0}) {
    KindProbabilities kp;
    kp.busbar = pb;
    ContingencySet cs = build_contingency_set(net, false, kp);
    OrgResult org = solve_org_mip(net, cs, mc, oc, tight());
    REQUIRE(org.bundle.status == SolveStatus::Optimal);
    // True optima are non-decreasing; compare bound against incumbent.
    CHECK(prev_bound <= org.bundle.objective + 1e-6);
    prev_bound = org.bundle.best_bound;
    prev_inc = org.bundle.objective;
  }
  (void)prev_inc;
}

TEST_CASE("fixed-cost cap tightens with alpha and caps exactly at zero") {
  Network net = triangle();
  // Free reserves keep the zero-headroom cap attainable; the market dispatch
  // comes from the line-contingency SC-OPF so the budget covers losses.
  for (auto& g : net.generators) {
    g.cost_up = 0.0;
    g.cost_down = 0.0;
  }
  ModelConfig mc;
  {
    Linearization lin0 = prepare_linearization(net, mc);
    DispatchSolution market =
        scopf_dispatch(net, mc, lin0, initial_topology(net));
    for (size_t g = 0; g < net.generators.size(); ++g)
      net.generators[g].p_market = market.p0[g];
  }
  ContingencySet cs = build_contingency_set(net, false);
  double prev_inc = kInf;
  double prev_bound = kInf;
  for (double alpha : {0.0, 0.05, 0.5}) {
    ObjectiveConfig oc;
    oc.mode = ObjectiveMode::FixedCostCap;
    oc.alpha = alpha;
    OrgResult org = solve_org_mip(net, cs, mc, oc, tight());
    REQUIRE(org.bundle.status == SolveStatus::Optimal);
    // Larger alpha relaxes the cap: shedding cannot increase.
    CHECK(org.bundle.best_bound <= prev_inc + 1e-6);
    prev_inc = org.bundle.objective;
    prev_bound = org.bundle.best_bound;
    // The cap itself holds.
    const double gen_cost = org.bundle.redispatch_cost + org.bundle.reserve_cost +
                            [&] {
                              double mk = 0.0;
                              for (const auto& g : net.generators)
                                mk += net.base_mva * g.cost * g.p_market;
                              return mk;
                            }();
    double cap = 0.0;
    for (const auto& g : net.generators)
      cap += net.base_mva * g.cost * g.p_market;
    CHECK(gen_cost <= (1.0 + alpha) * cap + 1e-5);
  }
  (void)prev_bound;
}

TEST_CASE("alpha below zero is rejected and missing market dispatch errors") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  Linearization lin = prepare_linearization(net, mc);
  CHECK_THROWS(fixed_cost_model(net, cs, mc, -0.1, lin));
  net.has_market_dispatch = false;
  ObjectiveConfig oc;
  oc.mode = ObjectiveMode::FixedDispatch;
  CHECK_THROWS(build_scsr(net, cs, mc, oc, lin));
}

TEST_CASE("symmetry break preserves the optimal objective") {
  Network net = two_sub_gen_load();
  ContingencySet cs = build_contingency_set(net, false);
  ObjectiveConfig oc;
  ModelConfig with;
  with.symmetry_break = true;
  ModelConfig without;
  without.symmetry_break = false;
  SolutionBundle a = brute_force_oracle(net, cs, with, oc);
  SolutionBundle b = brute_force_oracle(net, cs, without, oc);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.objective ==
        doctest::Approx(b.objective).epsilon(1e-6).scale(1.0 + a.objective));
}

TEST_CASE("oracle refuses oversized enumerations") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  CHECK_THROWS(brute_force_oracle(net, cs, mc, oc, 3));
}

TEST_CASE("deterministic build: identical models from identical inputs") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  Linearization lin = prepare_linearization(net, mc);
  ScsrModel a = build_scsr(net, cs, mc, oc, lin);
  ScsrModel b = build_scsr(net, cs, mc, oc, lin);
  REQUIRE(a.model.num_vars() == b.model.num_vars());
  REQUIRE(a.model.num_rows() == b.model.num_rows());
  for (int r = 0; r < a.model.num_rows(); ++r) {
    const auto& ra = a.model.row(r);
    const auto& rb = b.model.row(r);
    CHECK(ra.name == rb.name);
    CHECK(ra.rhs == rb.rhs);
    REQUIRE(ra.terms.size() == rb.terms.size());
    for (size_t k = 0; k < ra.terms.size(); ++k) {
      CHECK(ra.terms[k].var == rb.terms[k].var);
      CHECK(ra.terms[k].coef == rb.terms[k].coef);
    }
  }
}
