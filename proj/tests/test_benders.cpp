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

#include "scsr/benders.hpp"
#include "test_nets.hpp"

using namespace scsr;
using namespace scsr::testnets;

namespace {

struct Fixture {
  Network net;
  ContingencySet cs;
  ModelConfig mc;
  ObjectiveConfig oc;
  Linearization lin;

  explicit Fixture(Network n) : net(std::move(n)) {
    cs = build_contingency_set(net, false);
    lin = prepare_linearization(net, mc);
  }
};

}  // namespace

TEST_CASE("fsp is zero when the survivor line can carry everything") {
  Fixture f(two_parallel_lines(150.0, 100.0));
  TopologyAssignment t0 = initial_topology(f.net);
  DispatchSolution d{{1.02}, {0.1}, {0.1}};
  for (int ci : f.cs.lines()) {
    SubproblemResult r = solve_fsp(f.net, f.cs, f.mc, f.lin, ci, t0, d);
    CHECK(r.objective < 1e-6);
  }
}

TEST_CASE("fsp prices the overload when one parallel line is too small") {
  Fixture f(two_parallel_lines(70.0, 100.0));
  TopologyAssignment t0 = initial_topology(f.net);
  DispatchSolution d{{1.02}, {0.1}, {0.1}};
  const int ci = f.cs.lines()[0];
  SubproblemResult r = solve_fsp(f.net, f.cs, f.mc, f.lin, ci, t0, d);
  CHECK(r.objective > 0.1);  // more than 10 MW of balance slack
}

TEST_CASE("osp values and duals") {
  Fixture f(two_sub_gen_load());
  TopologyAssignment t0 = initial_topology(f.net);
  DispatchSolution d{{0.8}, {0.2}, {0.8}};

  SUBCASE("no overload means zero shedding and zero topology duals") {
    const int ci = f.cs.find("coupler:A");
    REQUIRE(ci >= 0);
    SubproblemResult r =
        solve_osp(f.net, f.cs, f.mc, f.oc, f.lin, ci, t0, d);
    CHECK(r.objective < 1e-3);
    for (double mu : r.mu_coupler) CHECK(std::abs(mu) < 1e-4);
  }

  SUBCASE("busbar outage prices the isolated load at its shed cost") {
    // Pin load D1 to busbar 2 of B; the B:b2 outage then loses exactly D1.
    TopologyAssignment t = t0;
    t.load_busbar[0] = 1;
    const int ci = f.cs.find("busbar:B:b2");
    REQUIRE(ci >= 0);
    SubproblemResult r = solve_osp(f.net, f.cs, f.mc, f.oc, f.lin, ci, t, d);
    const double expected =
        f.net.loads[0].p_demand * f.net.loads[0].cost_shed * f.net.base_mva;
    CHECK(r.objective == doctest::Approx(expected).epsilon(1e-6));
    CHECK(r.shed_by_load[0] ==
          doctest::Approx(f.net.loads[0].p_demand).epsilon(1e-6));
  }

  SUBCASE("coupler outage with balanced busbars sheds nothing") {
    // Loads split across busbars, two lines feeding both: opening the
    // coupler leaves each busbar fed by its own line.
    TopologyAssignment t = t0;
    t.load_busbar[1] = 1;    // D2 to b2 of B
    t.line_busbar[1][1] = 1; // L2's B end to b2
    const int ci = f.cs.find("coupler:B");
    REQUIRE(ci >= 0);
    SubproblemResult r = solve_osp(f.net, f.cs, f.mc, f.oc, f.lin, ci, t, d);
    CHECK(r.objective < 1e-3);
  }
}

TEST_CASE("cut anchoring identity and structure") {
  Fixture f(two_sub_gen_load());
  TopologyAssignment t0 = initial_topology(f.net);
  t0.load_busbar[0] = 1;
  DispatchSolution d{{0.8}, {0.2}, {0.8}};
  const int ci = f.cs.find("busbar:B:b2");
  SubproblemResult r = solve_osp(f.net, f.cs, f.mc, f.oc, f.lin, ci, t0, d);

  SUBCASE("evaluating at the anchor reproduces the subproblem value") {
    for (CutKind kind : {CutKind::OptimalityOriginal, CutKind::OptimalityHeuristic,
                         CutKind::OptimalityDispatch}) {
      Cut cut = make_cut(f.net, f.cs, r, kind, t0, d);
      // lhs(anchor) <= psi + rhs  with equality at psi = objective
      CHECK(cut.lhs_at(t0, d) - cut.rhs ==
            doctest::Approx(r.objective).epsilon(1e-6).scale(1.0 + r.objective));
    }
  }

  SUBCASE("heuristic cut only references the contingency's substation") {
    Cut cut = make_cut(f.net, f.cs, r, CutKind::OptimalityHeuristic, t0, d);
    const int home = f.cs[ci].target;
    for (auto [i, mu] : cut.coupler_terms) CHECK(i == home);
    for (auto& [be, mu] : cut.line_terms)
      CHECK(f.net.branch_end_sub(be[0], be[1]) == home);
    for (auto [g, mu] : cut.gen_terms)
      CHECK(f.net.generators[g].substation == home);
    for (auto [dd, mu] : cut.load_terms)
      CHECK(f.net.loads[dd].substation == home);
  }

  SUBCASE("dispatch cut carries no topology terms") {
    Cut cut = make_cut(f.net, f.cs, r, CutKind::OptimalityDispatch, t0, d);
    CHECK(cut.coupler_terms.empty());
    CHECK(cut.line_terms.empty());
    CHECK(cut.gen_terms.empty());
    CHECK(cut.load_terms.empty());
  }

  SUBCASE("zero duals reduce the cut to its anchor value") {
    SubproblemResult z = r;
    z.mu_coupler.assign(z.mu_coupler.size(), 0.0);
    z.mu_line.assign(z.mu_line.size(), {0.0, 0.0});
    z.mu_gen.assign(z.mu_gen.size(), 0.0);
    z.mu_load.assign(z.mu_load.size(), 0.0);
    z.lambda_p0.assign(z.lambda_p0.size(), 0.0);
    z.lambda_r_up.assign(z.lambda_r_up.size(), 0.0);
    z.lambda_r_down.assign(z.lambda_r_down.size(), 0.0);
    Cut cut = make_cut(f.net, f.cs, z, CutKind::OptimalityOriginal, t0, d);
    CHECK(cut.lhs_at(t0, d) == 0.0);
    CHECK(cut.rhs == doctest::Approx(-z.objective));
  }
}

TEST_CASE("uncongested case converges in one iteration without cuts") {
  // Every substation serves its own load from its own unit at capacity, so
  // line flows are zero and no contingency sheds. Paper-literal busbar
  // semantics (no forced element loss) keep the outage states costless.
  Network net = self_sufficient_pair();

  ModelConfig mc;
  mc.dead_busbar_rules = false;
  ContingencySet cs = build_contingency_set(net, false);
  ObjectiveConfig oc;
  BdOptions opt;
  opt.variant = BdVariant::Conventional;
  BdResult r = run_bd(net, cs, mc, oc, opt);
  REQUIRE(r.bundle.status == SolveStatus::Optimal);
  CHECK(r.bundle.converged);
  CHECK(r.trace.rows.size() == 1);
  CHECK(r.cuts.empty());
  CHECK(r.ub == doctest::Approx(r.lb).epsilon(0.01));
}

TEST_CASE("bd-c bounds bracket the oracle on the triangle") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  SolutionBundle oracle = brute_force_oracle(net, cs, mc, oc);
  REQUIRE(oracle.status == SolveStatus::Optimal);

  BdOptions opt;
  opt.variant = BdVariant::Conventional;
  opt.max_iterations = 25;
  BdResult r = run_bd(net, cs, mc, oc, opt);
  REQUIRE(std::isfinite(r.ub));
  const double scale = std::max(1.0, std::abs(oracle.objective));
  CHECK(r.lb <= oracle.objective + 1e-5 * scale);
  CHECK(r.ub >= oracle.objective - 1e-5 * scale);

  // Bound monotonicity along the trace.
  for (size_t k = 1; k < r.trace.rows.size(); ++k) {
    CHECK(r.trace.rows[k].lb >= r.trace.rows[k - 1].lb);
    CHECK(r.trace.rows[k].best_ub <= r.trace.rows[k - 1].best_ub);
  }
}

TEST_CASE("bd-h also yields a valid incumbent, possibly suboptimal") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  SolutionBundle oracle = brute_force_oracle(net, cs, mc, oc);
  BdOptions opt;
  opt.variant = BdVariant::HeuristicCuts;
  opt.max_iterations = 25;
  BdResult r = run_bd(net, cs, mc, oc, opt);
  REQUIRE(std::isfinite(r.ub));
  // The incumbent is a true feasible value: never below the optimum.
  CHECK(r.ub >= oracle.objective - 1e-5 * std::max(1.0, oracle.objective));
  for (size_t k = 1; k < r.trace.rows.size(); ++k) {
    CHECK(r.trace.rows[k].lb >= r.trace.rows[k - 1].lb);
    CHECK(r.trace.rows[k].best_ub <= r.trace.rows[k - 1].best_ub);
  }
}

TEST_CASE("infeasible line contingency keeps the ub open and cuts accumulate") {
  Network net = two_parallel_lines(70.0, 100.0);
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  BdOptions opt;
  opt.max_iterations = 4;
  BdResult r = run_bd(net, cs, mc, oc, opt);
  CHECK_FALSE(r.bundle.converged);
  bool has_feas_cut = false;
  for (const auto& c : r.cuts) has_feas_cut |= c.kind == CutKind::Feasibility;
  CHECK(has_feas_cut);
}
