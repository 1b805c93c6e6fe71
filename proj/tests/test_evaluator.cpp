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

#include "scsr/evaluator.hpp"
#include "scsr/hmmp.hpp"
#include "test_nets.hpp"

using namespace scsr;
using namespace scsr::testnets;

TEST_CASE("zero-shedding bundle reports no active contingencies") {
  Network net = self_sufficient_pair();
  ModelConfig mc;
  mc.dead_busbar_rules = false;
  ContingencySet cs = build_contingency_set(net, false);
  HmmpResult r = run_hmmp(net, cs, mc, {}, {});
  REQUIRE(r.bundle.status == SolveStatus::Optimal);
  MetricsReport rep = evaluate_solution(net, r.bundle, cs, mc);
  CHECK(rep.active_contingencies == 0);
  CHECK(rep.avg_ens_pct == doctest::Approx(0.0));
  CHECK(rep.infeasible_contingencies.empty());
}

TEST_CASE("evaluation totals match the solver's own breakdown") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  HmmpResult r = run_hmmp(net, cs, mc, {}, {});
  REQUIRE(std::isfinite(r.ub));
  MetricsReport rep = evaluate_solution(net, r.bundle, cs, mc);
  CHECK(rep.objective ==
        doctest::Approx(r.bundle.objective)
            .epsilon(1e-6)
            .scale(1.0 + std::abs(r.bundle.objective)));
}

TEST_CASE("evaluator is algorithm-agnostic") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  // Same (z, x) presented under two different method labels.
  SolutionBundle a = brute_force_oracle(net, cs, mc, oc);
  SolutionBundle b = a;
  b.method = "someone-else";
  b.states.clear();  // stored states must not matter
  MetricsReport ra = evaluate_solution(net, a, cs, mc);
  MetricsReport rb = evaluate_solution(net, b, cs, mc);
  CHECK(ra.objective == doctest::Approx(rb.objective));
  CHECK(ra.avg_shed_mw == doctest::Approx(rb.avg_shed_mw));
  CHECK(ra.active_contingencies == rb.active_contingencies);
}

TEST_CASE("forced busbar shedding shows up with exact ENS accounting") {
  Network net = two_sub_gen_load();
  ContingencySet cs = build_contingency_set(net, false);
  ModelConfig mc;
  ObjectiveConfig oc;
  Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);
  TopologyAssignment topo = initial_topology(net);
  topo.load_busbar[0] = 1;  // D1 pinned to B2
  SolveResult res = solve_restriction(sm, topo);
  REQUIRE(res.status == SolveStatus::Optimal);
  SolutionBundle bundle = extract_bundle(net, cs, oc, sm, res);

  MetricsReport rep = evaluate_solution(net, bundle, cs, mc);
  // The B:b2 outage sheds exactly D1.
  const double d1_mw = net.loads[0].p_demand * net.base_mva;
  bool found = false;
  for (const auto& st : bundle.states) {
    if (st.contingency_id == "busbar:B:b2") {
      found = true;
      CHECK(st.total_shed() * net.base_mva == doctest::Approx(d1_mw).epsilon(1e-6));
    }
  }
  CHECK(found);
  CHECK(rep.active_contingencies >= 1);
}

TEST_CASE("kumaraswamy sampler: marginals, correlation, determinism") {
  Network net = triangle();
  // Give the sampler a few more loads to correlate.
  LoadRecord extra = net.loads[0];
  extra.id = "D2";
  extra.substation = 1;
  net.loads.push_back(extra);
  extra.id = "D3";
  extra.substation = 0;
  net.loads.push_back(extra);
  net.finalize();

  const int n = 10000;
  auto sc = sample_loads(net, 1.6, 2.8, 0.75, n, 42);
  REQUIRE(static_cast<int>(sc.size()) == n);

  SUBCASE("sample mean matches the analytic mean within one percent") {
    const double want = kumaraswamy_mean(1.6, 2.8);
    for (size_t d = 0; d < net.loads.size(); ++d) {
      double m = 0.0;
      for (const auto& s : sc) m += s.factors[d];
      m /= n;
      CHECK(std::abs(m - want) / want < 0.01);
    }
  }

  SUBCASE("pairwise Pearson correlation lands in [0.70, 0.80]") {
    for (size_t a = 0; a < net.loads.size(); ++a) {
      for (size_t b = a + 1; b < net.loads.size(); ++b) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (const auto& s : sc) {
          sx += s.factors[a];
          sy += s.factors[b];
          sxx += s.factors[a] * s.factors[a];
          syy += s.factors[b] * s.factors[b];
          sxy += s.factors[a] * s.factors[b];
        }
        const double cov = sxy / n - (sx / n) * (sy / n);
        const double vx = sxx / n - (sx / n) * (sx / n);
        const double vy = syy / n - (sy / n) * (sy / n);
        const double rho = cov / std::sqrt(vx * vy);
        CHECK(rho > 0.70);
        CHECK(rho < 0.80);
      }
    }
  }

  SUBCASE("same seed reproduces the scenarios exactly") {
    auto sc2 = sample_loads(net, 1.6, 2.8, 0.75, 16, 42);
    for (int k = 0; k < 16; ++k) {
      for (size_t d = 0; d < net.loads.size(); ++d) {
        CHECK(sc2[k].factors[d] == sc[k].factors[d]);
      }
    }
  }

  SUBCASE("factors stay inside the unit interval") {
    for (const auto& s : sc) {
      for (double f : s.factors) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
      }
    }
  }
}

TEST_CASE("line-removal study: proposed never loses and radial is rejected") {
  Network net = triangle();
  auto scenarios = sample_loads(net, 1.6, 2.8, 0.75, 3, 7);
  std::vector<int> removals = {0, 1, 2};
  ModelConfig mc;
  StudyOptions so;
  StudyReport rep = study_line_removal(net, scenarios, removals, mc, so);
  REQUIRE(rep.samples.size() == 3);
  for (const auto& s : rep.samples) {
    CHECK(s.proposed_objective <= s.baseline_objective + 1e-6);
  }

  // Radial removals are refused.
  Network spur = net;
  SubstationRecord s4{"S4", 1.2, 0.81, 1.21};
  spur.substations.push_back(s4);
  BranchRecord l4 = spur.branches[0];
  l4.id = "L4";
  l4.from = 2;
  l4.to = 3;
  spur.branches.push_back(l4);
  spur.finalize();
  auto sc2 = sample_loads(spur, 1.6, 2.8, 0.75, 1, 7);
  CHECK_THROWS(study_line_removal(spur, sc2, {3}, mc, so));
}

TEST_CASE("day-ahead with a flat profile gives identical rows") {
  Network net = triangle();
  std::vector<double> flat(24, 1.0);
  ModelConfig mc;
  ScheduleReport rep = study_day_ahead(net, flat, mc, {});
  REQUIRE(rep.hours.size() == 24);
  for (const auto& h : rep.hours) {
    CHECK(h.fixed_mean_shed_mw ==
          doctest::Approx(rep.hours[0].fixed_mean_shed_mw).epsilon(1e-6));
    CHECK(h.hourly_mean_shed_mw ==
          doctest::Approx(rep.hours[0].hourly_mean_shed_mw).epsilon(1e-6));
  }
  CHECK_THROWS(study_day_ahead(net, std::vector<double>(23, 1.0), mc, {}));
}
