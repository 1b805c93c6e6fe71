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
#include <numbers>
#include <random>

#include "scsr/pf_linear.hpp"

using namespace scsr;

namespace {

Network two_sub_net(double demand_mw) {
  Network net;
  net.base_mva = 100.0;
  net.substations = {{"A", 1.5, 0.81, 1.21}, {"B", 1.5, 0.81, 1.21}};
  BranchRecord l;
  l.id = "L1";
  l.from = 0;
  l.to = 1;
  l.g_series = 0.0;
  l.b_series = -5.0;
  l.s_max = 1.0;
  net.branches = {l};
  GeneratorRecord g;
  g.id = "G1";
  g.substation = 0;
  g.p_max = 1.2;
  g.q_min = -0.5;
  g.q_max = 0.5;
  g.cost = 20.0;
  net.generators = {g};
  if (demand_mw > 0) {
    LoadRecord d;
    d.id = "D1";
    d.substation = 1;
    d.p_demand = demand_mw / net.base_mva;
    d.pf_tangent = 0.0;
    d.cost_shed = 10000.0;
    net.loads = {d};
  }
  net.finalize();
  return net;
}

}  // namespace

TEST_CASE("polygon geometry") {
  SUBCASE("square has inscribed radius cos(pi/4)") {
    CirclePolygon p = polygonize(4);
    CHECK(p.inscribed_radius() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    // Vertex of the square lies on the unit circle.
    CHECK(p.accepts(std::sqrt(0.5) - 1e-9, std::sqrt(0.5) - 1e-9));
    CHECK_FALSE(p.accepts(std::sqrt(0.5) + 1e-6, std::sqrt(0.5) + 1e-6));
  }
  SUBCASE("n=16 deficit is about 1.92 percent") {
    CirclePolygon p = polygonize(16);
    CHECK(1.0 - p.inscribed_radius() == doctest::Approx(0.0192).epsilon(0.01));
    CHECK_FALSE(p.accepts(0.99, 0.0));
    CHECK(p.accepts(0.97, 0.0));
  }
  SUBCASE("fewer than four segments rejected") {
    CHECK_THROWS(polygonize(3));
  }
}

TEST_CASE("polygon is conservative: accepted points satisfy the circle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.3, 1.3);
  for (int n : {4, 7, 16, 33}) {
    CirclePolygon p = polygonize(n);
    for (int t = 0; t < 20000; ++t) {
      const double x = U(rng), y = U(rng);
      if (p.accepts(x, y)) CHECK(x * x + y * y <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("loss tangents") {
  BranchRecord b;
  b.g_series = 5.0;
  b.b_series = -20.0;
  OperatingPoint op;
  op.theta_end = {{0.0, 0.0}};
  op.v_end = {{1.0, 1.0}};

  SUBCASE("flat expansion point gives the zero function") {
    LossLinearization lin = loss_coefficients(b, op, 0);
    CHECK(lin.active[0].c0 == 0.0);
    CHECK(lin.active[0].c_dtheta == 0.0);
    CHECK(lin.active[0].value(0.3, 0.0) == 0.0);
  }

  SUBCASE("expansion at 0.1 rad reproduces g*dtheta^2") {
    op.theta_end = {{0.1, 0.0}};
    LossLinearization lin = loss_coefficients(b, op, 0);
    CHECK(lin.active[0].value(0.1, 0.0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(lin.reactive[0].value(0.1, 0.0) == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("tangent under-estimates the quadratic everywhere") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    op.theta_end = {{0.13, -0.02}};
    op.v_end = {{1.05, 0.98}};
    LossLinearization lin = loss_coefficients(b, op, 0);
    for (int t = 0; t < 2000; ++t) {
      const double dth = U(rng), dv = U(rng) * 0.4;
      const double quad = b.g_series * (dth * dth + 0.25 * dv * dv);
      CHECK(lin.active[0].value(dth, dv) <= quad + 1e-12);
    }
    // Non-negative at a physical expansion point.
    const double dth0 = 0.15, dv0 = 0.07;
    CHECK(lin.active[0].value(dth0, dv0) >= 0.0);
  }
}

TEST_CASE("lossless base solve") {
  SUBCASE("zero demand is the no-flow fixed point") {
    Network net = two_sub_net(0.0);
    DispatchSolution d{{0.0}, {0.0}, {0.0}};
    OperatingPoint op = lossless_base_solve(net, initial_topology(net), d);
    CHECK(op.theta_end[0][0] == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(op.theta_end[0][1] == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(op.v_end[0][0] == doctest::Approx(op.v_end[0][1]).epsilon(1e-7));
  }

  SUBCASE("single loaded line matches the closed-form angle difference") {
    Network net = two_sub_net(60.0);
    DispatchSolution d{{0.6}, {0.0}, {0.0}};
    OperatingPoint op = lossless_base_solve(net, initial_topology(net), d);
    const double dth = op.theta_end[0][0] - op.theta_end[0][1];
    CHECK(dth == doctest::Approx(0.6 / 5.0).epsilon(1e-6));
  }

  SUBCASE("unroutable dispatch reports infeasible") {
    Network net = two_sub_net(60.0);
    DispatchSolution d{{0.2}, {0.0}, {0.0}};  // supply < demand, no shedding
    CHECK_THROWS(lossless_base_solve(net, initial_topology(net), d));
  }

  SUBCASE("feasibility does not depend on the cost scale") {
    Network net = two_sub_net(60.0);
    OperatingPoint a = lossless_opf_point(net, initial_topology(net));
    for (auto& g : net.generators) g.cost *= 7.5;
    OperatingPoint b = lossless_opf_point(net, initial_topology(net));
    CHECK(a.theta_end[0][0] - a.theta_end[0][1] ==
          doctest::Approx(b.theta_end[0][0] - b.theta_end[0][1]).epsilon(1e-6));
  }
}

TEST_CASE("economic dispatch follows merit order") {
  Network net = two_sub_net(60.0);
  GeneratorRecord g2 = net.generators[0];
  g2.id = "G2";
  g2.cost = 5.0;
  g2.p_max = 0.4;
  net.generators.push_back(g2);
  net.finalize();
  DispatchSolution d = economic_dispatch(net);
  CHECK(d.p0[1] == doctest::Approx(0.4).epsilon(1e-6));  // cheap unit first
  CHECK(d.p0[0] == doctest::Approx(0.2).epsilon(1e-6));
}
