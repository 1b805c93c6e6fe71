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
#include <random>

#include "scsr/linear_model.hpp"
#include "scsr/solver.hpp"

using namespace scsr;

TEST_CASE("one-variable LP with dual") {
  LinearModel m;
  int x = m.add_var("x", -kInf, kInf);
  m.set_cost(x, 1.0);
  int r = m.add_row("floor", LinExpr::term(x), Sense::Ge, 3.0);
  SolveResult s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(s.x[x] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(s.row_duals[r] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible bound pair") {
  LinearModel m;
  int x = m.add_var("x", -kInf, kInf);
  m.set_cost(x, 1.0);
  m.add_row("hi", LinExpr::term(x), Sense::Le, 0.0);
  m.add_row("lo", LinExpr::term(x), Sense::Ge, 1.0);
  CHECK(solve_lp(m).status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded direction") {
  LinearModel m;
  int x = m.add_var("x", -kInf, kInf);
  m.set_cost(x, -1.0);
  CHECK(solve_lp(m).status == SolveStatus::Unbounded);
}

TEST_CASE("two-variable LP, equality and inequality mix") {
  // min 2a + 3b  s.t. a + b = 10, a <= 4  ->  a=4 b=6, obj 26
  LinearModel m;
  int a = m.add_var("a", 0.0, kInf);
  int b = m.add_var("b", 0.0, kInf);
  m.set_cost(a, 2.0);
  m.set_cost(b, 3.0);
  int eq = m.add_row("sum", LinExpr::term(a).add(b, 1.0), Sense::Eq, 10.0);
  m.add_row("cap", LinExpr::term(a), Sense::Le, 4.0);
  SolveResult s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(26.0).epsilon(1e-6));
  CHECK(s.x[a] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(s.row_duals[eq] == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("complementary slackness on random dense-ish LPs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    LinearModel m;
    const int n = 6, k = 8;
    for (int j = 0; j < n; ++j) m.add_var("x" + std::to_string(j), 0.0, 2.0);
    for (int j = 0; j < n; ++j) m.set_cost(j, U(rng) + 1.5);
    for (int i = 0; i < k; ++i) {
      LinExpr e;
      for (int j = 0; j < n; ++j) e.add(j, U(rng));
      m.add_row("r" + std::to_string(i), e, i % 2 ? Sense::Ge : Sense::Le,
                i % 2 ? -1.0 : 1.0);
    }
    SolveResult s = solve_lp(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    for (int i = 0; i < m.num_rows(); ++i) {
      const double slack = m.row(i).rhs - m.row_activity(i, s.x);
      CHECK(std::abs(slack * s.row_duals[i]) < 1e-5);
      if (m.row(i).sense == Sense::Le) CHECK(s.row_duals[i] < 1e-7);
      if (m.row(i).sense == Sense::Ge) CHECK(s.row_duals[i] > -1e-7);
    }
  }
}

TEST_CASE("binary rounding forced") {
  LinearModel m;
  int x = m.add_binary("x");
  m.set_cost(x, 1.0);
  m.add_row("half", LinExpr::term(x), Sense::Ge, 0.5);
  SolveResult s = solve_milp(m, 1e-9, 10.0);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.x[x] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("knapsack against exhaustive enumeration") {
  // max 4a + 5b + 3c s.t. 2a + 3b + c <= 4  ==  min of the negation
  const double value[3] = {4.0, 5.0, 3.0};
  const double weight[3] = {2.0, 3.0, 1.0};
  double best = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double w = 0.0, v = 0.0;
    for (int j = 0; j < 3; ++j)
      if (mask & (1 << j)) {
        w += weight[j];
        v += value[j];
      }
    if (w <= 4.0) best = std::max(best, v);
  }

  LinearModel m;
  LinExpr wsum, vsum;
  for (int j = 0; j < 3; ++j) {
    int x = m.add_binary("x" + std::to_string(j));
    m.set_cost(x, -value[j]);
    wsum.add(x, weight[j]);
  }
  m.add_row("cap", wsum, Sense::Le, 4.0);
  SolveResult s = solve_milp(m, 1e-9, 10.0);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(-s.objective == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("milp gap contract") {
  // A small set-cover-ish model solved to a 1% gap reports gap <= 1%.
  LinearModel m;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(1.0, 3.0);
  const int n = 14;
  LinExpr cover;
  for (int j = 0; j < n; ++j) {
    int x = m.add_binary("x" + std::to_string(j));
    m.set_cost(x, U(rng));
    cover.add(x, 1.0 + (j % 3));
  }
  m.add_row("cover", cover, Sense::Ge, 9.0);
  SolveResult s = solve_milp(m, 0.01, 30.0);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.gap() <= 0.01 + 1e-9);
  CHECK(s.objective >= s.best_bound - 1e-9);
}

TEST_CASE("fixing binaries at the incumbent reproduces the objective") {
  LinearModel m;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  const int n = 6;
  LinExpr bal;
  for (int j = 0; j < n; ++j) {
    int x = m.add_binary("b" + std::to_string(j));
    m.set_cost(x, U(rng));
    bal.add(x, 1.0);
  }
  int y = m.add_var("y", 0.0, 5.0);
  m.set_cost(y, 0.1);
  bal.add(y, 1.0);
  m.add_row("bal", bal, Sense::Ge, 3.7);
  SolveResult s = solve_milp(m, 1e-9, 10.0);
  REQUIRE(s.status == SolveStatus::Optimal);
  SolveResult fixed = solve_fixed_lp(m, s.x);
  REQUIRE(fixed.status == SolveStatus::Optimal);
  CHECK(fixed.objective == doctest::Approx(s.objective).epsilon(1e-6));
}

TEST_CASE("deterministic modeling produces identical results") {
  auto build = [] {
    LinearModel m;
    for (int j = 0; j < 5; ++j) m.add_var("v" + std::to_string(j), 0.0, 3.0);
    for (int j = 0; j < 5; ++j) m.set_cost(j, 1.0 + j);
    LinExpr e;
    for (int j = 0; j < 5; ++j) e.add(j, j % 2 ? -1.0 : 2.0);
    m.add_row("r", e, Sense::Ge, 1.0);
    return m;
  };
  SolveResult a = solve_lp(build());
  SolveResult b = solve_lp(build());
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.objective == b.objective);  // bitwise equal paths
  for (size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
}
