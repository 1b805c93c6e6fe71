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
// Deterministic synthetic case generator for scalability smoke tests: a ring
// of substations with chord lines, generation every few nodes and loads on
// most of the rest.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "scsr/grid.hpp"

using namespace scsr;

int main(int argc, char** argv) {
  CLI::App app{"synthetic case generator"};
  int buses = 118;
  std::uint64_t seed = 7;
  std::string out = "synthetic.case";
  app.add_option("--buses", buses, "substation count")->required(false);
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output path");
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  Network net;
  net.base_mva = 100.0;
  for (int i = 0; i < buses; ++i) {
    SubstationRecord s;
    s.id = "S" + std::to_string(i + 1);
    s.coupler_limit = 3.0;
    s.v_min = 0.81;
    s.v_max = 1.21;
    net.substations.push_back(s);
  }
  int lid = 0;
  auto add_line = [&](int f, int t, double smax) {
    BranchRecord b;
    char buf[16];
    std::snprintf(buf, sizeof buf, "L%03d", ++lid);
    b.id = buf;
    b.from = f;
    b.to = t;
    const double x = uni(0.08, 0.3);
    const double r = x * uni(0.15, 0.35);
    const double denom = r * r + x * x;
    b.g_series = r / denom;
    b.b_series = -x / denom;
    b.b_shunt = uni(0.005, 0.02);
    b.s_max = smax;
    net.branches.push_back(b);
  };
  for (int i = 0; i < buses; ++i) add_line(i, (i + 1) % buses, 1.6);
  for (int i = 0; i < buses; i += 2) add_line(i, (i + 7) % buses, 1.2);

  double total_cap = 0.0;
  for (int i = 0; i < buses; i += 6) {
    GeneratorRecord g;
    g.id = "G" + std::to_string(i + 1);
    g.substation = i;
    g.p_max = uni(1.5, 3.0);
    g.q_min = -0.8 * g.p_max;
    g.q_max = 0.8 * g.p_max;
    g.ramp_up = 0.5 * g.p_max;
    g.ramp_down = 0.5 * g.p_max;
    g.cost = uni(15.0, 60.0);
    g.cost_up = 0.1 * g.cost;
    g.cost_down = 0.05 * g.cost;
    net.generators.push_back(g);
    total_cap += g.p_max;
  }
  const double demand_target = 0.55 * total_cap;
  int loads = 0;
  for (int i = 0; i < buses; ++i) {
    if (i % 6 == 0) continue;  // generator nodes stay load-free
    if (i % 5 == 4) continue;  // and some substations are pure junctions
    ++loads;
    LoadRecord d;
    d.id = "D" + std::to_string(i + 1);
    d.substation = i;
    d.p_demand = 1.0;  // rescaled below
    d.pf_tangent = uni(0.1, 0.35);
    d.cost_shed = 10000.0;
    net.loads.push_back(d);
  }
  for (auto& d : net.loads) d.p_demand = demand_target / loads * uni(0.5, 1.5);
  net.reference = 0;
  net.finalize();

  std::ofstream f(out, std::ios::binary);
  f << serialize_case(net);
  if (!f.good()) {
    std::cerr << "cannot write " << out << "\n";
    return 1;
  }
  std::cout << "wrote " << out << ": " << buses << " substations, "
            << net.branches.size() << " branches, " << net.generators.size()
            << " generators, " << net.loads.size() << " loads\n";
  return 0;
}
