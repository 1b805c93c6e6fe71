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

#include "scsr/pf_linear.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "scsr/linear_model.hpp"
#include "scsr/solver.hpp"

namespace scsr {

namespace {

LossTangent tangent(double coupling, double dtheta0, double dv0) {
  LossTangent t;
  t.c_dtheta = 2.0 * coupling * dtheta0;
  t.c_dv = 0.5 * coupling * dv0;
  t.c0 = -coupling * (dtheta0 * dtheta0 + 0.25 * dv0 * dv0);
  return t;
}

}  // namespace

LossLinearization loss_coefficients(const BranchRecord& branch,
                                    const OperatingPoint& op, int branch_index) {
  LossLinearization lin;
  for (int e = 0; e < 2; ++e) {
    const int o = 1 - e;
    const double dth = op.theta_end[branch_index][e] - op.theta_end[branch_index][o];
    const double dv = op.v_end[branch_index][e] - op.v_end[branch_index][o];
    lin.active[e] = tangent(branch.g_series, dth, dv);
    lin.reactive[e] = tangent(-branch.b_series, dth, dv);
  }
  return lin;
}

LossLinearization zero_losses() { return {}; }

double CirclePolygon::inscribed_radius() const {
  return std::cos(std::numbers::pi / segments());
}

bool CirclePolygon::accepts(double p, double q, double s_max) const {
  for (const auto& h : cuts) {
    if (h.a * p + h.b * q > s_max) return false;
  }
  return true;
}

CirclePolygon polygonize(int n_segments) {
  if (n_segments < 4) throw std::invalid_argument("polygon needs >= 4 segments");
  CirclePolygon poly;
  poly.cuts.reserve(n_segments);
  const double inscribed = std::cos(std::numbers::pi / n_segments);
  for (int k = 0; k < n_segments; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / n_segments;
    poly.cuts.push_back({std::cos(phi) / inscribed, std::sin(phi) / inscribed});
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Lossless base solve: the topology is fixed, so busbars collapse to plain
// electric nodes and no binaries appear.

namespace {

struct LosslessSetup {
  bool fixed_dispatch = false;
  const DispatchSolution* dispatch = nullptr;
  bool with_shedding = false;
  int polygon_segments = 16;
};

OperatingPoint solve_lossless(const Network& net, const TopologyAssignment& topo,
                              const LosslessSetup& setup) {
  LinearModel m;
  const int ns = net.num_substations();
  const CirclePolygon poly = polygonize(setup.polygon_segments);

  // One node per live busbar: substations with a closed coupler are a single
  // node; split substations contribute two.
  std::vector<std::array<int, 2>> node(ns);  // busbar -> node id
  int num_nodes = 0;
  for (int i = 0; i < ns; ++i) {
    node[i][0] = num_nodes++;
    node[i][1] = topo.coupler_closed[i] ? node[i][0] : num_nodes++;
  }

  std::vector<int> th(num_nodes), vv(num_nodes);
  for (int i = 0; i < ns; ++i) {
    for (int b = 0; b < 2; ++b) {
      if (b == 1 && node[i][1] == node[i][0]) continue;
      const std::string tag = net.substations[i].id + (b ? ".b2" : ".b1");
      th[node[i][b]] = m.add_var("th." + tag, -kInf, kInf);
      vv[node[i][b]] = m.add_var("v." + tag, net.substations[i].v_min,
                                 net.substations[i].v_max);
    }
  }
  m.fix_var(th[node[net.reference][0]], 0.0);

  auto end_node = [&](int br, int e) {
    const int sub = net.branch_end_sub(br, e);
    return node[sub][topo.line_busbar[br][e]];
  };

  // Flow expressions per branch end, lossless.
  const int nb = static_cast<int>(net.branches.size());
  std::vector<std::array<LinExpr, 2>> pflow(nb), qflow(nb);
  for (int br = 0; br < nb; ++br) {
    const auto& bd = net.branches[br];
    for (int e = 0; e < 2; ++e) {
      const int ne = end_node(br, e), no = end_node(br, 1 - e);
      LinExpr p, q;
      p.add(vv[ne], bd.g_shunt + 0.5 * bd.g_series).add(vv[no], -0.5 * bd.g_series);
      p.add(th[ne], -bd.b_series).add(th[no], bd.b_series);
      q.add(vv[ne], -bd.b_shunt - 0.5 * bd.b_series).add(vv[no], 0.5 * bd.b_series);
      q.add(th[ne], -bd.g_series).add(th[no], bd.g_series);
      pflow[br][e] = p;
      qflow[br][e] = q;
      for (const auto& h : poly.cuts) {
        LinExpr cut;
        cut.add(p, h.a).add(q, h.b);
        m.add_row("smax." + bd.id + (e ? ".t" : ".f"), cut, Sense::Le, bd.s_max);
      }
    }
  }

  // Generators and loads.
  std::vector<int> pg(net.generators.size()), qg(net.generators.size());
  for (size_t g = 0; g < net.generators.size(); ++g) {
    const auto& gen = net.generators[g];
    if (setup.fixed_dispatch) {
      pg[g] = m.add_var("pg." + gen.id, setup.dispatch->p0[g], setup.dispatch->p0[g]);
    } else {
      pg[g] = m.add_var("pg." + gen.id, gen.p_min, gen.p_max);
      m.set_cost(pg[g], gen.cost * net.base_mva);
    }
    qg[g] = m.add_var("qg." + gen.id, gen.q_min, gen.q_max);
  }
  std::vector<int> shed(net.loads.size(), -1);
  if (setup.with_shedding) {
    for (size_t d = 0; d < net.loads.size(); ++d) {
      shed[d] = m.add_var("shed." + net.loads[d].id, 0.0, net.loads[d].p_demand);
      m.set_cost(shed[d], net.loads[d].cost_shed * net.base_mva);
    }
  }

  // Nodal balance.
  for (int i = 0; i < ns; ++i) {
    for (int b = 0; b < 2; ++b) {
      if (b == 1 && node[i][1] == node[i][0]) continue;
      LinExpr pbal, qbal;
      for (int g : net.gens_at[i]) {
        if (topo.gen_busbar[g] != b) continue;
        pbal.add(pg[g], 1.0);
        qbal.add(qg[g], 1.0);
      }
      for (int d : net.loads_at[i]) {
        if (topo.load_busbar[d] != b) continue;
        const auto& ld = net.loads[d];
        pbal += -ld.p_demand;
        qbal += -ld.pf_tangent * ld.p_demand;
        if (shed[d] >= 0) {
          pbal.add(shed[d], 1.0);
          qbal.add(shed[d], ld.pf_tangent);
        }
      }
      for (auto [br, e] : net.branch_ends_at[i]) {
        if (topo.line_busbar[br][e] != b) continue;
        pbal.add(pflow[br][e], -1.0);
        qbal.add(qflow[br][e], -1.0);
      }
      m.add_row("pbal." + net.substations[i].id + (b ? ".b2" : ".b1"), pbal,
                Sense::Eq, 0.0);
      m.add_row("qbal." + net.substations[i].id + (b ? ".b2" : ".b1"), qbal,
                Sense::Eq, 0.0);
    }
  }

  SolveResult res = solve_lp(m);
  if (res.status != SolveStatus::Optimal) {
    throw std::runtime_error("lossless base solve " +
                             std::string(to_string(res.status)) +
                             (res.message.empty() ? "" : ": " + res.message));
  }

  OperatingPoint op;
  op.theta_end.resize(nb);
  op.v_end.resize(nb);
  for (int br = 0; br < nb; ++br) {
    for (int e = 0; e < 2; ++e) {
      op.theta_end[br][e] = res.x[th[end_node(br, e)]];
      op.v_end[br][e] = res.x[vv[end_node(br, e)]];
    }
  }
  return op;
}

}  // namespace

OperatingPoint lossless_base_solve(const Network& net,
                                   const TopologyAssignment& topo,
                                   const DispatchSolution& dispatch,
                                   int polygon_segments) {
  LosslessSetup s;
  s.fixed_dispatch = true;
  s.dispatch = &dispatch;
  s.polygon_segments = polygon_segments;
  return solve_lossless(net, topo, s);
}

OperatingPoint lossless_opf_point(const Network& net, const TopologyAssignment& topo,
                                  int polygon_segments) {
  LosslessSetup s;
  s.with_shedding = true;
  s.polygon_segments = polygon_segments;
  return solve_lossless(net, topo, s);
}

DispatchSolution economic_dispatch(const Network& net) {
  LinearModel m;
  const int ng = static_cast<int>(net.generators.size());
  LinExpr total;
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    const int v = m.add_var("p0." + gen.id, gen.p_min, gen.p_max);
    m.set_cost(v, gen.cost * net.base_mva);
    total.add(v, 1.0);
  }
  m.add_row("balance", total, Sense::Ge, net.total_demand());
  SolveResult res = solve_lp(m);
  if (res.status != SolveStatus::Optimal) {
    throw std::runtime_error("economic dispatch infeasible: demand exceeds capacity");
  }
  DispatchSolution d;
  d.p0 = res.x;
  d.r_up.assign(ng, 0.0);
  d.r_down.assign(ng, 0.0);
  return d;
}

}  // namespace scsr
