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

#include "scsr/scsr_model.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "lp_internal.hpp"
#include "scsr/parallel.hpp"

namespace scsr {

double ModelConfig::derived_big_m_v(const Network& net) const {
  if (big_m_v > 0.0) return big_m_v;
  double vmax = 0.0, vmin = kInf;
  for (const auto& s : net.substations) {
    vmax = std::max(vmax, s.v_max);
    vmin = std::min(vmin, s.v_min);
  }
  return vmax - vmin + 0.1;
}

bool state_allows_shedding(const Network& net, const Contingency& c) {
  switch (c.kind) {
    case ContingencyKind::Normal: return false;  // gated by allow_normal_shedding
    case ContingencyKind::Coupler:
    case ContingencyKind::BusbarOutage: return true;
    case ContingencyKind::Line: return net.branches[c.target].is_radial;
  }
  return false;
}

Linearization prepare_linearization(const Network& net, const ModelConfig& mc) {
  Linearization lin;
  lin.op = lossless_opf_point(net, initial_topology(net), mc.polygon_segments);
  lin.losses.reserve(net.branches.size());
  for (int br = 0; br < static_cast<int>(net.branches.size()); ++br)
    lin.losses.push_back(loss_coefficients(net.branches[br], lin.op, br));
  lin.polygon = polygonize(mc.polygon_segments);
  return lin;
}

namespace {

struct Ctx {
  const Network* net;
  const ContingencySet* cs;
  const ModelConfig* mc;
  const ObjectiveConfig* oc;
  const Linearization* lin;
  const BuildOptions* opts;
  double m_theta;
  double m_v;

  bool collapsed(int sub) const {
    return !opts->collapsed.empty() && opts->collapsed[sub];
  }
};

// Emits one contingency (or normal) state block.
void emit_state(Ctx& cx, LinearModel& m, ScsrVars& vars, int cont_index) {
  const Network& net = *cx.net;
  const Contingency& c = (*cx.cs)[cont_index];
  const bool is_normal = c.kind == ContingencyKind::Normal;
  const std::string sn = "[" + c.id + "]";

  ScsrVars::State st;
  st.cont = cont_index;
  st.weight = cx.oc->mode == ObjectiveMode::Probabilistic && !is_normal
                  ? c.probability
                  : 1.0;
  st.sheddable = is_normal ? cx.mc->allow_normal_shedding
                           : state_allows_shedding(net, c);

  const int ns = net.num_substations();
  const int nb = static_cast<int>(net.branches.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nd = static_cast<int>(net.loads.size());
  st.th_bus.assign(ns, {-1, -1});
  st.v_bus.assign(ns, {-1, -1});
  st.th_end.assign(nb, {-1, -1});
  st.v_end.assign(nb, {-1, -1});
  st.p_b1.assign(nb, {-1, -1});
  st.q_b1.assign(nb, {-1, -1});
  st.p_cp.assign(ns, -1);
  st.q_cp.assign(ns, -1);
  st.pg.assign(ng, {-1, -1});
  st.qg.assign(ng, {-1, -1});
  st.shed.assign(nd, {-1, -1});

  auto own_contingency = [&](int sub) {
    return (c.kind == ContingencyKind::Coupler ||
            c.kind == ContingencyKind::BusbarOutage) &&
           c.target == sub;
  };
  // The outage domain exclusions of the formulation itself.
  auto busbar_out = [&](int sub, int b) {
    return c.kind == ContingencyKind::BusbarOutage && c.target == sub &&
           static_cast<int>(c.busbar) == b;
  };
  // The stronger semantics: the outaged busbar takes its elements along.
  auto dead_busbar = [&](int sub, int b) {
    return cx.mc->dead_busbar_rules && busbar_out(sub, b);
  };
  auto line_out = [&](int br) { return c.is_outage_of_line(br); };

  if ((c.kind == ContingencyKind::Coupler ||
       c.kind == ContingencyKind::BusbarOutage) &&
      cx.collapsed(c.target)) {
    throw std::logic_error("contingency at a collapsed substation: " + c.id);
  }

  // Busbar voltage variables.
  for (int i = 0; i < ns; ++i) {
    const auto& sub = net.substations[i];
    const int th1 = m.add_var("th." + sub.id + ".b1" + sn, -kInf, kInf);
    const int v1 = m.add_var("v." + sub.id + ".b1" + sn, sub.v_min, sub.v_max);
    if (cx.collapsed(i)) {
      st.th_bus[i] = {th1, th1};
      st.v_bus[i] = {v1, v1};
    } else {
      const int th2 = m.add_var("th." + sub.id + ".b2" + sn, -kInf, kInf);
      const int v2 = m.add_var("v." + sub.id + ".b2" + sn, sub.v_min, sub.v_max);
      st.th_bus[i] = {th1, th2};
      st.v_bus[i] = {v1, v2};
    }
  }
  m.fix_var(st.th_bus[net.reference][0], 0.0);

  // Coupler block (2a)-(2d).
  for (int i = 0; i < ns; ++i) {
    if (cx.collapsed(i)) continue;
    const auto& sub = net.substations[i];
    const int zc = vars.z_coupler[i];
    if (own_contingency(i)) continue;  // (2d): no coupler flow variables
    st.p_cp[i] = m.add_var("pcp." + sub.id + sn, -sub.coupler_limit,
                           sub.coupler_limit);
    st.q_cp[i] = m.add_var("qcp." + sub.id + sn, -sub.coupler_limit,
                           sub.coupler_limit);
    // (2a)-(2b): equal angle/magnitude while the coupler is closed.
    LinExpr dth = LinExpr::term(st.th_bus[i][0]).add(st.th_bus[i][1], -1.0);
    LinExpr dv = LinExpr::term(st.v_bus[i][0]).add(st.v_bus[i][1], -1.0);
    LinExpr dth_hi = dth;
    dth_hi.add(zc, cx.m_theta);
    m.add_row("cpl.th.hi." + sub.id + sn, dth_hi, Sense::Le, cx.m_theta);
    LinExpr dth_lo = dth;
    dth_lo.add(zc, -cx.m_theta);
    m.add_row("cpl.th.lo." + sub.id + sn, dth_lo, Sense::Ge, -cx.m_theta);
    LinExpr dv_hi = dv;
    dv_hi.add(zc, cx.m_v);
    m.add_row("cpl.v.hi." + sub.id + sn, dv_hi, Sense::Le, cx.m_v);
    LinExpr dv_lo = dv;
    dv_lo.add(zc, -cx.m_v);
    m.add_row("cpl.v.lo." + sub.id + sn, dv_lo, Sense::Ge, -cx.m_v);
    // (2c): polygonized thermal limit scaled by the coupler binary.
    for (size_t k = 0; k < cx.lin->polygon.cuts.size(); ++k) {
      const auto& h = cx.lin->polygon.cuts[k];
      LinExpr cut;
      cut.add(st.p_cp[i], h.a).add(st.q_cp[i], h.b);
      cut.add(zc, -sub.coupler_limit);
      m.add_row("cpl.smax." + sub.id + "." + std::to_string(k) + sn, cut,
                Sense::Le, 0.0);
    }
  }

  // Line-end variables, flow expressions, assignment big-Ms (3a)-(3l).
  // Losses enter as nonnegative variables floored by the tangent plane: the
  // plain affine term would turn negative in low-flow states and act as a
  // phantom source, leaving oversupplied post-contingency states infeasible.
  std::vector<std::array<LinExpr, 2>> pflow(nb), qflow(nb);
  for (int br = 0; br < nb; ++br) {
    if (line_out(br)) continue;
    const auto& bd = net.branches[br];
    for (int e = 0; e < 2; ++e) {
      const int sub = net.branch_end_sub(br, e);
      const std::string tag = bd.id + (e ? ".t" : ".f") + sn;
      if (cx.collapsed(sub)) {
        st.th_end[br][e] = st.th_bus[sub][0];
        st.v_end[br][e] = st.v_bus[sub][0];
      } else {
        st.th_end[br][e] = m.add_var("the." + tag, -kInf, kInf);
        st.v_end[br][e] = m.add_var("ve." + tag, net.substations[sub].v_min,
                                    net.substations[sub].v_max);
      }
    }
    for (int e = 0; e < 2; ++e) {
      const int o = 1 - e;
      const double sh_g = bd.g_shunt, sh_b = bd.b_shunt;
      const LossTangent& pl = cx.lin->losses[br].active[e];
      const LossTangent& ql = cx.lin->losses[br].reactive[e];
      const std::string tag = bd.id + (e ? ".t" : ".f") + sn;
      LinExpr p, q;
      p.add(st.v_end[br][e], sh_g + 0.5 * bd.g_series);
      p.add(st.v_end[br][o], -0.5 * bd.g_series);
      p.add(st.th_end[br][e], -bd.b_series);
      p.add(st.th_end[br][o], bd.b_series);
      q.add(st.v_end[br][e], -sh_b - 0.5 * bd.b_series);
      q.add(st.v_end[br][o], 0.5 * bd.b_series);
      q.add(st.th_end[br][e], -bd.g_series);
      q.add(st.th_end[br][o], bd.g_series);
      if (bd.g_series != 0.0) {
        const int plv = m.add_var("pl." + tag, 0.0, kInf);
        LinExpr floor = LinExpr::term(plv);
        floor.add(st.th_end[br][e], -pl.c_dtheta).add(st.th_end[br][o], pl.c_dtheta);
        floor.add(st.v_end[br][e], -pl.c_dv).add(st.v_end[br][o], pl.c_dv);
        m.add_row("ploss." + tag, floor, Sense::Ge, pl.c0);
        p.add(plv, 1.0);
      }
      if (bd.b_series != 0.0) {
        const int qlv = m.add_var("ql." + tag, 0.0, kInf);
        LinExpr floor = LinExpr::term(qlv);
        floor.add(st.th_end[br][e], -ql.c_dtheta).add(st.th_end[br][o], ql.c_dtheta);
        floor.add(st.v_end[br][e], -ql.c_dv).add(st.v_end[br][o], ql.c_dv);
        m.add_row("qloss." + tag, floor, Sense::Ge, ql.c0);
        q.add(qlv, 1.0);
      }
      pflow[br][e] = p;
      qflow[br][e] = q;
    }
  }

  for (int i = 0; i < ns; ++i) {
    if (cx.collapsed(i)) continue;
    for (auto [br, e] : net.branch_ends_at[i]) {
      if (line_out(br)) continue;
      const auto& bd = net.branches[br];
      const int zl = vars.z_line[br][e];
      const std::string tag = bd.id + (e ? ".t" : ".f") + sn;
      // (3a)-(3b), (3e)-(3f): bind the line end to its busbar.
      for (int b = 0; b < 2; ++b) {
        if (busbar_out(i, b)) continue;  // released while the busbar is out
        const double zsign = b == 0 ? 1.0 : -1.0;  // (1-z) for b2
        const double base = b == 0 ? 0.0 : 1.0;
        // |th_end - th_bus| <= M * (b==0 ? z : 1-z)
        LinExpr dth = LinExpr::term(st.th_end[br][e]).add(st.th_bus[i][b], -1.0);
        LinExpr hi = dth;
        hi.add(zl, -zsign * cx.m_theta);
        m.add_row("lth.hi.b" + std::to_string(b + 1) + "." + tag, hi, Sense::Le,
                  base * cx.m_theta);
        LinExpr lo = dth;
        lo.add(zl, zsign * cx.m_theta);
        m.add_row("lth.lo.b" + std::to_string(b + 1) + "." + tag, lo, Sense::Ge,
                  -base * cx.m_theta);
        LinExpr dv = LinExpr::term(st.v_end[br][e]).add(st.v_bus[i][b], -1.0);
        LinExpr vhi = dv;
        vhi.add(zl, -zsign * cx.m_v);
        m.add_row("lv.hi.b" + std::to_string(b + 1) + "." + tag, vhi, Sense::Le,
                  base * cx.m_v);
        LinExpr vlo = dv;
        vlo.add(zl, zsign * cx.m_v);
        m.add_row("lv.lo.b" + std::to_string(b + 1) + "." + tag, vlo, Sense::Ge,
                  -base * cx.m_v);
      }
      // Busbar-1 share of the end flow; busbar-2 share is flow - share.
      st.p_b1[br][e] = m.add_var("pb1." + tag, -bd.s_max, bd.s_max);
      st.q_b1[br][e] = m.add_var("qb1." + tag, -bd.s_max, bd.s_max);
      const int pb = st.p_b1[br][e], qb = st.q_b1[br][e];
      // (3c)-(3d): |b1 share| <= (1-z) S
      LinExpr p1hi = LinExpr::term(pb).add(zl, bd.s_max);
      m.add_row("lp1.hi." + tag, p1hi, Sense::Le, bd.s_max);
      LinExpr p1lo = LinExpr::term(pb).add(zl, -bd.s_max);
      m.add_row("lp1.lo." + tag, p1lo, Sense::Ge, -bd.s_max);
      LinExpr q1hi = LinExpr::term(qb).add(zl, bd.s_max);
      m.add_row("lq1.hi." + tag, q1hi, Sense::Le, bd.s_max);
      LinExpr q1lo = LinExpr::term(qb).add(zl, -bd.s_max);
      m.add_row("lq1.lo." + tag, q1lo, Sense::Ge, -bd.s_max);
      // (3g)-(3h): |b2 share| <= z S
      LinExpr p2 = pflow[br][e];
      p2.add(pb, -1.0);
      LinExpr p2hi = p2;
      p2hi.add(zl, -bd.s_max);
      m.add_row("lp2.hi." + tag, p2hi, Sense::Le, 0.0);
      LinExpr p2lo = p2;
      p2lo.add(zl, bd.s_max);
      m.add_row("lp2.lo." + tag, p2lo, Sense::Ge, 0.0);
      LinExpr q2 = qflow[br][e];
      q2.add(qb, -1.0);
      LinExpr q2hi = q2;
      q2hi.add(zl, -bd.s_max);
      m.add_row("lq2.hi." + tag, q2hi, Sense::Le, 0.0);
      LinExpr q2lo = q2;
      q2lo.add(zl, bd.s_max);
      m.add_row("lq2.lo." + tag, q2lo, Sense::Ge, 0.0);
      // (3l): flows through an outaged busbar vanish.
      if (busbar_out(i, 0)) {
        m.set_bounds(pb, 0.0, 0.0);
        m.set_bounds(qb, 0.0, 0.0);
      }
      if (busbar_out(i, 1)) {
        m.add_row("ldead.p." + tag, p2, Sense::Eq, 0.0);
        m.add_row("ldead.q." + tag, q2, Sense::Eq, 0.0);
      }
    }
  }

  // (7e): polygonized line thermal limits on both end flows.
  for (int br = 0; br < nb; ++br) {
    if (line_out(br)) continue;
    const auto& bd = net.branches[br];
    for (int e = 0; e < 2; ++e) {
      for (size_t k = 0; k < cx.lin->polygon.cuts.size(); ++k) {
        const auto& h = cx.lin->polygon.cuts[k];
        LinExpr cut;
        cut.add(pflow[br][e], h.a).add(qflow[br][e], h.b);
        m.add_row("smax." + bd.id + (e ? ".t." : ".f.") + std::to_string(k) + sn,
                  cut, Sense::Le, bd.s_max);
      }
    }
  }

  // Generators (5a)-(5e) or the normal-state tie to the dispatch split.
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    const int sub = gen.substation;
    if (cx.collapsed(sub)) {
      const int pv = is_normal
                         ? -1
                         : m.add_var("pg." + gen.id + sn, gen.p_min, gen.p_max);
      const int qv = m.add_var("qg." + gen.id + sn, gen.q_min, gen.q_max);
      st.qg[g] = {qv, -1};
      if (is_normal) {
        // Normal output is the dispatch itself.
        st.pg[g] = {vars.p0_b[g][0], vars.p0_b[g][1]};
      } else {
        st.pg[g] = {pv, -1};
        LinExpr up = LinExpr::term(pv);
        up.add(vars.p0_b[g][0], -1.0).add(vars.p0_b[g][1], -1.0);
        LinExpr hi = up;
        hi.add(vars.r_up[g], -1.0);
        m.add_row("ramp.hi." + gen.id + sn, hi, Sense::Le, 0.0);
        LinExpr lo = up;
        lo.add(vars.r_down[g], 1.0);
        m.add_row("ramp.lo." + gen.id + sn, lo, Sense::Ge, 0.0);
      }
      continue;
    }
    const int zg = vars.z_gen[g];
    if (is_normal) {
      st.pg[g] = {vars.p0_b[g][0], vars.p0_b[g][1]};  // split rows live globally
      for (int b = 0; b < 2; ++b) {
        const int qv = m.add_var("qg." + gen.id + ".b" + std::to_string(b + 1) + sn,
                                 std::min(gen.q_min, 0.0), std::max(gen.q_max, 0.0));
        st.qg[g][b] = qv;
      }
    } else {
      for (int b = 0; b < 2; ++b) {
        st.pg[g][b] =
            m.add_var("pg." + gen.id + ".b" + std::to_string(b + 1) + sn,
                      std::min(gen.p_min, 0.0), std::max(gen.p_max, 0.0));
        st.qg[g][b] =
            m.add_var("qg." + gen.id + ".b" + std::to_string(b + 1) + sn,
                      std::min(gen.q_min, 0.0), std::max(gen.q_max, 0.0));
      }
    }
    for (int b = 0; b < 2; ++b) {
      const std::string tag =
          gen.id + ".b" + std::to_string(b + 1) + sn;
      const bool dead = dead_busbar(sub, b);
      if (dead) {
        // The busbar outage takes its generators out with it.
        m.set_bounds(st.pg[g][b], 0.0, 0.0);
        m.set_bounds(st.qg[g][b], 0.0, 0.0);
        continue;
      }
      // (5a)-(5d): output only on the assigned busbar. The normal-state P
      // rows are emitted once with the dispatch block, not here.
      const double sgn = b == 0 ? 1.0 : -1.0;  // b1 uses (1-z), b2 uses z
      const double off = b == 0 ? 1.0 : 0.0;
      if (!is_normal) {
        LinExpr phi = LinExpr::term(st.pg[g][b]).add(zg, sgn * gen.p_max);
        m.add_row("gp.hi." + tag, phi, Sense::Le, off * gen.p_max);
        LinExpr plo = LinExpr::term(st.pg[g][b]).add(zg, sgn * gen.p_min);
        m.add_row("gp.lo." + tag, plo, Sense::Ge, off * gen.p_min);
      }
      LinExpr qhi = LinExpr::term(st.qg[g][b]).add(zg, sgn * gen.q_max);
      m.add_row("gq.hi." + tag, qhi, Sense::Le, off * gen.q_max);
      LinExpr qlo = LinExpr::term(st.qg[g][b]).add(zg, sgn * gen.q_min);
      m.add_row("gq.lo." + tag, qlo, Sense::Ge, off * gen.q_min);
      if (!is_normal) {
        // (5e): stay within the purchased reserves around the dispatch.
        LinExpr dev = LinExpr::term(st.pg[g][b]).add(vars.p0_b[g][b], -1.0);
        LinExpr hi = dev;
        hi.add(vars.r_up[g], -1.0);
        m.add_row("ramp.hi." + tag, hi, Sense::Le, 0.0);
        LinExpr lo = dev;
        lo.add(vars.r_down[g], 1.0);
        m.add_row("ramp.lo." + tag, lo, Sense::Ge, 0.0);
      }
    }
  }

  // Loads (6a)-(6c) and optional shedding.
  auto load_part = [&](int d, int b) {  // P_{d,b} as an affine expression
    const auto& ld = net.loads[d];
    LinExpr e;
    if (cx.collapsed(ld.substation)) {
      if (b == 0) e += ld.p_demand;
      return e;
    }
    const int zd = vars.z_load[d];
    if (b == 0) {
      e += ld.p_demand;
      e.add(zd, -ld.p_demand);
    } else {
      e.add(zd, ld.p_demand);
    }
    return e;
  };
  if (st.sheddable) {
    for (int d = 0; d < nd; ++d) {
      const auto& ld = net.loads[d];
      const int sub = ld.substation;
      const int nbus = cx.collapsed(sub) ? 1 : 2;
      for (int b = 0; b < nbus; ++b) {
        const std::string tag = ld.id + ".b" + std::to_string(b + 1) + sn;
        st.shed[d][b] = m.add_var("shed." + tag, 0.0, ld.p_demand);
        // (6b): cannot shed more than is connected here.
        LinExpr cap = LinExpr::term(st.shed[d][b]);
        cap.add(load_part(d, b), -1.0);
        m.add_row("shed.cap." + tag, cap, Sense::Le, 0.0);
        if (dead_busbar(sub, b)) {
          // Everything on the dead busbar is lost.
          m.add_row("shed.dead." + tag, cap, Sense::Eq, 0.0);
        }
      }
    }
  } else if (cx.mc->dead_busbar_rules && c.kind == ContingencyKind::BusbarOutage) {
    throw std::logic_error("busbar outage state built without shedding");
  }

  // (7a)-(7b): nodal balance per live busbar.
  for (int i = 0; i < ns; ++i) {
    const int nbus = cx.collapsed(i) ? 1 : 2;
    for (int b = 0; b < nbus; ++b) {
      if (busbar_out(i, b)) continue;
      LinExpr pbal, qbal;
      for (int g : net.gens_at[i]) {
        if (st.pg[g][b] >= 0) pbal.add(st.pg[g][b], 1.0);
        if (st.qg[g][b] >= 0) qbal.add(st.qg[g][b], 1.0);
      }
      for (int d : net.loads_at[i]) {
        const auto& ld = net.loads[d];
        pbal.add(load_part(d, b), -1.0);
        qbal.add(load_part(d, b), -ld.pf_tangent);
        if (st.shed[d][b] >= 0) {
          pbal.add(st.shed[d][b], 1.0);
          qbal.add(st.shed[d][b], ld.pf_tangent);
        }
      }
      for (auto [br, e] : net.branch_ends_at[i]) {
        if (line_out(br)) continue;
        if (cx.collapsed(i)) {
          pbal.add(pflow[br][e], -1.0);
          qbal.add(qflow[br][e], -1.0);
        } else if (b == 0) {
          pbal.add(st.p_b1[br][e], -1.0);
          qbal.add(st.q_b1[br][e], -1.0);
        } else {
          LinExpr p2 = pflow[br][e];
          p2.add(st.p_b1[br][e], -1.0);
          pbal.add(p2, -1.0);
          LinExpr q2 = qflow[br][e];
          q2.add(st.q_b1[br][e], -1.0);
          qbal.add(q2, -1.0);
        }
      }
      if (st.p_cp[i] >= 0) {
        // Coupler flow leaves B1 and enters B2.
        pbal.add(st.p_cp[i], b == 0 ? -1.0 : 1.0);
        qbal.add(st.q_cp[i], b == 0 ? -1.0 : 1.0);
      }
      const std::string tag =
          net.substations[i].id + ".b" + std::to_string(b + 1) + sn;
      if (cx.opts->balance_slacks || cx.opts->balance_slack_penalty > 0.0) {
        const int sp = m.add_var("slk+." + tag, 0.0, kInf);
        const int sm2 = m.add_var("slk-." + tag, 0.0, kInf);
        const int sqp = m.add_var("slkq+." + tag, 0.0, kInf);
        const int sqm = m.add_var("slkq-." + tag, 0.0, kInf);
        pbal.add(sp, 1.0).add(sm2, -1.0);
        qbal.add(sqp, 1.0).add(sqm, -1.0);
        st.p_balance_slack_plus.insert(st.p_balance_slack_plus.end(), {sp, sqp});
        st.p_balance_slack_minus.insert(st.p_balance_slack_minus.end(),
                                        {sm2, sqm});
      }
      m.add_row("pbal." + tag, pbal, Sense::Eq, 0.0);
      m.add_row("qbal." + tag, qbal, Sense::Eq, 0.0);
    }
  }

  vars.states.push_back(std::move(st));
}

}  // namespace

ScsrModel build_scsr(const Network& net, const ContingencySet& cs,
                     const ModelConfig& mc, const ObjectiveConfig& oc,
                     const Linearization& lin, const BuildOptions& opts) {
  if ((oc.mode == ObjectiveMode::FixedDispatch ||
       oc.mode == ObjectiveMode::FixedCostCap) &&
      !net.has_market_dispatch) {
    throw std::invalid_argument(
        "objective mode requires a market dispatch, none in the case data");
  }
  if (oc.mode == ObjectiveMode::FixedCostCap && oc.alpha < 0.0) {
    throw std::invalid_argument("fixed-cost cap needs alpha >= 0");
  }

  ScsrModel sm;
  LinearModel& m = sm.model;
  ScsrVars& vars = sm.vars;
  Ctx cx{&net,         &cs, &mc, &oc, &lin, &opts, mc.big_m_theta,
         mc.derived_big_m_v(net)};

  const int ns = net.num_substations();
  const int nb = static_cast<int>(net.branches.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nd = static_cast<int>(net.loads.size());
  const bool as_bin = opts.binaries_as_binaries;

  // Topology binaries. Variables at collapsed substations are pinned to the
  // B1/closed defaults and never referenced by rows.
  vars.z_coupler.resize(ns);
  for (int i = 0; i < ns; ++i) {
    vars.z_coupler[i] = m.add_var("z.cpl." + net.substations[i].id, 0.0, 1.0,
                                  as_bin && !cx.collapsed(i));
    if (cx.collapsed(i)) m.fix_var(vars.z_coupler[i], 1.0);
  }
  vars.z_line.resize(nb);
  for (int br = 0; br < nb; ++br) {
    for (int e = 0; e < 2; ++e) {
      const int sub = net.branch_end_sub(br, e);
      vars.z_line[br][e] =
          m.add_var("z.ln." + net.branches[br].id + (e ? ".t" : ".f"), 0.0, 1.0,
                    as_bin && !cx.collapsed(sub));
      if (cx.collapsed(sub)) m.fix_var(vars.z_line[br][e], 0.0);
    }
  }
  vars.z_gen.resize(ng);
  for (int g = 0; g < ng; ++g) {
    const int sub = net.generators[g].substation;
    vars.z_gen[g] = m.add_var("z.g." + net.generators[g].id, 0.0, 1.0,
                              as_bin && !cx.collapsed(sub));
    if (cx.collapsed(sub)) m.fix_var(vars.z_gen[g], 0.0);
  }
  vars.z_load.resize(nd);
  for (int d = 0; d < nd; ++d) {
    const int sub = net.loads[d].substation;
    vars.z_load[d] = m.add_var("z.d." + net.loads[d].id, 0.0, 1.0,
                               as_bin && !cx.collapsed(sub));
    if (cx.collapsed(sub)) m.fix_var(vars.z_load[d], 0.0);
  }

  // Splitting rules (4a)-(4d).
  if (opts.global_topology_rules) {
    LinExpr budget;
    int counted = 0;
    for (int i = 0; i < ns; ++i) {
      if (cx.collapsed(i)) continue;
      budget.add(vars.z_coupler[i], 1.0);
      ++counted;
      const auto& ends = net.branch_ends_at[i];
      if (ends.empty()) {
        m.fix_var(vars.z_coupler[i], 1.0);
        continue;
      }
      LinExpr onb2;
      for (auto [br, e] : ends) onb2.add(vars.z_line[br][e], 1.0);
      // (4b): at least two lines on B2 when split.
      LinExpr low = onb2;
      low.add(vars.z_coupler[i], 2.0);
      m.add_row("split.b2." + net.substations[i].id, low, Sense::Ge, 2.0);
      // (4c): at least two lines on B1 when split.
      LinExpr high = onb2;
      high.add(vars.z_coupler[i], -2.0);
      m.add_row("split.b1." + net.substations[i].id, high, Sense::Le,
                static_cast<double>(ends.size()) - 2.0);
      // (4d): symmetry pin.
      if (mc.symmetry_break) {
        int pin = 0;
        for (int k = 1; k < static_cast<int>(ends.size()); ++k) {
          if (net.branches[ends[k].first].id < net.branches[ends[pin].first].id)
            pin = k;
        }
        m.fix_var(vars.z_line[ends[pin].first][ends[pin].second], 0.0);
      }
    }
    // (4a): splitting budget.
    if (opts.splitting_budget) {
      m.add_row("split.budget", budget, Sense::Ge,
                static_cast<double>(counted - mc.max_splits));
    }
  }

  // Dispatch block: per-busbar normal output, reserves, and the (5a)-(5b)
  // split rows of the normal state.
  vars.p0_b.resize(ng);
  vars.r_up.resize(ng);
  vars.r_down.resize(ng);
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    const bool col = cx.collapsed(gen.substation);
    vars.p0_b[g][0] = m.add_var("p0." + gen.id + ".b1",
                                col ? gen.p_min : std::min(gen.p_min, 0.0),
                                col ? gen.p_max : std::max(gen.p_max, 0.0));
    vars.p0_b[g][1] = m.add_var("p0." + gen.id + ".b2",
                                col ? 0.0 : std::min(gen.p_min, 0.0),
                                col ? 0.0 : std::max(gen.p_max, 0.0));
    vars.r_up[g] = m.add_var("ru." + gen.id, 0.0, gen.ramp_up);
    vars.r_down[g] = m.add_var("rd." + gen.id, 0.0, gen.ramp_down);
    if (!col) {
      const int zg = vars.z_gen[g];
      for (int b = 0; b < 2; ++b) {
        const double sgn = b == 0 ? 1.0 : -1.0;
        const double off = b == 0 ? 1.0 : 0.0;
        LinExpr hi = LinExpr::term(vars.p0_b[g][b]).add(zg, sgn * gen.p_max);
        m.add_row("p0.hi." + gen.id + ".b" + std::to_string(b + 1), hi, Sense::Le,
                  off * gen.p_max);
        LinExpr lo = LinExpr::term(vars.p0_b[g][b]).add(zg, sgn * gen.p_min);
        m.add_row("p0.lo." + gen.id + ".b" + std::to_string(b + 1), lo, Sense::Ge,
                  off * gen.p_min);
      }
    }
    if (oc.mode == ObjectiveMode::FixedDispatch) {
      LinExpr tot = LinExpr::term(vars.p0_b[g][0]).add(vars.p0_b[g][1], 1.0);
      m.add_row("fixdisp." + gen.id, tot, Sense::Eq, gen.p_market);
    }
  }

  // States: normal first when present.
  sm.state_conts = opts.states;
  if (sm.state_conts.empty()) {
    sm.state_conts.resize(cs.size());
    for (int i = 0; i < cs.size(); ++i) sm.state_conts[i] = i;
  }
  std::stable_sort(sm.state_conts.begin(), sm.state_conts.end(),
                   [&](int a, int b) {
                     const bool na = cs[a].kind == ContingencyKind::Normal;
                     const bool nbn = cs[b].kind == ContingencyKind::Normal;
                     if (na != nbn) return na;
                     return a < b;
                   });
  for (int cont : sm.state_conts) emit_state(cx, m, vars, cont);

  // Objective.
  LinExpr gen_cost;
  double market_cost = 0.0;
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    gen_cost.add(vars.p0_b[g][0], gen.cost * net.base_mva);
    gen_cost.add(vars.p0_b[g][1], gen.cost * net.base_mva);
    gen_cost.add(vars.r_up[g], gen.cost_up * net.base_mva);
    gen_cost.add(vars.r_down[g], gen.cost_down * net.base_mva);
    market_cost += gen.cost * gen.p_market * net.base_mva;
  }
  if (oc.mode == ObjectiveMode::FixedCostCap) {
    m.add_row("cost.cap", gen_cost, Sense::Le, (1.0 + oc.alpha) * market_cost);
  } else if (opts.dispatch_cost_in_objective) {
    m.add_cost(gen_cost);
    m.add_cost_constant(-market_cost);
  }
  if (opts.shedding_in_objective) {
    for (const auto& st : vars.states) {
      for (int d = 0; d < nd; ++d) {
        for (int b = 0; b < 2; ++b) {
          if (st.shed[d][b] >= 0) {
            m.add_cost(st.shed[d][b],
                       st.weight * net.loads[d].cost_shed * net.base_mva);
          }
        }
      }
    }
  }
  if (opts.balance_slacks || opts.balance_slack_penalty > 0.0) {
    const double price =
        opts.balance_slacks ? 1.0 : opts.balance_slack_penalty;
    for (const auto& st : vars.states) {
      for (int v : st.p_balance_slack_plus) m.add_cost(v, price);
      for (int v : st.p_balance_slack_minus) m.add_cost(v, price);
    }
  }
  return sm;
}

ScsrModel fixed_cost_model(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, double alpha,
                           const Linearization& lin) {
  ObjectiveConfig oc;
  oc.mode = ObjectiveMode::FixedCostCap;
  oc.alpha = alpha;
  return build_scsr(net, cs, mc, oc, lin);
}

// ---------------------------------------------------------------------------

double StateShedding::total_shed() const {
  double s = 0.0;
  for (double v : shed_by_load) s += v;
  return s;
}

SolutionBundle extract_bundle(const Network& net, const ContingencySet& cs,
                              const ObjectiveConfig& oc, const ScsrModel& sm,
                              const SolveResult& res) {
  SolutionBundle b;
  b.status = res.status;
  b.best_bound = res.best_bound;
  b.gap = res.gap();
  b.wall_seconds = res.wall_seconds;
  if (!res.has_solution()) return b;
  const auto& x = res.x;
  const auto& vars = sm.vars;
  const int ns = net.num_substations();
  const int ng = static_cast<int>(net.generators.size());
  const int nd = static_cast<int>(net.loads.size());

  b.objective = res.objective;
  b.topology.coupler_closed.resize(ns);
  for (int i = 0; i < ns; ++i)
    b.topology.coupler_closed[i] = x[vars.z_coupler[i]] >= 0.5;
  b.topology.line_busbar.resize(net.branches.size());
  for (size_t br = 0; br < net.branches.size(); ++br)
    for (int e = 0; e < 2; ++e)
      b.topology.line_busbar[br][e] = x[vars.z_line[br][e]] >= 0.5;
  b.topology.gen_busbar.resize(ng);
  for (int g = 0; g < ng; ++g) b.topology.gen_busbar[g] = x[vars.z_gen[g]] >= 0.5;
  b.topology.load_busbar.resize(nd);
  for (int d = 0; d < nd; ++d) b.topology.load_busbar[d] = x[vars.z_load[d]] >= 0.5;

  b.dispatch.p0.resize(ng);
  b.dispatch.r_up.resize(ng);
  b.dispatch.r_down.resize(ng);
  for (int g = 0; g < ng; ++g) {
    b.dispatch.p0[g] = x[vars.p0_b[g][0]] + x[vars.p0_b[g][1]];
    b.dispatch.r_up[g] = x[vars.r_up[g]];
    b.dispatch.r_down[g] = x[vars.r_down[g]];
    const auto& gen = net.generators[g];
    b.redispatch_cost +=
        net.base_mva * gen.cost * (b.dispatch.p0[g] - gen.p_market);
    b.reserve_cost += net.base_mva * (gen.cost_up * b.dispatch.r_up[g] +
                                      gen.cost_down * b.dispatch.r_down[g]);
  }

  for (const auto& st : vars.states) {
    StateShedding ss;
    ss.contingency_id = cs[st.cont].id;
    ss.probability = cs[st.cont].probability;
    ss.shed_by_load.assign(nd, 0.0);
    for (int d = 0; d < nd; ++d) {
      for (int bb = 0; bb < 2; ++bb) {
        if (st.shed[d][bb] >= 0) ss.shed_by_load[d] += x[st.shed[d][bb]];
      }
      ss.shed_cost += net.base_mva * net.loads[d].cost_shed * ss.shed_by_load[d];
    }
    b.shedding_cost += st.weight * ss.shed_cost;
    b.states.push_back(std::move(ss));
  }
  (void)oc;
  return b;
}

std::string RunTrace::to_tsv() const {
  std::ostringstream os;
  os << "iter\tlb\tub\tbest_ub\tcuts_feas\tcuts_opt\tsplits\tbatch_s\twall_s\n";
  char buf[64];
  auto f = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.iteration << "\t" << f(r.lb) << "\t" << f(r.ub) << "\t"
       << f(r.best_ub) << "\t" << r.cuts_feasibility << "\t" << r.cuts_optimality
       << "\t" << r.splits << "\t" << f(r.batch_seconds) << "\t" << f(r.seconds)
       << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::vector<double> topology_binaries(const ScsrModel& sm,
                                      const TopologyAssignment& topo) {
  std::vector<double> v(sm.model.num_vars(), 0.0);
  const auto& vars = sm.vars;
  for (size_t i = 0; i < vars.z_coupler.size(); ++i)
    v[vars.z_coupler[i]] = topo.coupler_closed[i];
  for (size_t br = 0; br < vars.z_line.size(); ++br)
    for (int e = 0; e < 2; ++e) v[vars.z_line[br][e]] = topo.line_busbar[br][e];
  for (size_t g = 0; g < vars.z_gen.size(); ++g)
    v[vars.z_gen[g]] = topo.gen_busbar[g];
  for (size_t d = 0; d < vars.z_load.size(); ++d)
    v[vars.z_load[d]] = topo.load_busbar[d];
  return v;
}

namespace {

SolveResult restriction_with_pool(const ScsrModel& sm,
                                  const TopologyAssignment& topo,
                                  const SolveOptions& opt,
                                  internal::RowPool* pool) {
  std::vector<double> lb(sm.model.num_vars()), ub(sm.model.num_vars());
  for (int j = 0; j < sm.model.num_vars(); ++j) {
    lb[j] = sm.model.var(j).lb;
    ub[j] = sm.model.var(j).ub;
  }
  const std::vector<double> binv = topology_binaries(sm, topo);
  auto pin = [&](int j) { lb[j] = ub[j] = binv[j]; };
  for (int j : sm.vars.z_coupler) pin(j);
  for (const auto& le : sm.vars.z_line)
    for (int e = 0; e < 2; ++e) pin(le[e]);
  for (int j : sm.vars.z_gen) pin(j);
  for (int j : sm.vars.z_load) pin(j);
  return internal::lp_solve(sm.model, lb.data(), ub.data(), opt, pool);
}

}  // namespace

SolveResult solve_restriction(const ScsrModel& sm, const TopologyAssignment& topo,
                              const SolveOptions& opt) {
  internal::RowPool pool;
  return restriction_with_pool(sm, topo, opt, &pool);
}

DispatchSolution scopf_dispatch(const Network& net, const ModelConfig& mc,
                                const Linearization& lin,
                                const TopologyAssignment& topo) {
  ContingencySet cs;
  cs.entries.push_back({"normal", ContingencyKind::Normal, -1, Busbar::B1, 1.0});
  for (int e = 0; e < static_cast<int>(net.branches.size()); ++e) {
    if (net.branches[e].is_radial) continue;
    cs.entries.push_back(
        {"line:" + net.branches[e].id, ContingencyKind::Line, e, Busbar::B1, 1.0});
  }
  ObjectiveConfig oc;
  BuildOptions opts;
  opts.binaries_as_binaries = false;
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin, opts);
  SolveResult res = solve_restriction(sm, topo);
  if (res.status != SolveStatus::Optimal) {
    throw std::runtime_error("line-contingency SC-OPF failed: " +
                             std::string(to_string(res.status)));
  }
  SolutionBundle b = extract_bundle(net, cs, oc, sm, res);
  return b.dispatch;
}

OrgResult solve_org_mip(const Network& net, const ContingencySet& cs,
                        const ModelConfig& mc, const ObjectiveConfig& oc,
                        const SolveOptions& solver,
                        const TopologyAssignment* warm_start) {
  OrgResult out;
  out.trace.method = "org";
  const Linearization lin = prepare_linearization(net, mc);
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);

  SolveOptions opt = solver;
  const TopologyAssignment warm_default = initial_topology(net);
  opt.warm_binaries =
      topology_binaries(sm, warm_start ? *warm_start : warm_default);
  int iter = 0;
  opt.progress = [&](double sec, double inc, double bnd) {
    TraceRow r;
    r.iteration = iter++;
    r.lb = bnd;
    r.ub = inc;
    r.best_ub = inc;
    r.seconds = sec;
    out.trace.rows.push_back(r);
  };
  SolveResult res = solve_milp(sm.model, opt);
  out.bundle = extract_bundle(net, cs, oc, sm, res);
  out.bundle.method = "org";
  out.bundle.converged = res.status == SolveStatus::Optimal;
  return out;
}

int count_topology_binaries(const Network& net, const ModelConfig& mc) {
  int n = 0;
  for (int i = 0; i < net.num_substations(); ++i) {
    const int nl = static_cast<int>(net.branch_ends_at[i].size());
    const int ne = static_cast<int>(net.gens_at[i].size() +
                                    net.loads_at[i].size());
    n += 1 + nl + ne - (mc.symmetry_break && nl > 0 ? 1 : 0);
  }
  return n;
}

SolutionBundle brute_force_oracle(const Network& net, const ContingencySet& cs,
                                  const ModelConfig& mc, const ObjectiveConfig& oc,
                                  int max_binaries, int workers) {
  if (count_topology_binaries(net, mc) > max_binaries) {
    throw std::invalid_argument(
        "oracle refused: more than " + std::to_string(max_binaries) +
        " free topology binaries");
  }
  const Linearization lin = prepare_linearization(net, mc);
  BuildOptions opts;
  opts.binaries_as_binaries = false;
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin, opts);

  const int ns = net.num_substations();
  std::vector<std::vector<SubstationAssignment>> closed(ns), split(ns);
  for (int i = 0; i < ns; ++i) {
    closed[i] = enumerate_assignments(net, i, false, mc.symmetry_break);
    split[i] = enumerate_assignments(net, i, true, mc.symmetry_break);
  }

  // Enumerate the full candidate list first, then price the restrictions in
  // parallel. The winner is picked by (objective, position), so the thread
  // count cannot change the answer.
  std::vector<TopologyAssignment> candidates;
  TopologyAssignment topo = initial_topology(net);
  std::function<void(int, int)> dfs = [&](int sub, int splits_used) {
    if (sub == ns) {
      candidates.push_back(topo);
      return;
    }
    for (const auto& a : closed[sub]) {
      apply_assignment(net, a, &topo);
      dfs(sub + 1, splits_used);
    }
    if (splits_used < mc.max_splits) {
      for (const auto& a : split[sub]) {
        apply_assignment(net, a, &topo);
        dfs(sub + 1, splits_used + 1);
      }
    }
    SubstationAssignment reset;
    reset.substation = sub;
    reset.coupler_closed = true;
    reset.line_busbar.assign(net.branch_ends_at[sub].size(), 0);
    reset.gen_busbar.assign(net.gens_at[sub].size(), 0);
    reset.load_busbar.assign(net.loads_at[sub].size(), 0);
    apply_assignment(net, reset, &topo);
  };
  dfs(0, 0);

  std::vector<double> objs(candidates.size(), kInf);
  const int nchunks = std::max(1, std::min<int>(workers, 16));
  SolveOptions lpopt;
  parallel_for(nchunks, nchunks, [&](int chunk) {
    internal::RowPool pool;  // warm row set shared within the chunk
    for (size_t k = chunk; k < candidates.size(); k += nchunks) {
      SolveResult r = restriction_with_pool(sm, candidates[k], lpopt, &pool);
      if (r.status == SolveStatus::Optimal) objs[k] = r.objective;
    }
  });

  int best = -1;
  for (size_t k = 0; k < candidates.size(); ++k) {
    if (best < 0 || objs[k] < objs[best] - 1e-12) best = static_cast<int>(k);
  }
  if (best < 0 || !std::isfinite(objs[best])) {
    SolutionBundle b;
    b.method = "oracle";
    b.status = SolveStatus::Infeasible;
    return b;
  }
  internal::RowPool pool;
  SolveResult win = restriction_with_pool(sm, candidates[best], lpopt, &pool);
  SolutionBundle b = extract_bundle(net, cs, oc, sm, win);
  b.method = "oracle";
  b.converged = true;
  b.topology = candidates[best];
  b.gap = 0.0;
  b.best_bound = objs[best];
  return b;
}

}  // namespace scsr
