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

#include "scsr/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "scsr/benders.hpp"
#include "scsr/hmmp.hpp"
#include "scsr/parallel.hpp"

namespace scsr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string MetricsReport::to_tsv() const {
  std::ostringstream os;
  os << "objective\timprovement_pct\tavg_shed_cost\tactive_contingencies\t"
        "avg_curtailed_loads\tavg_shed_mw\tavg_shed_active_mw\tavg_ens_pct\t"
        "wall_seconds\n";
  os << fmt(objective) << "\t"
     << (std::isfinite(improvement_pct) ? fmt(improvement_pct) : "-") << "\t"
     << fmt(avg_shed_cost) << "\t" << active_contingencies << "\t"
     << fmt(avg_curtailed_loads) << "\t" << fmt(avg_shed_mw) << "\t"
     << fmt(avg_shed_active_mw) << "\t" << fmt(avg_ens_pct) << "\t"
     << fmt(wall_seconds) << "\n";
  return os.str();
}

MetricsReport evaluate_solution(const Network& net, const SolutionBundle& bundle,
                                const ContingencySet& cs, const ModelConfig& mc,
                                double reference_objective, int workers) {
  const auto t0 = Clock::now();
  MetricsReport rep;
  const Linearization lin = prepare_linearization(net, mc);
  ObjectiveConfig oc;  // evaluation prices shedding uniformly

  struct StateEval {
    bool feasible = true;
    double shed_mw = 0.0;
    double shed_cost = 0.0;
    int curtailed = 0;
  };
  std::vector<int> conts;
  for (int ci = 1; ci < cs.size(); ++ci) conts.push_back(ci);
  std::vector<StateEval> evals(conts.size());

  parallel_for(static_cast<int>(conts.size()), workers, [&](int k) {
    const int ci = conts[k];
    StateEval ev;
    if (state_allows_shedding(net, cs[ci])) {
      Subproblem sp(net, cs, mc, oc, lin, ci, Subproblem::Type::Optimality);
      SubproblemResult r = sp.solve(bundle.topology, bundle.dispatch);
      if (!r.feasible) {
        ev.feasible = false;
      } else {
        ev.shed_cost = r.objective;
        for (double s : r.shed_by_load) {
          ev.shed_mw += s * net.base_mva;
          if (s * net.base_mva > 1e-6) ++ev.curtailed;
        }
      }
    } else {
      Subproblem sp(net, cs, mc, oc, lin, ci, Subproblem::Type::Feasibility);
      SubproblemResult r = sp.solve(bundle.topology, bundle.dispatch);
      if (r.objective > 1e-4) ev.feasible = false;
    }
    evals[k] = ev;
  });

  const double total_load_mw = net.total_demand() * net.base_mva;
  double sum_cost = 0.0, sum_mw = 0.0, sum_active_mw = 0.0, sum_curt = 0.0,
         sum_ens = 0.0;
  for (size_t k = 0; k < evals.size(); ++k) {
    const auto& ev = evals[k];
    if (!ev.feasible) {
      rep.infeasible_contingencies.push_back(cs[conts[k]].id);
      continue;
    }
    sum_cost += ev.shed_cost;
    sum_mw += ev.shed_mw;
    sum_curt += ev.curtailed;
    if (ev.shed_mw > 1e-6) {
      ++rep.active_contingencies;
      sum_active_mw += ev.shed_mw;
    }
    if (total_load_mw > 0.0) sum_ens += 100.0 * ev.shed_mw / total_load_mw;
  }
  const double nc = static_cast<double>(conts.size());
  rep.avg_shed_cost = sum_cost / nc;
  rep.avg_shed_mw = sum_mw / nc;
  rep.avg_curtailed_loads = sum_curt / nc;
  rep.avg_shed_active_mw =
      rep.active_contingencies ? sum_active_mw / rep.active_contingencies : 0.0;
  rep.avg_ens_pct = sum_ens / nc;
  rep.objective = bundle.dispatch.dispatch_cost(net) + sum_cost;
  if (std::isfinite(reference_objective) && reference_objective != 0.0) {
    rep.improvement_pct =
        100.0 * (reference_objective - rep.objective) / reference_objective;
  }
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// Correlated load sampling

namespace {

// Deterministic standard normals (the library distributions are
// implementation-defined).
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = next_uniform(), u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double next_uniform() {
    // (0,1), never exactly zero
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double kumaraswamy_quantile(double u, double a, double b) {
  return std::pow(1.0 - std::pow(1.0 - u, 1.0 / b), 1.0 / a);
}

// Sample Pearson correlation of a pilot pair sample for a latent rho.
double pilot_pearson(double rho_z, double a, double b) {
  const int n = 5000;
  NormalSource normals(999);
  const double w = std::sqrt(std::clamp(rho_z, 0.0, 1.0));
  const double e = std::sqrt(1.0 - w * w);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    const double s = normals();
    const double x =
        kumaraswamy_quantile(std_normal_cdf(w * s + e * normals()), a, b);
    const double y =
        kumaraswamy_quantile(std_normal_cdf(w * s + e * normals()), a, b);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

}  // namespace

double kumaraswamy_mean(double a, double b) {
  // b * Beta(1 + 1/a, b)
  const double x = 1.0 + 1.0 / a;
  return b * std::exp(std::lgamma(x) + std::lgamma(b) - std::lgamma(x + b));
}

std::vector<LoadScenario> sample_loads(const Network& net, double a, double b,
                                       double rho, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one scenario");
  // Calibrate the latent correlation by bisection on the pilot sample.
  double lo = 0.0, hi = 0.999;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pilot_pearson(mid, a, b) < rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rho_z = 0.5 * (lo + hi);
  const double w = std::sqrt(rho_z);
  const double e = std::sqrt(1.0 - rho_z);

  NormalSource normals(seed);
  std::vector<LoadScenario> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    LoadScenario sc;
    sc.seed = seed;
    sc.index = k;
    const double shared = normals();
    sc.factors.resize(net.loads.size());
    for (size_t d = 0; d < net.loads.size(); ++d) {
      sc.factors[d] =
          kumaraswamy_quantile(std_normal_cdf(w * shared + e * normals()), a, b);
    }
    out.push_back(std::move(sc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Studies

namespace {

Network scaled_network(const Network& net, const std::vector<double>& factors) {
  Network out = net;
  for (size_t d = 0; d < out.loads.size(); ++d)
    out.loads[d].p_demand = net.loads[d].p_demand * factors[d];
  out.finalize();
  return out;
}

Network without_branch(const Network& net, int branch) {
  Network out = net;
  out.branches.erase(out.branches.begin() + branch);
  out.finalize();
  return out;
}

TopologyAssignment project_topology(const Network& reduced,
                                    const TopologyAssignment& topo, int removed) {
  TopologyAssignment t = topo;
  t.line_busbar.erase(t.line_busbar.begin() + removed);
  (void)reduced;
  return t;
}

struct ShedStats {
  double mean_coupler = 0.0;
  double mean_busbar = 0.0;
  double max_any = 0.0;
};

// Curtailment of surviving loads. A busbar outage always takes its own
// feeders along, identically under every assignment, so the comparable
// quantity between topologies is the shedding forced onto the rest of the
// grid.
ShedStats shed_stats(const Network& net, const ContingencySet& cs,
                     const SolutionBundle& b) {
  ShedStats st;
  int nc = 0, nb = 0;
  for (const auto& ss : b.states) {
    const int ci = cs.find(ss.contingency_id);
    if (ci < 0) continue;
    const Contingency& c = cs[ci];
    double mw = 0.0;
    for (size_t d = 0; d < ss.shed_by_load.size(); ++d) {
      if (c.kind == ContingencyKind::BusbarOutage &&
          net.loads[d].substation == c.target &&
          b.topology.load_busbar[d] == static_cast<int>(c.busbar)) {
        continue;  // lost with its busbar, not curtailed by the grid
      }
      mw += ss.shed_by_load[d] * net.base_mva;
    }
    st.max_any = std::max(st.max_any, mw);
    if (c.kind == ContingencyKind::Coupler) {
      st.mean_coupler += mw;
      ++nc;
    } else if (c.kind == ContingencyKind::BusbarOutage) {
      st.mean_busbar += mw;
      ++nb;
    }
  }
  if (nc) st.mean_coupler /= nc;
  if (nb) st.mean_busbar /= nb;
  return st;
}

// Bundle for a fixed topology with the dispatch re-optimized over the full
// contingency set.
SolutionBundle restriction_solution(const Network& net, const ContingencySet& cs,
                                    const ModelConfig& mc,
                                    const TopologyAssignment& topo) {
  const Linearization lin = prepare_linearization(net, mc);
  ObjectiveConfig oc;
  ScsrModel sm = build_scsr(net, cs, mc, oc, lin);
  SolveResult res = solve_restriction(sm, topo);
  SolutionBundle b;
  b.status = res.status;
  if (res.status == SolveStatus::Optimal)
    b = extract_bundle(net, cs, oc, sm, res);
  return b;
}

}  // namespace

std::string StudyReport::to_tsv() const {
  std::ostringstream os;
  os << "sample\tremoved\tbaseline_obj\tproposed_obj\tbase_mean_cpl_mw\t"
        "prop_mean_cpl_mw\tbase_mean_bus_mw\tprop_mean_bus_mw\tbase_max_mw\t"
        "prop_max_mw\n";
  for (const auto& s : samples) {
    os << s.sample << "\t" << s.removed_branch << "\t"
       << fmt(s.baseline_objective) << "\t" << fmt(s.proposed_objective) << "\t"
       << fmt(s.baseline_mean_shed_coupler_mw) << "\t"
       << fmt(s.proposed_mean_shed_coupler_mw) << "\t"
       << fmt(s.baseline_mean_shed_busbar_mw) << "\t"
       << fmt(s.proposed_mean_shed_busbar_mw) << "\t"
       << fmt(s.baseline_max_shed_mw) << "\t" << fmt(s.proposed_max_shed_mw)
       << "\n";
  }
  os << "# mean_busbar_shed_ratio = " << fmt(mean_busbar_shed_ratio) << "\n";
  return os.str();
}

StudyReport study_line_removal(const Network& net,
                               const std::vector<LoadScenario>& scenarios,
                               const std::vector<int>& removals,
                               const ModelConfig& mc, const StudyOptions& opt) {
  if (removals.size() != scenarios.size()) {
    throw std::invalid_argument("one removal per scenario required");
  }
  for (int br : removals) {
    if (net.branches.at(br).is_radial) {
      throw std::invalid_argument("cannot remove radial branch " +
                                  net.branches[br].id);
    }
  }

  // The in-service topology: reconfiguration on the intact grid, no splits.
  ObjectiveConfig oc;
  HmmpOptions hopt;
  hopt.workers = opt.workers;
  hopt.time_limit = opt.time_limit_per_solve;
  HmmpResult base = run_hmmp(net, build_contingency_set(net, false), mc, oc, hopt);
  const TopologyAssignment topo_hat =
      base.bundle.states.empty() && base.bundle.topology.coupler_closed.empty()
          ? initial_topology(net)
          : base.bundle.topology;

  StudyReport rep;
  rep.samples.resize(scenarios.size());
  double sum_base_busbar = 0.0, sum_prop_busbar = 0.0;

  for (size_t k = 0; k < scenarios.size(); ++k) {
    const Network scaled = scaled_network(net, scenarios[k].factors);
    const Network reduced = without_branch(scaled, removals[k]);
    const ContingencySet cs_k = build_contingency_set(reduced, false);
    const TopologyAssignment topo_k =
        project_topology(reduced, topo_hat, removals[k]);

    // Baseline: keep the topology, redispatch for line security, then price
    // the substation contingencies at that point.
    SolutionBundle baseline;
    {
      ModelConfig mcb = mc;
      const Linearization lin = prepare_linearization(reduced, mcb);
      DispatchSolution d = scopf_dispatch(reduced, mcb, lin, topo_k);
      SolutionBundle fixed;
      fixed.topology = topo_k;
      fixed.dispatch = d;
      double shed_cost = 0.0;
      std::vector<StateShedding> states;
      for (int ci = 1; ci < cs_k.size(); ++ci) {
        if (!state_allows_shedding(reduced, cs_k[ci])) continue;
        SubproblemResult r = solve_osp(reduced, cs_k, mcb, oc, lin, ci, topo_k, d);
        StateShedding ss;
        ss.contingency_id = cs_k[ci].id;
        ss.shed_cost = r.objective;
        ss.shed_by_load = r.shed_by_load;
        shed_cost += r.objective;
        states.push_back(std::move(ss));
      }
      fixed.states = std::move(states);
      fixed.shedding_cost = shed_cost;
      fixed.objective = d.dispatch_cost(reduced) + shed_cost;
      fixed.status = SolveStatus::Optimal;
      baseline = std::move(fixed);
    }

    // Proposed: full reconfiguration re-solve, never worse than keeping the
    // baseline point.
    HmmpOptions hk = hopt;
    HmmpResult prop = run_hmmp(reduced, cs_k, mc, oc, hk);
    SolutionBundle proposed =
        prop.bundle.status == SolveStatus::Optimal ||
                prop.bundle.status == SolveStatus::Feasible
            ? prop.bundle
            : baseline;
    if (baseline.objective < proposed.objective) proposed = baseline;

    const ShedStats bs = shed_stats(reduced, cs_k, baseline);
    const ShedStats ps = shed_stats(reduced, cs_k, proposed);
    LineRemovalSample row;
    row.sample = static_cast<int>(k);
    row.removed_branch = scaled.branches[removals[k]].id;
    row.baseline_objective = baseline.objective;
    row.proposed_objective = proposed.objective;
    row.baseline_mean_shed_coupler_mw = bs.mean_coupler;
    row.proposed_mean_shed_coupler_mw = ps.mean_coupler;
    row.baseline_mean_shed_busbar_mw = bs.mean_busbar;
    row.proposed_mean_shed_busbar_mw = ps.mean_busbar;
    row.baseline_max_shed_mw = bs.max_any;
    row.proposed_max_shed_mw = ps.max_any;
    rep.samples[k] = std::move(row);
    sum_base_busbar += bs.mean_busbar;
    sum_prop_busbar += ps.mean_busbar;
  }
  rep.mean_busbar_shed_ratio =
      sum_base_busbar > 1e-9 ? sum_prop_busbar / sum_base_busbar : 1.0;
  return rep;
}

std::string ScheduleReport::to_tsv() const {
  std::ostringstream os;
  os << "hour\tfactor\tfixed_mean_mw\tfixed_max_mw\thourly_mean_mw\t"
        "hourly_max_mw\n";
  for (const auto& h : hours) {
    os << h.hour << "\t" << fmt(h.factor) << "\t" << fmt(h.fixed_mean_shed_mw)
       << "\t" << fmt(h.fixed_max_shed_mw) << "\t" << fmt(h.hourly_mean_shed_mw)
       << "\t" << fmt(h.hourly_max_shed_mw) << "\n";
  }
  os << "# peak_hour = " << peak_hour << "\n";
  return os.str();
}

ScheduleReport study_day_ahead(const Network& net,
                               const std::vector<double>& hourly_factors,
                               const ModelConfig& mc, const StudyOptions& opt) {
  if (hourly_factors.size() != 24) {
    throw std::invalid_argument("hourly profile needs 24 entries");
  }
  for (double f : hourly_factors) {
    if (f <= 0.0) throw std::invalid_argument("hourly factors must be positive");
  }
  ScheduleReport rep;
  rep.peak_hour = static_cast<int>(
      std::max_element(hourly_factors.begin(), hourly_factors.end()) -
      hourly_factors.begin());

  ObjectiveConfig oc;
  HmmpOptions hopt;
  hopt.workers = opt.workers;
  hopt.time_limit = opt.time_limit_per_solve;

  auto scale_all = [&](double f) {
    std::vector<double> v(net.loads.size(), f);
    return scaled_network(net, v);
  };

  const Network peak_net = scale_all(hourly_factors[rep.peak_hour]);
  HmmpResult peak =
      run_hmmp(peak_net, build_contingency_set(peak_net, false), mc, oc, hopt);
  const TopologyAssignment fixed_topo = peak.bundle.topology.coupler_closed.empty()
                                            ? initial_topology(net)
                                            : peak.bundle.topology;

  rep.hours.resize(24);
  for (int h = 0; h < 24; ++h) {
    const Network net_h = scale_all(hourly_factors[h]);
    const ContingencySet cs_h = build_contingency_set(net_h, false);

    SolutionBundle fixed = restriction_solution(net_h, cs_h, mc, fixed_topo);
    HmmpResult hourly = run_hmmp(net_h, cs_h, mc, oc, hopt);
    SolutionBundle best_hourly = hourly.bundle;
    // Hourly may keep the fixed topology; dominance per hour by candidacy.
    if (fixed.status == SolveStatus::Optimal &&
        (best_hourly.states.empty() || fixed.objective < best_hourly.objective)) {
      best_hourly = fixed;
    }

    const ShedStats fs = shed_stats(net_h, cs_h, fixed);
    const ShedStats hs = shed_stats(net_h, cs_h, best_hourly);
    HourRow row;
    row.hour = h;
    row.factor = hourly_factors[h];
    row.fixed_mean_shed_mw = 0.5 * (fs.mean_coupler + fs.mean_busbar);
    row.fixed_max_shed_mw = fs.max_any;
    row.hourly_mean_shed_mw = 0.5 * (hs.mean_coupler + hs.mean_busbar);
    row.hourly_max_shed_mw = hs.max_any;
    rep.hours[h] = row;
  }
  return rep;
}

}  // namespace scsr
