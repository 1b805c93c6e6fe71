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

#include "scsr/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace scsr {

double Network::total_demand() const {
  double s = 0.0;
  for (const auto& d : loads) s += d.p_demand;
  return s;
}

int Network::substation_index(std::string_view id) const {
  for (int i = 0; i < num_substations(); ++i)
    if (substations[i].id == id) return i;
  return -1;
}

double DispatchSolution::dispatch_cost(const Network& net) const {
  double c = 0.0;
  for (size_t g = 0; g < net.generators.size(); ++g) {
    const auto& gen = net.generators[g];
    c += net.base_mva * (gen.cost * (p0[g] - gen.p_market) +
                         gen.cost_up * r_up[g] + gen.cost_down * r_down[g]);
  }
  return c;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Bridges via iterative DFS low-link.
std::vector<bool> find_bridges(int n, const std::vector<BranchRecord>& branches) {
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, branch)
  for (int e = 0; e < static_cast<int>(branches.size()); ++e) {
    adj[branches[e].from].emplace_back(branches[e].to, e);
    adj[branches[e].to].emplace_back(branches[e].from, e);
  }
  std::vector<bool> bridge(branches.size(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame {
    int v, parent_edge;
    size_t next = 0;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<Frame> stack{{root, -1}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        auto [w, e] = adj[f.v][f.next++];
        if (e == f.parent_edge) continue;
        if (disc[w] == -1) {
          disc[w] = low[w] = timer++;
          stack.push_back({w, e});
        } else {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        const int v = f.v;
        const int pe = f.parent_edge;
        stack.pop_back();
        if (!stack.empty()) {
          const int p = stack.back().v;
          low[p] = std::min(low[p], low[v]);
          if (low[v] > disc[p]) bridge[pe] = true;
        }
      }
    }
  }
  return bridge;
}

}  // namespace

void Network::finalize() {
  const int n = num_substations();
  require(n > 0, "network has no substations");
  require(!generators.empty(), "network has at least one generator");
  require(reference >= 0 && reference < n, "reference substation exists");

  std::set<std::string> ids;
  auto unique_id = [&](const std::string& id, const char* kind) {
    require(!id.empty(), std::string(kind) + " with empty id");
    require(ids.insert(id).second, "duplicate id: " + id);
  };
  for (const auto& s : substations) {
    unique_id(s.id, "substation");
    require(s.coupler_limit > 0, "non-positive coupler limit at " + s.id);
    require(0 < s.v_min && s.v_min < s.v_max, "voltage limits at " + s.id);
  }
  for (const auto& b : branches) {
    unique_id(b.id, "branch");
    require(b.from >= 0 && b.from < n && b.to >= 0 && b.to < n,
            "branch " + b.id + " references unknown substation");
    require(b.from != b.to, "branch " + b.id + " is a self-loop");
    require(b.s_max > 0, "non-positive thermal limit on " + b.id);
  }
  for (const auto& g : generators) {
    unique_id(g.id, "generator");
    require(g.substation >= 0 && g.substation < n,
            "generator " + g.id + " references unknown substation");
    require(g.p_min <= g.p_max && g.q_min <= g.q_max, "bounds of " + g.id);
    require(g.ramp_up >= 0 && g.ramp_down >= 0, "ramps of " + g.id);
    require(g.cost >= 0 && g.cost_up >= 0 && g.cost_down >= 0, "costs of " + g.id);
    if (has_market_dispatch) {
      require(g.p_min <= g.p_market + 1e-9 && g.p_market <= g.p_max + 1e-9,
              "market dispatch of " + g.id + " outside generation bounds");
    }
  }
  double max_gen_cost = 0.0;
  for (const auto& g : generators) max_gen_cost = std::max(max_gen_cost, g.cost);
  for (const auto& d : loads) {
    unique_id(d.id, "load");
    require(d.substation >= 0 && d.substation < n,
            "load " + d.id + " references unknown substation");
    require(d.p_demand >= 0, "negative demand on " + d.id);
    require(d.cost_shed > max_gen_cost,
            "shedding cost of " + d.id + " must exceed every generation cost");
  }

  branch_ends_at.assign(n, {});
  gens_at.assign(n, {});
  loads_at.assign(n, {});
  for (int e = 0; e < static_cast<int>(branches.size()); ++e) {
    branch_ends_at[branches[e].from].emplace_back(e, 0);
    branch_ends_at[branches[e].to].emplace_back(e, 1);
  }
  for (int g = 0; g < static_cast<int>(generators.size()); ++g)
    gens_at[generators[g].substation].push_back(g);
  for (int d = 0; d < static_cast<int>(loads.size()); ++d)
    loads_at[loads[d].substation].push_back(d);

  const auto bridge = find_bridges(n, branches);
  for (int e = 0; e < static_cast<int>(branches.size()); ++e)
    branches[e].is_radial = bridge[e];
}

// ---------------------------------------------------------------------------
// Case file: sections [meta], [substations], [branches], [generators], [loads].
// Table sections start with a header naming the columns.

namespace {

struct Cursor {
  int line = 0;
  int col = 1;
};

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string& tok, const Cursor& at) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw CaseError(at.line, at.col, "expected a number, got '" + tok + "'");
  }
  return v;
}

class TableReader {
 public:
  TableReader(std::string section, const std::vector<std::string>& allowed,
              const std::vector<std::string>& required)
      : section_(std::move(section)), allowed_(allowed), required_(required) {}

  void set_header(const std::vector<std::string>& cols, const Cursor& at) {
    header_ = cols;
    for (const auto& c : cols) {
      if (std::find(allowed_.begin(), allowed_.end(), c) == allowed_.end()) {
        throw CaseError(at.line, at.col,
                        "unknown field '" + c + "' in [" + section_ + "]");
      }
    }
    for (const auto& r : required_) {
      if (std::find(cols.begin(), cols.end(), r) == cols.end()) {
        throw CaseError(at.line, at.col,
                        "missing field '" + r + "' in [" + section_ + "]");
      }
    }
    std::set<std::string> dup(cols.begin(), cols.end());
    if (dup.size() != cols.size())
      throw CaseError(at.line, at.col, "repeated field in [" + section_ + "]");
  }

  bool has_header() const { return !header_.empty(); }
  bool has_column(const std::string& c) const {
    return std::find(header_.begin(), header_.end(), c) != header_.end();
  }

  std::unordered_map<std::string, std::string> read_row(
      const std::vector<std::string>& toks, const Cursor& at) const {
    if (toks.size() != header_.size()) {
      throw CaseError(at.line, at.col,
                      "[" + section_ + "] row has " + std::to_string(toks.size()) +
                          " fields, header has " + std::to_string(header_.size()));
    }
    std::unordered_map<std::string, std::string> row;
    for (size_t i = 0; i < toks.size(); ++i) row[header_[i]] = toks[i];
    return row;
  }

 private:
  std::string section_;
  std::vector<std::string> allowed_;
  std::vector<std::string> required_;
  std::vector<std::string> header_;
};

}  // namespace

Network parse_case(const std::string& text) {
  Network net;
  net.base_mva = 0.0;
  std::string reference_id;

  enum class Section { None, Meta, Substations, Branches, Generators, Loads };
  Section cur = Section::None;

  TableReader subs("substations", {"id", "s_max", "v_min", "v_max"},
                   {"id", "s_max", "v_min", "v_max"});
  TableReader brs("branches",
                  {"id", "from", "to", "g_series", "b_series", "g_shunt",
                   "b_shunt", "s_max"},
                  {"id", "from", "to", "g_series", "b_series", "g_shunt",
                   "b_shunt", "s_max"});
  TableReader gens("generators",
                   {"id", "sub", "p_min", "p_max", "q_min", "q_max", "ramp_up",
                    "ramp_down", "cost", "cost_up", "cost_down", "p_market"},
                   {"id", "sub", "p_min", "p_max", "q_min", "q_max", "ramp_up",
                    "ramp_down", "cost", "cost_up", "cost_down"});
  TableReader lds("loads", {"id", "sub", "p_demand", "pf_tangent", "cost_shed"},
                  {"id", "sub", "p_demand", "pf_tangent"});

  struct RawBranch {
    std::string from, to;
    BranchRecord rec;
    Cursor at;
  };
  struct RawElem {
    std::string sub;
    Cursor at;
  };
  std::vector<RawBranch> raw_branches;
  std::vector<RawElem> raw_gens, raw_loads;

  std::istringstream in(text);
  std::string line;
  Cursor at;
  while (std::getline(in, line)) {
    ++at.line;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;

    if (toks[0].front() == '[') {
      const std::string name = toks[0];
      if (name == "[meta]") {
        cur = Section::Meta;
      } else if (name == "[substations]") {
        cur = Section::Substations;
      } else if (name == "[branches]") {
        cur = Section::Branches;
      } else if (name == "[generators]") {
        cur = Section::Generators;
      } else if (name == "[loads]") {
        cur = Section::Loads;
      } else {
        throw CaseError(at.line, 1, "unknown section " + name);
      }
      continue;
    }

    switch (cur) {
      case Section::None:
        throw CaseError(at.line, 1, "content before any section header");
      case Section::Meta: {
        if (toks.size() != 3 || toks[1] != "=")
          throw CaseError(at.line, 1, "[meta] expects 'key = value'");
        if (toks[0] == "base_mva") {
          net.base_mva = parse_num(toks[2], at);
        } else if (toks[0] == "reference") {
          reference_id = toks[2];
        } else {
          throw CaseError(at.line, 1, "unknown meta key '" + toks[0] + "'");
        }
        break;
      }
      case Section::Substations: {
        if (!subs.has_header()) {
          subs.set_header(toks, at);
          break;
        }
        auto row = subs.read_row(toks, at);
        SubstationRecord s;
        s.id = row["id"];
        s.coupler_limit = parse_num(row["s_max"], at);
        s.v_min = parse_num(row["v_min"], at);
        s.v_max = parse_num(row["v_max"], at);
        net.substations.push_back(std::move(s));
        break;
      }
      case Section::Branches: {
        if (!brs.has_header()) {
          brs.set_header(toks, at);
          break;
        }
        auto row = brs.read_row(toks, at);
        RawBranch rb;
        rb.at = at;
        rb.from = row["from"];
        rb.to = row["to"];
        rb.rec.id = row["id"];
        rb.rec.g_series = parse_num(row["g_series"], at);
        rb.rec.b_series = parse_num(row["b_series"], at);
        rb.rec.g_shunt = parse_num(row["g_shunt"], at);
        rb.rec.b_shunt = parse_num(row["b_shunt"], at);
        rb.rec.s_max = parse_num(row["s_max"], at);
        raw_branches.push_back(std::move(rb));
        break;
      }
      case Section::Generators: {
        if (!gens.has_header()) {
          gens.set_header(toks, at);
          break;
        }
        auto row = gens.read_row(toks, at);
        GeneratorRecord g;
        g.id = row["id"];
        g.p_min = parse_num(row["p_min"], at);
        g.p_max = parse_num(row["p_max"], at);
        g.q_min = parse_num(row["q_min"], at);
        g.q_max = parse_num(row["q_max"], at);
        g.ramp_up = parse_num(row["ramp_up"], at);
        g.ramp_down = parse_num(row["ramp_down"], at);
        g.cost = parse_num(row["cost"], at);
        g.cost_up = parse_num(row["cost_up"], at);
        g.cost_down = parse_num(row["cost_down"], at);
        if (gens.has_column("p_market")) {
          g.p_market = parse_num(row["p_market"], at);
          net.has_market_dispatch = true;
        }
        net.generators.push_back(std::move(g));
        raw_gens.push_back({row["sub"], at});
        break;
      }
      case Section::Loads: {
        if (!lds.has_header()) {
          lds.set_header(toks, at);
          break;
        }
        auto row = lds.read_row(toks, at);
        LoadRecord d;
        d.id = row["id"];
        d.p_demand = parse_num(row["p_demand"], at);
        d.pf_tangent = parse_num(row["pf_tangent"], at);
        d.cost_shed = lds.has_column("cost_shed") ? parse_num(row["cost_shed"], at)
                                                  : 10000.0;
        net.loads.push_back(std::move(d));
        raw_loads.push_back({row["sub"], at});
        break;
      }
    }
  }

  if (net.base_mva <= 0.0) throw CaseError(at.line, 1, "meta base_mva missing");
  if (reference_id.empty()) throw CaseError(at.line, 1, "meta reference missing");

  auto sub_index = [&](const std::string& id, const Cursor& where) {
    const int i = net.substation_index(id);
    if (i < 0)
      throw CaseError(where.line, where.col, "unknown substation '" + id + "'");
    return i;
  };
  for (auto& rb : raw_branches) {
    rb.rec.from = sub_index(rb.from, rb.at);
    rb.rec.to = sub_index(rb.to, rb.at);
    net.branches.push_back(rb.rec);
  }
  for (size_t g = 0; g < raw_gens.size(); ++g)
    net.generators[g].substation = sub_index(raw_gens[g].sub, raw_gens[g].at);
  for (size_t d = 0; d < raw_loads.size(); ++d)
    net.loads[d].substation = sub_index(raw_loads[d].sub, raw_loads[d].at);
  net.reference = net.substation_index(reference_id);
  if (net.reference < 0) throw CaseError(1, 1, "unknown reference substation");

  // Physical units in the file; per-unit inside.
  const double base = net.base_mva;
  for (auto& s : net.substations) s.coupler_limit /= base;
  for (auto& b : net.branches) b.s_max /= base;
  for (auto& g : net.generators) {
    g.p_min /= base;
    g.p_max /= base;
    g.q_min /= base;
    g.q_max /= base;
    g.ramp_up /= base;
    g.ramp_down /= base;
    g.p_market /= base;
  }
  for (auto& d : net.loads) d.p_demand /= base;

  try {
    net.finalize();
  } catch (const std::invalid_argument& e) {
    throw CaseError(at.line, 1, e.what());
  }
  return net;
}

std::string serialize_case(const Network& net) {
  const double base = net.base_mva;
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "[meta]\n";
  os << "base_mva = " << num(net.base_mva) << "\n";
  os << "reference = " << net.substations[net.reference].id << "\n\n";
  os << "[substations]\n";
  os << "id s_max v_min v_max\n";
  for (const auto& s : net.substations)
    os << s.id << " " << num(s.coupler_limit * base) << " " << num(s.v_min) << " "
       << num(s.v_max) << "\n";
  os << "\n[branches]\n";
  os << "id from to g_series b_series g_shunt b_shunt s_max\n";
  for (const auto& b : net.branches)
    os << b.id << " " << net.substations[b.from].id << " "
       << net.substations[b.to].id << " " << num(b.g_series) << " "
       << num(b.b_series) << " " << num(b.g_shunt) << " " << num(b.b_shunt) << " "
       << num(b.s_max * base) << "\n";
  os << "\n[generators]\n";
  os << "id sub p_min p_max q_min q_max ramp_up ramp_down cost cost_up cost_down";
  if (net.has_market_dispatch) os << " p_market";
  os << "\n";
  for (const auto& g : net.generators) {
    os << g.id << " " << net.substations[g.substation].id << " "
       << num(g.p_min * base) << " " << num(g.p_max * base) << " "
       << num(g.q_min * base) << " " << num(g.q_max * base) << " "
       << num(g.ramp_up * base) << " " << num(g.ramp_down * base) << " "
       << num(g.cost) << " " << num(g.cost_up) << " " << num(g.cost_down);
    if (net.has_market_dispatch) os << " " << num(g.p_market * base);
    os << "\n";
  }
  os << "\n[loads]\n";
  os << "id sub p_demand pf_tangent cost_shed\n";
  for (const auto& d : net.loads)
    os << d.id << " " << net.substations[d.substation].id << " "
       << num(d.p_demand * base) << " " << num(d.pf_tangent) << " "
       << num(d.cost_shed) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

std::vector<int> ContingencySet::lines() const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i)
    if (entries[i].kind == ContingencyKind::Line) v.push_back(i);
  return v;
}
std::vector<int> ContingencySet::couplers() const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i)
    if (entries[i].kind == ContingencyKind::Coupler) v.push_back(i);
  return v;
}
std::vector<int> ContingencySet::busbars() const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i)
    if (entries[i].kind == ContingencyKind::BusbarOutage) v.push_back(i);
  return v;
}
std::vector<int> ContingencySet::of_substation(int sub) const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i) {
    const auto& c = entries[i];
    if ((c.kind == ContingencyKind::Coupler ||
         c.kind == ContingencyKind::BusbarOutage) &&
        c.target == sub) {
      v.push_back(i);
    }
  }
  return v;
}
int ContingencySet::find(std::string_view id) const {
  for (int i = 0; i < size(); ++i)
    if (entries[i].id == id) return i;
  return -1;
}

ContingencySet build_contingency_set(const Network& net, bool include_radial_lines,
                                     const KindProbabilities& probs) {
  ContingencySet cs;
  cs.entries.push_back({"normal", ContingencyKind::Normal, -1, Busbar::B1, 1.0});
  for (int e = 0; e < static_cast<int>(net.branches.size()); ++e) {
    if (net.branches[e].is_radial && !include_radial_lines) continue;
    cs.entries.push_back({"line:" + net.branches[e].id, ContingencyKind::Line, e,
                          Busbar::B1, probs.line});
  }
  for (int i = 0; i < net.num_substations(); ++i) {
    cs.entries.push_back({"coupler:" + net.substations[i].id,
                          ContingencyKind::Coupler, i, Busbar::B1, probs.coupler});
  }
  for (int i = 0; i < net.num_substations(); ++i) {
    cs.entries.push_back({"busbar:" + net.substations[i].id + ":b1",
                          ContingencyKind::BusbarOutage, i, Busbar::B1,
                          probs.busbar});
    cs.entries.push_back({"busbar:" + net.substations[i].id + ":b2",
                          ContingencyKind::BusbarOutage, i, Busbar::B2,
                          probs.busbar});
  }
  return cs;
}

// ---------------------------------------------------------------------------

int TopologyAssignment::num_splits() const {
  int k = 0;
  for (auto z : coupler_closed) k += z ? 0 : 1;
  return k;
}

TopologyAssignment initial_topology(const Network& net) {
  TopologyAssignment t;
  t.coupler_closed.assign(net.num_substations(), 1);
  t.line_busbar.assign(net.branches.size(), {0, 0});
  t.gen_busbar.assign(net.generators.size(), 0);
  t.load_busbar.assign(net.loads.size(), 0);
  return t;
}

std::vector<SubstationAssignment> enumerate_assignments(const Network& net, int sub,
                                                        bool split,
                                                        bool apply_symmetry_break) {
  const auto& ends = net.branch_ends_at.at(sub);
  const int nl = static_cast<int>(ends.size());
  const int ng = static_cast<int>(net.gens_at[sub].size());
  const int nd = static_cast<int>(net.loads_at[sub].size());

  std::vector<SubstationAssignment> out;
  if (split && nl < 4) return out;
  if (nl + ng + nd > 24) {
    throw std::invalid_argument("substation too large to enumerate: " +
                                net.substations[sub].id);
  }

  // The lowest branch id among the incident lines is the pinned one.
  int pinned = -1;
  if (apply_symmetry_break && nl > 0) {
    pinned = 0;
    for (int k = 1; k < nl; ++k) {
      if (net.branches[ends[k].first].id < net.branches[ends[pinned].first].id)
        pinned = k;
    }
  }

  const int total_bits = nl + ng + nd;
  for (std::uint64_t mask = 0; mask < (1ull << total_bits); ++mask) {
    SubstationAssignment a;
    a.substation = sub;
    a.coupler_closed = !split;
    a.line_busbar.resize(nl);
    a.gen_busbar.resize(ng);
    a.load_busbar.resize(nd);
    int on_b2 = 0;
    for (int k = 0; k < nl; ++k) {
      a.line_busbar[k] = (mask >> k) & 1;
      on_b2 += a.line_busbar[k];
    }
    for (int k = 0; k < ng; ++k) a.gen_busbar[k] = (mask >> (nl + k)) & 1;
    for (int k = 0; k < nd; ++k) a.load_busbar[k] = (mask >> (nl + ng + k)) & 1;
    if (pinned >= 0 && a.line_busbar[pinned] != 0) continue;
    if (split && (on_b2 < 2 || nl - on_b2 < 2)) continue;
    out.push_back(std::move(a));
  }
  return out;
}

void apply_assignment(const Network& net, const SubstationAssignment& a,
                      TopologyAssignment* topo) {
  const int sub = a.substation;
  topo->coupler_closed[sub] = a.coupler_closed ? 1 : 0;
  const auto& ends = net.branch_ends_at[sub];
  for (size_t k = 0; k < ends.size(); ++k)
    topo->line_busbar[ends[k].first][ends[k].second] = a.line_busbar[k];
  for (size_t k = 0; k < net.gens_at[sub].size(); ++k)
    topo->gen_busbar[net.gens_at[sub][k]] = a.gen_busbar[k];
  for (size_t k = 0; k < net.loads_at[sub].size(); ++k)
    topo->load_busbar[net.loads_at[sub][k]] = a.load_busbar[k];
}

std::string check_topology(const Network& net, const TopologyAssignment& topo,
                           int max_splits) {
  if (topo.num_splits() > max_splits) return "splitting budget exceeded";
  for (int i = 0; i < net.num_substations(); ++i) {
    const auto& ends = net.branch_ends_at[i];
    int on_b2 = 0;
    int pinned = -1;
    for (size_t k = 0; k < ends.size(); ++k) {
      on_b2 += topo.line_busbar[ends[k].first][ends[k].second];
      if (pinned < 0 ||
          net.branches[ends[k].first].id < net.branches[ends[pinned].first].id)
        pinned = static_cast<int>(k);
    }
    const int nl = static_cast<int>(ends.size());
    if (!topo.coupler_closed[i] && (on_b2 < 2 || nl - on_b2 < 2))
      return "substation " + net.substations[i].id +
             " split with fewer than two lines on a busbar";
    if (pinned >= 0 &&
        topo.line_busbar[ends[pinned].first][ends[pinned].second] != 0)
      return "substation " + net.substations[i].id +
             " violates the lowest-line-on-B1 rule";
  }
  return {};
}

}  // namespace scsr
