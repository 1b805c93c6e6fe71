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

#include "scsr/linear_model.hpp"

#include <algorithm>

namespace scsr {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Error: return "error";
  }
  return "unknown";
}

int LinearModel::add_var(std::string_view name, double lb, double ub, bool binary) {
  if (binary && (lb < -1e-12 || ub > 1.0 + 1e-12)) {
    throw std::invalid_argument("binary variable must have bounds within [0,1]: " +
                                std::string(name));
  }
  if (lb > ub) {
    throw std::invalid_argument("variable lower bound exceeds upper bound: " +
                                std::string(name));
  }
  vars_.push_back({std::string(name), lb, ub, binary});
  cost_.push_back(0.0);
  if (binary) ++num_binaries_;
  return static_cast<int>(vars_.size()) - 1;
}

namespace {

std::vector<LinTerm> compress(std::vector<LinTerm> terms, int num_vars) {
  std::sort(terms.begin(), terms.end(),
            [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
  std::vector<LinTerm> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_vars) {
      throw std::out_of_range("row references undeclared variable");
    }
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const LinTerm& t) { return t.coef == 0.0; });
  return out;
}

}  // namespace

int LinearModel::add_row(std::string_view name, LinExpr expr, Sense sense, double rhs) {
  RowInfo r;
  r.name = std::string(name);
  r.terms = compress(std::move(expr.terms), num_vars());
  r.sense = sense;
  r.rhs = rhs - expr.constant;
  rows_.push_back(std::move(r));
  return static_cast<int>(rows_.size()) - 1;
}

void LinearModel::add_range(std::string_view name, const LinExpr& expr, double lo,
                            double hi) {
  if (lo > hi) throw std::invalid_argument("range with lo > hi: " + std::string(name));
  if (lo == hi) {
    add_row(name, expr, Sense::Eq, lo);
    return;
  }
  if (std::isfinite(hi)) add_row(std::string(name) + ".ub", expr, Sense::Le, hi);
  if (std::isfinite(lo)) add_row(std::string(name) + ".lb", expr, Sense::Ge, lo);
}

void LinearModel::set_cost(int var, double c) { cost_.at(var) = c; }

void LinearModel::add_cost(int var, double c) { cost_.at(var) += c; }

void LinearModel::add_cost(const LinExpr& expr) {
  cost_constant_ += expr.constant;
  for (const auto& t : expr.terms) add_cost(t.var, t.coef);
}

void LinearModel::set_bounds(int var, double lb, double ub) {
  if (lb > ub + 1e-12) {
    throw std::invalid_argument("set_bounds with lb > ub on " + vars_.at(var).name);
  }
  vars_.at(var).lb = lb;
  vars_.at(var).ub = std::max(lb, ub);
}

double LinearModel::row_activity(int i, const std::vector<double>& x) const {
  double a = 0.0;
  for (const auto& t : rows_[i].terms) a += t.coef * x[t.var];
  return a;
}

double LinearModel::eval_objective(const std::vector<double>& x) const {
  double o = cost_constant_;
  for (int j = 0; j < num_vars(); ++j) o += cost_[j] * x[j];
  return o;
}

}  // namespace scsr
