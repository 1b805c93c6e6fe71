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

#ifndef SCSR_LINEAR_MODEL_HPP_
#define SCSR_LINEAR_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scsr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { Le, Eq, Ge };

enum class SolveStatus : std::uint8_t {
  Optimal,
  Feasible,   // incumbent found, optimality not proven
  Infeasible,
  Unbounded,
  TimeLimit,  // limit hit; incumbent present iff x is non-empty
  Error,
};

const char* to_string(SolveStatus s);

struct LinTerm {
  int var;
  double coef;
};

/// Affine expression used while assembling models. Terms may repeat;
/// LinearModel::add_row compresses them.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}

  static LinExpr term(int var, double coef = 1.0) {
    LinExpr e;
    e.add(var, coef);
    return e;
  }

  LinExpr& add(int var, double coef) {
    if (coef != 0.0) terms.push_back({var, coef});
    return *this;
  }
  LinExpr& add(const LinExpr& other, double scale = 1.0) {
    constant += scale * other.constant;
    for (const auto& t : other.terms) add(t.var, scale * t.coef);
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other) { return add(other); }
  LinExpr& operator-=(const LinExpr& other) { return add(other, -1.0); }
  LinExpr& operator+=(double c) {
    constant += c;
    return *this;
  }

  bool empty() const { return terms.empty(); }

  double constant = 0.0;
  std::vector<LinTerm> terms;
};

struct VarInfo {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  bool is_binary = false;
};

struct RowInfo {
  std::string name;
  std::vector<LinTerm> terms;  // compressed, sorted by var
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

/// Sparse linear program / mixed-binary program in row form.
/// Objective sense is always minimize. Variable and row ordering is the
/// insertion order, so identical build sequences produce identical models.
class LinearModel {
 public:
  int add_var(std::string_view name, double lb, double ub, bool binary = false);
  int add_binary(std::string_view name) { return add_var(name, 0.0, 1.0, true); }

  int add_row(std::string_view name, LinExpr expr, Sense sense, double rhs);
  /// lo <= expr <= hi as one or two rows (single Eq row when lo == hi).
  void add_range(std::string_view name, const LinExpr& expr, double lo, double hi);

  void set_cost(int var, double c);
  void add_cost(int var, double c);
  /// Adds expr (terms and constant) to the minimization objective.
  void add_cost(const LinExpr& expr);

  void set_bounds(int var, double lb, double ub);
  void fix_var(int var, double value) { set_bounds(var, value, value); }
  void set_row_rhs(int row, double rhs) { rows_.at(row).rhs = rhs; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const { return num_binaries_; }
  bool has_binaries() const { return num_binaries_ > 0; }

  const VarInfo& var(int i) const { return vars_[i]; }
  const RowInfo& row(int i) const { return rows_[i]; }
  const std::vector<VarInfo>& vars() const { return vars_; }
  const std::vector<RowInfo>& rows() const { return rows_; }
  const std::vector<double>& costs() const { return cost_; }
  double cost_constant() const { return cost_constant_; }
  void add_cost_constant(double c) { cost_constant_ += c; }

  /// Value of row i's left-hand side at point x.
  double row_activity(int i, const std::vector<double>& x) const;
  double eval_objective(const std::vector<double>& x) const;

 private:
  std::vector<VarInfo> vars_;
  std::vector<RowInfo> rows_;
  std::vector<double> cost_;
  double cost_constant_ = 0.0;
  int num_binaries_ = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  std::vector<double> x;          // primal values (empty if none)
  double objective = std::numeric_limits<double>::quiet_NaN();
  double best_bound = -kInf;      // MILP dual bound; equals objective for LPs
  std::vector<double> row_duals;  // shadow prices d(obj)/d(rhs); LPs only
  double wall_seconds = 0.0;
  long iterations = 0;            // IPM iterations or B&B nodes
  std::string message;

  bool has_solution() const { return !x.empty(); }
  double gap() const {
    if (!has_solution() || !std::isfinite(best_bound)) return kInf;
    return std::abs(objective - best_bound) /
           std::max(std::abs(objective), 1e-9);
  }
};

}  // namespace scsr

#endif  // SCSR_LINEAR_MODEL_HPP_
