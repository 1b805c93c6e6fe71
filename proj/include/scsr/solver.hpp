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

#ifndef SCSR_SOLVER_HPP_
#define SCSR_SOLVER_HPP_

#include <functional>
#include <vector>

#include "scsr/linear_model.hpp"

namespace scsr {

struct SolveOptions {
  double rel_gap = 0.01;       // MILP relative optimality gap
  double time_limit = 600.0;   // seconds
  double feas_tol = 1e-8;      // IPM convergence tolerance
  long max_nodes = 1'000'000'000;
  bool lazy_rows = true;       // solve with a growing active-row working set
  // Binary values used to seed the branch-and-bound incumbent. Ignored when
  // empty or when the induced LP restriction is infeasible.
  std::vector<double> warm_binaries;
  // Invoked whenever the incumbent or the global bound improves:
  // (seconds, incumbent objective, best bound).
  std::function<void(double, double, double)> progress;
};

/// Solves a pure LP. Requires the model to contain no binary variables.
/// On Optimal, row_duals holds shadow prices d(objective)/d(rhs).
SolveResult solve_lp(const LinearModel& m, const SolveOptions& opt = {});

/// Branch & bound over the model's binary variables.
SolveResult solve_milp(const LinearModel& m, const SolveOptions& opt = {});
SolveResult solve_milp(const LinearModel& m, double rel_gap, double time_limit);

/// Fixes every binary to the rounded value from `binaries` (indexed by
/// variable id; non-binaries ignored) and solves the LP restriction.
SolveResult solve_fixed_lp(const LinearModel& m, const std::vector<double>& binaries,
                           const SolveOptions& opt = {});

}  // namespace scsr

#endif  // SCSR_SOLVER_HPP_
