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

#ifndef SCSR_SRC_LP_INTERNAL_HPP_
#define SCSR_SRC_LP_INTERNAL_HPP_

#include <cstdint>
#include <vector>

#include "scsr/linear_model.hpp"
#include "scsr/solver.hpp"

namespace scsr::internal {

// Active-row working set reused across repeated solves of the same model
// (branch & bound nodes). Rows only ever enter the set, so bounds obtained
// from any node remain valid.
struct RowPool {
  std::vector<std::uint8_t> active;
  bool initialized = false;
};

// Core LP entry point. `lb_override`/`ub_override` (size num_vars) replace
// the model bounds when non-null; binary markers are ignored. `pool` enables
// lazy row activation when non-null and opt.lazy_rows is set.
SolveResult lp_solve(const LinearModel& m, const double* lb_override,
                     const double* ub_override, const SolveOptions& opt,
                     RowPool* pool);

}  // namespace scsr::internal

#endif  // SCSR_SRC_LP_INTERNAL_HPP_
