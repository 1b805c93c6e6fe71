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
// Comparison heuristics: single-flip local search from the initial topology
// and the substation-at-a-time sequential sweep.

#ifndef SCSR_BASELINES_HPP_
#define SCSR_BASELINES_HPP_

#include "scsr/scsr_model.hpp"

namespace scsr {

struct BaselineOptions {
  int max_iterations = 200;  // accepted moves (1-Opt) or sweeps (Seq)
  double time_limit = 600.0;
  int workers = 1;
  double mp_gap = 1e-6;  // Seq-H substation masters
};

struct BaselineResult {
  SolutionBundle bundle;
  RunTrace trace;
};

/// Flips one topology binary at a time, accepting the best improving flip,
/// until no move improves. Flip candidates respect the splitting budget, the
/// two-lines-per-busbar rule and the symmetry pin; each is priced by the LP
/// restriction of the full model.
BaselineResult run_one_opt(const Network& net, const ContingencySet& cs,
                           const ModelConfig& mc, const ObjectiveConfig& oc,
                           const BaselineOptions& opt = {});

/// Re-optimizes one substation at a time in the given order (ascending id
/// when empty), refreshing the dispatch after each step, until a full sweep
/// brings no improvement.
BaselineResult run_seq(const Network& net, const ContingencySet& cs,
                       const ModelConfig& mc, const ObjectiveConfig& oc,
                       std::vector<int> order = {},
                       const BaselineOptions& opt = {});

}  // namespace scsr

#endif  // SCSR_BASELINES_HPP_
