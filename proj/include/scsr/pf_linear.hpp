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
// Linear AC power-flow machinery: the lossless base solve that produces the
// expansion point, tangent linearization of the quadratic loss terms, and the
// inscribed-polygon relaxation of circular thermal limits.

#ifndef SCSR_PF_LINEAR_HPP_
#define SCSR_PF_LINEAR_HPP_

#include <array>
#include <vector>

#include "scsr/grid.hpp"

namespace scsr {

/// Voltage angles (rad) and squared magnitudes (p.u.^2) at each branch end,
/// taken from a lossless solve. Serves as the loss expansion point.
struct OperatingPoint {
  std::vector<std::array<double, 2>> theta_end;  // [branch][end]
  std::vector<std::array<double, 2>> v_end;
};

/// One affine loss term: value = c0 + c_dtheta*(th_e - th_o) + c_dv*(V_e - V_o)
/// where e is the owning end and o the opposite end of the branch.
struct LossTangent {
  double c0 = 0.0;
  double c_dtheta = 0.0;
  double c_dv = 0.0;

  double value(double dtheta, double dv) const {
    return c0 + c_dtheta * dtheta + c_dv * dv;
  }
};

/// Active/reactive loss tangents for one branch, per end.
struct LossLinearization {
  std::array<LossTangent, 2> active;
  std::array<LossTangent, 2> reactive;
};

/// First-order expansion of the committed quadratic loss model
///   P^L = g_ij ((dtheta)^2 + (dv)^2/4),  Q^L = -b_ij ((dtheta)^2 + (dv)^2/4)
/// around the operating point. Exact at the expansion point; a global
/// under-estimator of the quadratic (tangent to a convex function).
LossLinearization loss_coefficients(const BranchRecord& branch,
                                    const OperatingPoint& op, int branch_index);

/// Zero-loss model (used to bootstrap the expansion point itself).
LossLinearization zero_losses();

/// Inscribed regular polygon replacing P^2 + Q^2 <= S^2. Half-planes are
/// scaled so `a*P + b*Q <= limit` with unit-circle limit 1; the polygon never
/// accepts a point outside the circle.
struct CirclePolygon {
  struct HalfPlane {
    double a, b;
  };
  std::vector<HalfPlane> cuts;

  int segments() const { return static_cast<int>(cuts.size()); }
  double inscribed_radius() const;
  bool accepts(double p, double q, double s_max = 1.0) const;
};

CirclePolygon polygonize(int n_segments);

/// Solves the lossless normal-state power flow at a fixed topology and fixed
/// active dispatch (reactive output free within bounds) and returns the
/// branch-end operating point. Throws std::runtime_error when the dispatch
/// cannot be routed (no shedding slack is available here by design).
OperatingPoint lossless_base_solve(const Network& net,
                                   const TopologyAssignment& topo,
                                   const DispatchSolution& dispatch,
                                   int polygon_segments = 16);

/// Variant with free dispatch and priced shedding: always produces a point
/// for valid case data. Used by the solvers to bootstrap linearizations.
OperatingPoint lossless_opf_point(const Network& net, const TopologyAssignment& topo,
                                  int polygon_segments = 16);

/// Merit-order economic dispatch with reserves at zero: the cheapest dispatch
/// meeting total demand, ignoring the grid.
DispatchSolution economic_dispatch(const Network& net);

}  // namespace scsr

#endif  // SCSR_PF_LINEAR_HPP_
