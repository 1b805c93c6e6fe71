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
// Self-contained LP backend: primal-dual interior point (Mehrotra
// predictor-corrector) on the regularized augmented KKT system, factored
// with Eigen's sparse LDLT. A light presolve folds singleton rows into
// bounds and substitutes fixed variables; duals of eliminated rows are
// recovered from reduced costs afterwards. Large inequality-heavy models
// are solved over a growing active-row working set.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lp_internal.hpp"

namespace scsr::internal {
namespace {

using Clock = std::chrono::steady_clock;
using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Trip = Eigen::Triplet<double>;

constexpr double kBoxBig = 1e7;  // artificial box for infinite bounds

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Presolve

enum class RowState : std::uint8_t { Kept, DroppedSingleton, DroppedEmpty };

struct Presolved {
  bool infeasible = false;
  std::string message;

  std::vector<double> lb, ub;        // working bounds per original var
  std::vector<std::uint8_t> fixed;   // var substituted by its (equal) bounds
  // Row index that created the currently tightest lower/upper bound of a
  // variable, or -1 when it is the model bound. Used for dual recovery.
  std::vector<int> lb_row, ub_row;
  std::vector<RowState> row_state;
  std::vector<int> singleton_var;    // for DroppedSingleton rows
  std::vector<double> singleton_coef;
  std::vector<int> drop_order;       // singleton rows in elimination order
};

Presolved presolve(const LinearModel& m, const double* lbo, const double* ubo) {
  const int nv = m.num_vars();
  const int nr = m.num_rows();
  Presolved p;
  p.lb.resize(nv);
  p.ub.resize(nv);
  p.fixed.assign(nv, 0);
  p.lb_row.assign(nv, -1);
  p.ub_row.assign(nv, -1);
  p.row_state.assign(nr, RowState::Kept);
  p.singleton_var.assign(nr, -1);
  p.singleton_coef.assign(nr, 0.0);

  for (int j = 0; j < nv; ++j) {
    p.lb[j] = lbo ? lbo[j] : m.var(j).lb;
    p.ub[j] = ubo ? ubo[j] : m.var(j).ub;
    if (p.lb[j] > p.ub[j] + 1e-9) {
      p.infeasible = true;
      p.message = "conflicting bounds on variable " + m.var(j).name;
      return p;
    }
  }

  auto mark_fixed = [&](int j) {
    if (!p.fixed[j] && p.ub[j] - p.lb[j] <= 1e-12) p.fixed[j] = 1;
  };
  for (int j = 0; j < nv; ++j) mark_fixed(j);

  bool changed = true;
  int passes = 0;
  while (changed && passes++ < 25) {
    changed = false;
    for (int r = 0; r < nr; ++r) {
      if (p.row_state[r] != RowState::Kept) continue;
      const RowInfo& row = m.row(r);
      int live_var = -1;
      double live_coef = 0.0;
      int live_count = 0;
      double fixed_part = 0.0;
      for (const auto& t : row.terms) {
        if (p.fixed[t.var]) {
          fixed_part += t.coef * p.lb[t.var];
        } else {
          live_var = t.var;
          live_coef = t.coef;
          if (++live_count > 1) break;
        }
      }
      if (live_count > 1) continue;
      const double rhs = row.rhs - fixed_part;
      if (live_count == 0) {
        const double tol = 1e-7 * (1.0 + std::abs(row.rhs));
        bool ok = true;
        switch (row.sense) {
          case Sense::Le: ok = 0.0 <= rhs + tol; break;
          case Sense::Ge: ok = 0.0 >= rhs - tol; break;
          case Sense::Eq: ok = std::abs(rhs) <= tol; break;
        }
        if (!ok) {
          p.infeasible = true;
          p.message = "row " + row.name + " infeasible after substitution";
          return p;
        }
        p.row_state[r] = RowState::DroppedEmpty;
        changed = true;
        continue;
      }
      // Singleton: fold into a bound.
      const int j = live_var;
      const double v = rhs / live_coef;
      bool as_ub = (row.sense == Sense::Le) == (live_coef > 0.0);
      if (row.sense == Sense::Eq) {
        if (v > p.lb[j] - 1e-9 && v < p.ub[j] + 1e-9) {
          const double w = std::clamp(v, p.lb[j], p.ub[j]);
          p.lb[j] = p.ub[j] = w;
          p.lb_row[j] = p.ub_row[j] = r;
        } else {
          p.infeasible = true;
          p.message = "row " + row.name + " fixes " + m.var(j).name +
                      " outside its bounds";
          return p;
        }
      } else if (as_ub) {
        if (v < p.lb[j] - 1e-9) {
          p.infeasible = true;
          p.message = "row " + row.name + " conflicts with bounds of " +
                      m.var(j).name;
          return p;
        }
        if (v < p.ub[j]) {
          p.ub[j] = std::max(v, p.lb[j]);
          p.ub_row[j] = r;
        }
      } else {
        if (v > p.ub[j] + 1e-9) {
          p.infeasible = true;
          p.message = "row " + row.name + " conflicts with bounds of " +
                      m.var(j).name;
          return p;
        }
        if (v > p.lb[j]) {
          p.lb[j] = std::min(v, p.ub[j]);
          p.lb_row[j] = r;
        }
      }
      p.row_state[r] = RowState::DroppedSingleton;
      p.singleton_var[r] = j;
      p.singleton_coef[r] = live_coef;
      p.drop_order.push_back(r);
      mark_fixed(j);
      changed = true;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Standard form: min c'x  s.t.  A x = b,  l <= x <= u  (slack per inequality)

struct StdForm {
  SpMat A;          // m x n, compressed
  Vec b, c, l, u;
  std::vector<std::uint8_t> has_lb, has_ub;
  std::vector<std::uint8_t> art_lb, art_ub;      // bound is an artificial box
  std::vector<int> col_var;   // std column -> original var (-1 for slacks)
  std::vector<int> var_col;   // original var -> std column (-1 if absent)
  std::vector<int> row_orig;  // std row -> original row index
  int n = 0, mrows = 0;
  double obj_shift = 0.0;     // contribution of fixed variables

  // Boxes unbounded directions at +-1e7; used to classify unboundedness.
  void box_free_directions() {
    for (int j = 0; j < n; ++j) {
      if (!has_lb[j]) {
        l[j] = -kBoxBig;
        has_lb[j] = 1;
        art_lb[j] = 1;
      }
      if (!has_ub[j]) {
        u[j] = kBoxBig;
        has_ub[j] = 1;
        art_ub[j] = 1;
      }
    }
  }
};

StdForm build_std_form(const LinearModel& m, const Presolved& p,
                       const std::vector<std::uint8_t>& row_used) {
  StdForm f;
  const int nv = m.num_vars();
  f.var_col.assign(nv, -1);
  for (int j = 0; j < nv; ++j) {
    if (p.fixed[j]) {
      f.obj_shift += m.costs()[j] * p.lb[j];
    } else {
      f.var_col[j] = f.n++;
      f.col_var.push_back(j);
    }
  }
  std::vector<Trip> trips;
  std::vector<double> bb;
  std::vector<double> cc(f.n, 0.0), ll(f.n), uu(f.n);
  for (int j = 0; j < nv; ++j) {
    const int cjx = f.var_col[j];
    if (cjx < 0) continue;
    cc[cjx] = m.costs()[j];
    ll[cjx] = p.lb[j];
    uu[cjx] = p.ub[j];
  }

  for (int r = 0; r < m.num_rows(); ++r) {
    if (p.row_state[r] != RowState::Kept || !row_used[r]) continue;
    const RowInfo& row = m.row(r);
    double rhs = row.rhs;
    const int std_row = static_cast<int>(bb.size());
    for (const auto& t : row.terms) {
      if (p.fixed[t.var]) {
        rhs -= t.coef * p.lb[t.var];
      } else {
        trips.emplace_back(std_row, f.var_col[t.var], t.coef);
      }
    }
    if (row.sense != Sense::Eq) {
      // a'x + s = rhs with s >= 0 (Le) or s <= 0 (Ge).
      const int scol = static_cast<int>(cc.size());
      trips.emplace_back(std_row, scol, 1.0);
      cc.push_back(0.0);
      if (row.sense == Sense::Le) {
        ll.push_back(0.0);
        uu.push_back(kInf);
      } else {
        ll.push_back(-kInf);
        uu.push_back(0.0);
      }
      f.col_var.push_back(-1);
    }
    bb.push_back(rhs);
    f.row_orig.push_back(r);
  }
  f.n = static_cast<int>(cc.size());
  f.mrows = static_cast<int>(bb.size());

  f.has_lb.assign(f.n, 0);
  f.has_ub.assign(f.n, 0);
  f.art_lb.assign(f.n, 0);
  f.art_ub.assign(f.n, 0);
  for (int j = 0; j < f.n; ++j) {
    f.has_lb[j] = std::isfinite(ll[j]);
    f.has_ub[j] = std::isfinite(uu[j]);
  }

  f.A.resize(f.mrows, f.n);
  f.A.setFromTriplets(trips.begin(), trips.end());
  f.A.makeCompressed();
  f.b = Eigen::Map<Vec>(bb.data(), f.mrows);
  f.c = Eigen::Map<Vec>(cc.data(), f.n);
  f.l = Eigen::Map<Vec>(ll.data(), f.n);
  f.u = Eigen::Map<Vec>(uu.data(), f.n);
  return f;
}

// ---------------------------------------------------------------------------
// Interior point core

enum class IpmStatus { Converged, MaxIter, Numerical };

struct IpmOut {
  IpmStatus status = IpmStatus::Numerical;
  Vec x, y;
  int iterations = 0;
  double rel_p = kInf, rel_d = kInf, rel_g = kInf;
};

struct Scaling {
  Vec row;  // row multipliers
  double cost = 1.0;
};

IpmOut ipm_solve(const StdForm& f0, double tol, int max_iter,
                 double delta0 = 1e-10) {
  // Work on a max-norm equilibrated copy: rows then columns, two passes.
  SpMat A = f0.A;
  Vec b = f0.b, c = f0.c, l = f0.l, u = f0.u;
  Scaling sc;
  sc.row = Vec::Ones(A.rows());
  Vec col_scale = Vec::Ones(A.cols());
  for (int pass = 0; pass < 2; ++pass) {
    Vec rmax = Vec::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it)
        rmax[it.row()] = std::max(rmax[it.row()], std::abs(it.value()));
    for (int i = 0; i < A.rows(); ++i)
      rmax[i] = rmax[i] > 1e-12 ? 1.0 / rmax[i] : 1.0;
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it) it.valueRef() *= rmax[it.row()];
    b = b.cwiseProduct(rmax);
    sc.row = sc.row.cwiseProduct(rmax);
    for (int k = 0; k < A.outerSize(); ++k) {
      double cmax = 0.0;
      for (SpMat::InnerIterator it(A, k); it; ++it)
        cmax = std::max(cmax, std::abs(it.value()));
      if (cmax <= 1e-12 || (cmax >= 0.1 && cmax <= 10.0)) continue;
      const double f = 1.0 / cmax;
      for (SpMat::InnerIterator it(A, k); it; ++it) it.valueRef() *= f;
      // x = dc * x': shrinking the column by f means dc = f.
      col_scale[k] *= f;
      c[k] *= f;
      if (std::isfinite(l[k])) l[k] /= f;
      if (std::isfinite(u[k])) u[k] /= f;
    }
  }
  {
    const double cnorm = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
    sc.cost = cnorm > 1.0 ? 1.0 / cnorm : 1.0;
    c *= sc.cost;
  }

  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  IpmOut out;
  out.x = Vec::Zero(n);
  out.y = Vec::Zero(m);
  if (n == 0) {
    out.status = (b.size() == 0 || b.cwiseAbs().maxCoeff() < 1e-7)
                     ? IpmStatus::Converged
                     : IpmStatus::Numerical;
    return out;
  }

  // Masks select the real bounds; placeholder values keep the element-wise
  // algebra total (contributions are zeroed through zl/zu = 0).
  Vec mlb(n), mub(n), lf(n), uf(n);
  int nbnd = 0;
  for (int j = 0; j < n; ++j) {
    mlb[j] = f0.has_lb[j] ? 1.0 : 0.0;
    mub[j] = f0.has_ub[j] ? 1.0 : 0.0;
    lf[j] = f0.has_lb[j] ? l[j] : 0.0;
    uf[j] = f0.has_ub[j] ? u[j] : 0.0;
    nbnd += f0.has_lb[j] + f0.has_ub[j];
  }

  Vec x(n), zl(n), zu(n);
  for (int j = 0; j < n; ++j) {
    const bool hl = f0.has_lb[j], hu = f0.has_ub[j];
    if (hl && hu) {
      x[j] = 0.5 * (l[j] + u[j]);
      const double margin = std::min(1.0, 0.25 * (u[j] - l[j]));
      x[j] = std::clamp(x[j], l[j] + margin, u[j] - margin);
    } else if (hl) {
      x[j] = l[j] + 1.0 + 0.1 * std::abs(l[j]);
    } else if (hu) {
      x[j] = u[j] - 1.0 - 0.1 * std::abs(u[j]);
    } else {
      x[j] = 0.0;
    }
    zl[j] = hl ? 1.0 : 0.0;
    zu[j] = hu ? 1.0 : 0.0;
  }
  Vec y = Vec::Zero(m);

  // Slack/multiplier products with masked placeholders.
  auto gaps = [&](const Vec& xx, Vec& xl, Vec& xu) {
    xl = (xx - lf).cwiseProduct(mlb) + (Vec::Ones(n) - mlb);
    xu = (uf - xx).cwiseProduct(mub) + (Vec::Ones(n) - mub);
  };

  // KKT = [[-(Theta^-1 + dp), A'],[A, dd I]] lower triangle.
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
  SpMat K(n + m, n + m);
  {
    std::vector<Trip> tr;
    tr.reserve(A.nonZeros() + n + m);
    for (int j = 0; j < n; ++j) tr.emplace_back(j, j, -1.0);
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it)
        tr.emplace_back(n + it.row(), it.col(), it.value());
    for (int i = 0; i < m; ++i) tr.emplace_back(n + i, n + i, 1.0);
    K.setFromTriplets(tr.begin(), tr.end());
    K.makeCompressed();
    ldlt.analyzePattern(K);
  }

  double delta_p = delta0, delta_d = delta0;
  const double bnorm = 1.0 + (m ? b.cwiseAbs().maxCoeff() : 0.0);
  const double cnorm = 1.0 + c.cwiseAbs().maxCoeff();
  int tiny_steps = 0;

  auto set_kkt = [&](const Vec& theta_inv) {
    for (int j = 0; j < n; ++j) K.coeffRef(j, j) = -(theta_inv[j] + delta_p);
    for (int i = 0; i < m; ++i) K.coeffRef(n + i, n + i) = delta_d;
  };

  auto kkt_solve = [&](const Vec& rx, const Vec& ry, Vec& dx, Vec& dy) -> bool {
    Vec rhs(n + m);
    rhs.head(n) = rx;
    rhs.tail(m) = ry;
    Vec sol = ldlt.solve(rhs);
    if (!sol.allFinite()) return false;
    // one step of iterative refinement
    Vec resid = rhs - K.selfadjointView<Eigen::Lower>() * sol;
    if (resid.cwiseAbs().maxCoeff() > 1e-11 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      Vec corr = ldlt.solve(resid);
      if (corr.allFinite()) sol += corr;
    }
    dx = sol.head(n);
    dy = sol.tail(m);
    return true;
  };

  double mu = 1.0;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    Vec xl(n), xu(n);
    gaps(x, xl, xu);
    mu = nbnd ? (zl.dot(xl.cwiseProduct(mlb)) + zu.dot(xu.cwiseProduct(mub))) /
                    nbnd
              : 0.0;

    Vec rp = b - A * x;
    Vec rd = c - A.transpose() * y - zl + zu;
    const double pobj = c.dot(x);
    const double dobj = b.dot(y) + lf.cwiseProduct(mlb).dot(zl) -
                        uf.cwiseProduct(mub).dot(zu);
    out.rel_p = m ? rp.cwiseAbs().maxCoeff() / bnorm : 0.0;
    out.rel_d = rd.cwiseAbs().maxCoeff() / cnorm;
    out.rel_g = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    if (std::getenv("SCSR_IPM_DEBUG")) {
      std::fprintf(stderr, "ipm[%3d] mu=%9.2e rp=%9.2e rd=%9.2e rg=%9.2e\n",
                   out.iterations, mu, out.rel_p, out.rel_d, out.rel_g);
    }
    if (out.rel_p < tol && out.rel_d < tol && out.rel_g < tol * 10.0) {
      out.status = IpmStatus::Converged;
      break;
    }

    Vec theta_inv = (zl.cwiseQuotient(xl).cwiseProduct(mlb) +
                     zu.cwiseQuotient(xu).cwiseProduct(mub))
                        .cwiseMax(0.0);
    set_kkt(theta_inv);
    bool factored = false;
    for (int attempt = 0; attempt < 5 && !factored; ++attempt) {
      ldlt.factorize(K);
      if (ldlt.info() == Eigen::Success) {
        factored = true;
      } else {
        delta_p = std::max(delta_p * 100.0, 1e-8);
        delta_d = std::max(delta_d * 100.0, 1e-8);
        set_kkt(theta_inv);
      }
    }
    if (!factored) {
      out.status = IpmStatus::Numerical;
      return out;
    }

    // Affine (predictor) direction.
    Vec rx = rd + zl - zu;  // = rd - rcl/xl + rcu/xu with rcl=-xl.zl, rcu=-xu.zu
    Vec dx_a(n), dy_a(m);
    if (!kkt_solve(rx, rp, dx_a, dy_a)) {
      out.status = IpmStatus::Numerical;
      return out;
    }
    Vec dzl_a =
        ((-xl.cwiseProduct(zl) - zl.cwiseProduct(dx_a)).cwiseQuotient(xl))
            .cwiseProduct(mlb);
    Vec dzu_a =
        ((-xu.cwiseProduct(zu) + zu.cwiseProduct(dx_a)).cwiseQuotient(xu))
            .cwiseProduct(mub);

    auto max_step_x = [&](const Vec& dx_) {
      double a = 1.0;
      for (int j = 0; j < n; ++j) {
        if (mlb[j] != 0.0 && dx_[j] < 0.0) a = std::min(a, -xl[j] / dx_[j]);
        if (mub[j] != 0.0 && dx_[j] > 0.0) a = std::min(a, xu[j] / dx_[j]);
      }
      return a;
    };
    auto max_step_z = [&](const Vec& z, const Vec& dz) {
      double a = 1.0;
      for (int j = 0; j < n; ++j)
        if (dz[j] < 0.0 && z[j] > 0.0) a = std::min(a, -z[j] / dz[j]);
      return a;
    };
    const double ap_a = max_step_x(dx_a);
    const double ad_a = std::min(max_step_z(zl, dzl_a), max_step_z(zu, dzu_a));
    const double mu_aff =
        nbnd ? ((xl + ap_a * dx_a).cwiseProduct(mlb).dot(zl + ad_a * dzl_a) +
                (xu - ap_a * dx_a).cwiseProduct(mub).dot(zu + ad_a * dzu_a)) /
                   nbnd
             : 0.0;
    double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // Corrector (includes affine residuals).
    Vec rcl = (Vec::Constant(n, sigma * mu) - xl.cwiseProduct(zl) -
               dx_a.cwiseProduct(dzl_a))
                  .cwiseProduct(mlb);
    Vec rcu = (Vec::Constant(n, sigma * mu) - xu.cwiseProduct(zu) +
               dx_a.cwiseProduct(dzu_a))
                  .cwiseProduct(mub);
    rx = rd - rcl.cwiseQuotient(xl) + rcu.cwiseQuotient(xu);
    Vec dx(n), dy(m);
    if (!kkt_solve(rx, rp, dx, dy)) {
      out.status = IpmStatus::Numerical;
      return out;
    }
    Vec dzl = ((rcl - zl.cwiseProduct(dx)).cwiseQuotient(xl)).cwiseProduct(mlb);
    Vec dzu = ((rcu + zu.cwiseProduct(dx)).cwiseQuotient(xu)).cwiseProduct(mub);

    const double eta = 0.99995;
    const double ap = std::min(1.0, eta * max_step_x(dx));
    const double ad =
        std::min(1.0, eta * std::min(max_step_z(zl, dzl), max_step_z(zu, dzu)));
    x += ap * dx;
    y += ad * dy;
    zl += ad * dzl;
    zu += ad * dzu;
    for (int j = 0; j < n; ++j) {  // keep strictly interior
      if (mlb[j] != 0.0) {
        x[j] = std::max(x[j], l[j] + 1e-13);
        zl[j] = std::max(zl[j], 1e-14);
      }
      if (mub[j] != 0.0) {
        x[j] = std::min(x[j], u[j] - 1e-13);
        zu[j] = std::max(zu[j], 1e-14);
      }
    }
    if (mu < 1e-14 && out.rel_p > 1e-5) break;  // stalling on infeasible data
    if (std::abs(pobj) > 1e13) break;           // runaway: unbounded candidate
    // Collapsing steps signal a nearly singular face: lean on regularization,
    // but back off again once progress resumes (large deltas block variables
    // that still have to travel far).
    if (std::max(ap, ad) < 1e-3) {
      if (++tiny_steps >= 3) {
        delta_p = std::min(delta_p * 100.0, 1e-7);
        delta_d = std::min(delta_d * 100.0, 1e-7);
        tiny_steps = 0;
      }
    } else {
      tiny_steps = 0;
      if (std::min(ap, ad) > 0.1) {
        delta_p = std::max(delta_p * 0.1, delta0);
        delta_d = std::max(delta_d * 0.1, delta0);
      }
    }
  }
  if (out.status != IpmStatus::Converged) {
    // Accept slightly degraded accuracy rather than failing outright.
    if (out.rel_p < 1e-6 && out.rel_d < 1e-6 && out.rel_g < 2e-5) {
      out.status = IpmStatus::Converged;
    } else if (out.iterations >= max_iter) {
      out.status = IpmStatus::MaxIter;
    }
  }

  // Undo scaling.
  out.x = x.cwiseProduct(col_scale);
  out.y = (sc.row.cwiseProduct(y)) / sc.cost;
  return out;
}

// ---------------------------------------------------------------------------
// Driver: presolve + row generation + status classification

struct WorkResult {
  IpmOut ipm;
  StdForm form;
  bool ran = false;
};

// Minimal always-feasible LP measuring total constraint violation: every kept
// row gets elastic slacks, variable bounds stay. Used to certify
// infeasibility when the main solve fails to converge.
double elastic_violation(const LinearModel& m, const Presolved& p, double tol,
                         bool* converged) {
  LinearModel e;
  std::vector<int> map(m.num_vars(), -1);
  for (int j = 0; j < m.num_vars(); ++j) {
    const auto& v = m.var(j);
    map[j] = e.add_var(v.name, p.lb[j], p.ub[j], false);
  }
  std::vector<int> elastic;
  for (int r = 0; r < m.num_rows(); ++r) {
    const RowInfo& row = m.row(r);
    LinExpr ex;
    for (const auto& t : row.terms) ex.add(map[t.var], t.coef);
    const int sp = e.add_var("+e", 0.0, kInf, false);
    const int sm = e.add_var("-e", 0.0, kInf, false);
    elastic.push_back(sp);
    elastic.push_back(sm);
    ex.add(sp, -1.0).add(sm, 1.0);
    e.set_cost(sp, 1.0);
    e.set_cost(sm, 1.0);
    e.add_row(row.name, ex, row.sense, row.rhs);
  }
  Presolved pe = presolve(e, nullptr, nullptr);
  if (pe.infeasible) {  // bound conflicts already found by caller's presolve
    *converged = true;
    return kInf;
  }
  std::vector<std::uint8_t> used(e.num_rows(), 1);
  StdForm f = build_std_form(e, pe, used);
  IpmOut o = ipm_solve(f, std::max(tol, 1e-9), 200);
  *converged = o.status == IpmStatus::Converged;
  double viol = 0.0;
  for (int v : elastic) {
    const int col = f.var_col[v];
    viol += col >= 0 ? o.x[col] : pe.lb[v];
  }
  return viol;
}

}  // namespace

SolveResult lp_solve(const LinearModel& m, const double* lb_override,
                     const double* ub_override, const SolveOptions& opt,
                     RowPool* pool) {
  const auto t0 = Clock::now();
  SolveResult res;
  const int nr = m.num_rows();
  const int nv = m.num_vars();

  Presolved p = presolve(m, lb_override, ub_override);
  if (p.infeasible) {
    res.status = SolveStatus::Infeasible;
    res.message = p.message;
    res.wall_seconds = seconds_since(t0);
    return res;
  }

  // Row working set. Equalities and two-term rows always participate;
  // other inequalities activate once violated.
  std::vector<std::uint8_t> used(nr, 0);
  const bool lazy = opt.lazy_rows && pool != nullptr && nr > 4000;
  if (!lazy) {
    std::fill(used.begin(), used.end(), 1);
  } else {
    if (!pool->initialized) {
      pool->active.assign(nr, 0);
      for (int r = 0; r < nr; ++r) {
        const RowInfo& row = m.row(r);
        if (row.sense == Sense::Eq || row.terms.size() <= 2) pool->active[r] = 1;
      }
      pool->initialized = true;
    }
    used = pool->active;
  }

  IpmOut ipm;
  StdForm form;
  long total_iters = 0;
  for (int round = 0;; ++round) {
    form = build_std_form(m, p, used);
    ipm = ipm_solve(form, opt.feas_tol, 200);
    total_iters += ipm.iterations;
    if (ipm.status != IpmStatus::Converged) {
      // Classify: infeasible data, unbounded objective, or numerics.
      bool conv = false;
      const double viol = elastic_violation(m, p, opt.feas_tol, &conv);
      if (conv && viol > 1e-6) {
        res.status = SolveStatus::Infeasible;
        res.message = "total constraint violation " + std::to_string(viol);
        res.iterations = total_iters;
        res.wall_seconds = seconds_since(t0);
        return res;
      }
      // Retry with heavier regularization, then with boxed free directions.
      IpmOut second = ipm_solve(form, opt.feas_tol, 300, 1e-7);
      total_iters += second.iterations;
      bool used_boxed = false;
      StdForm boxed;
      if (second.status != IpmStatus::Converged) {
        boxed = form;
        boxed.box_free_directions();
        used_boxed = true;
        second = ipm_solve(boxed, opt.feas_tol, 300, 1e-8);
        total_iters += second.iterations;
      }
      if (second.status != IpmStatus::Converged) break;
      if (used_boxed) {
        for (int j = 0; j < boxed.n; ++j) {
          const bool at_lo = boxed.art_lb[j] && second.x[j] < -0.9 * kBoxBig;
          const bool at_hi = boxed.art_ub[j] && second.x[j] > 0.9 * kBoxBig;
          if (at_lo || at_hi) {
            res.status = SolveStatus::Unbounded;
            res.message = "objective unbounded along variable " +
                          (boxed.col_var[j] >= 0 ? m.var(boxed.col_var[j]).name
                                                 : std::string("slack"));
            res.iterations = total_iters;
            res.wall_seconds = seconds_since(t0);
            return res;
          }
        }
      }
      ipm = second;  // boxed solve landed strictly inside: valid optimum
    }

    if (!lazy) break;
    // Scan inactive rows for violations at the current point.
    std::vector<double> xfull(nv, 0.0);
    for (int j = 0; j < form.n; ++j)
      if (form.col_var[j] >= 0) xfull[form.col_var[j]] = ipm.x[j];
    for (int j = 0; j < nv; ++j)
      if (p.fixed[j]) xfull[j] = p.lb[j];
    int added = 0;
    for (int r = 0; r < nr; ++r) {
      if (used[r] || p.row_state[r] != RowState::Kept) continue;
      const double act = m.row_activity(r, xfull);
      const RowInfo& row = m.row(r);
      const double tol = 1e-7 * (1.0 + std::abs(row.rhs));
      const bool viol = (row.sense == Sense::Le && act > row.rhs + tol) ||
                        (row.sense == Sense::Ge && act < row.rhs - tol) ||
                        (row.sense == Sense::Eq && std::abs(act - row.rhs) > tol);
      if (viol) {
        used[r] = 1;
        ++added;
      }
    }
    if (added == 0) break;
    if (round > 200) {  // safety: fall back to the full row set
      std::fill(used.begin(), used.end(), 1);
    }
  }
  if (lazy) pool->active = used;
  res.iterations = total_iters;

  if (ipm.status != IpmStatus::Converged) {
    res.status = SolveStatus::Error;
    res.message = "interior point did not converge";
    res.wall_seconds = seconds_since(t0);
    return res;
  }

  // Assemble primal point.
  res.x.assign(nv, 0.0);
  for (int j = 0; j < form.n; ++j)
    if (form.col_var[j] >= 0) res.x[form.col_var[j]] = ipm.x[j];
  for (int j = 0; j < nv; ++j)
    if (p.fixed[j]) res.x[j] = p.lb[j];
  res.objective = m.eval_objective(res.x);
  res.best_bound = res.objective;

  // Row duals: kept rows from the IPM, eliminated singleton rows from
  // reduced costs. Eliminations chain (a fixing row fixes a variable, which
  // turns another row into a singleton), so recovered duals are
  // back-substituted in reverse elimination order.
  res.row_duals.assign(nr, 0.0);
  for (int i = 0; i < form.mrows; ++i) res.row_duals[form.row_orig[i]] = ipm.y[i];
  std::vector<double> rc(m.costs().begin(), m.costs().end());
  for (int r = 0; r < nr; ++r) {
    if (p.row_state[r] != RowState::Kept || !used[r]) continue;
    const double yr = res.row_duals[r];
    if (yr == 0.0) continue;
    for (const auto& t : m.row(r).terms) rc[t.var] -= t.coef * yr;
  }
  std::vector<std::uint8_t> var_claimed(nv, 0);
  for (auto it = p.drop_order.rbegin(); it != p.drop_order.rend(); ++it) {
    const int r = *it;
    const int j = p.singleton_var[r];
    const double a = p.singleton_coef[r];
    const RowInfo& row = m.row(r);
    bool active = false;
    if (row.sense == Sense::Eq) {
      active = (p.lb_row[j] == r || p.ub_row[j] == r);
    } else {
      const double at = 1e-6 * (1.0 + std::abs(res.x[j]));
      if (p.ub_row[j] == r && std::abs(res.x[j] - p.ub[j]) < at) active = true;
      if (p.lb_row[j] == r && std::abs(res.x[j] - p.lb[j]) < at) active = true;
    }
    if (!active || var_claimed[j]) continue;
    double yr = rc[j] / a;
    // Shadow-price sign: <= rows never increase, >= rows never decrease
    // the optimum of a minimization when relaxed.
    if (row.sense == Sense::Le) yr = std::min(yr, 0.0);
    if (row.sense == Sense::Ge) yr = std::max(yr, 0.0);
    res.row_duals[r] = yr;
    var_claimed[j] = 1;
    if (yr != 0.0) {
      for (const auto& t : m.row(r).terms) rc[t.var] -= t.coef * yr;
    }
  }

  res.status = SolveStatus::Optimal;
  res.wall_seconds = seconds_since(t0);
  return res;
}

}  // namespace scsr::internal
