/*
 * Copyright 2026 The crisp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Primal-dual interior point method for convex QPs.
//
// Inequalities A_i z >= b_i get slacks s >= 0 with duals lam; bounds use the
// implicit slacks z - l and u - z with duals nl and nu. Each Newton system is
// reduced to the quasi-definite matrix
//
//   [ P + D + rho I   A_e'       A_i'        ] [  dz ]
//   [ A_e            -delta I    0           ] [ -dy ]
//   [ A_i             0         -W - delta I ] [ -dl ]
//
// with D = nl/(z-l) + nu/(u-z) and W = s/lam, factored by a sparse LDL'.

#include <Eigen/SparseCholesky>
#include <Eigen/OrderingMethods>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "backends.hpp"

namespace crisp::detail {
namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

struct ScaledQp {
  SparseMatrix P, Ae, Ai;
  Vector q, be, bi, l, u;
  Vector D, Ee, Ei;
  double c = 1.0;
  std::vector<char> has_l, has_u;
  int n = 0, me = 0, mi = 0;
};

void accumulate_col_norms(const SparseMatrix& m, Vector& norms) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      norms[k] = std::max(norms[k], std::abs(it.value()));
}

Vector row_norms(const SparseMatrix& m) {
  Vector r = Vector::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      r[it.row()] = std::max(r[it.row()], std::abs(it.value()));
  return r;
}

double scale_factor(double norm) {
  if (norm < 1e-10) return 1.0;
  return std::clamp(1.0 / std::sqrt(norm), 1e-4, 1e4);
}

SparseMatrix with_cols(const SparseMatrix& a, int rows, int n) {
  if (a.rows() == 0 || a.cols() != n) return SparseMatrix(rows, n);
  return a;
}

ScaledQp equilibrate(const QpData& qp, int iters) {
  ScaledQp s;
  s.n = qp.n();
  s.me = qp.m_eq();
  s.mi = qp.m_ineq();
  s.P = qp.P;
  s.Ae = with_cols(qp.A_eq, s.me, s.n);
  s.Ai = with_cols(qp.A_ineq, s.mi, s.n);
  s.D = Vector::Ones(s.n);
  s.Ee = Vector::Ones(s.me);
  s.Ei = Vector::Ones(s.mi);

  for (int it = 0; it < iters; ++it) {
    Vector cn = Vector::Zero(s.n);
    accumulate_col_norms(s.P, cn);
    accumulate_col_norms(s.Ae, cn);
    accumulate_col_norms(s.Ai, cn);
    Vector d = cn.unaryExpr(&scale_factor);
    Vector ee = row_norms(s.Ae).unaryExpr(&scale_factor);
    Vector ei = row_norms(s.Ai).unaryExpr(&scale_factor);
    s.P = d.asDiagonal() * s.P * d.asDiagonal();
    s.Ae = ee.asDiagonal() * s.Ae * d.asDiagonal();
    s.Ai = ei.asDiagonal() * s.Ai * d.asDiagonal();
    s.D = s.D.cwiseProduct(d);
    s.Ee = s.Ee.cwiseProduct(ee);
    s.Ei = s.Ei.cwiseProduct(ei);
  }

  Vector pn = Vector::Zero(s.n);
  accumulate_col_norms(s.P, pn);
  const double mean_p = s.n ? pn.mean() : 0.0;
  const double qn = s.n ? s.D.cwiseProduct(qp.q).cwiseAbs().maxCoeff() : 0.0;
  const double cost = std::max(mean_p, qn);
  s.c = cost < 1e-8 ? 1.0 : std::clamp(1.0 / cost, 1e-4, 1e4);

  s.P *= s.c;
  s.q = s.c * s.D.cwiseProduct(qp.q);
  s.be = s.Ee.cwiseProduct(qp.b_eq);
  s.bi = s.Ei.cwiseProduct(qp.b_ineq);
  s.l = qp.lb.cwiseQuotient(s.D);
  s.u = qp.ub.cwiseQuotient(s.D);
  s.has_l.resize(s.n);
  s.has_u.resize(s.n);
  for (int j = 0; j < s.n; ++j) {
    s.has_l[j] = std::isfinite(qp.lb[j]);
    s.has_u[j] = std::isfinite(qp.ub[j]);
  }
  return s;
}

/// Lower-triangular KKT storage with cached symbolic analysis.
class KktSystem {
 public:
  void assemble(const SparseMatrix& P, const SparseMatrix& G, int n_eq_rows) {
    n_ = static_cast<int>(P.rows());
    m_ = static_cast<int>(G.rows());
    m_eq_ = n_eq_rows;
    const int N = n_ + m_;
    std::vector<Triplet> trip;
    trip.reserve(P.nonZeros() + G.nonZeros() + N);
    for (int j = 0; j < N; ++j) trip.emplace_back(j, j, 0.0);
    for (int k = 0; k < P.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(P, k); it; ++it)
        if (it.row() >= it.col()) trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < G.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(G, k); it; ++it)
        trip.emplace_back(n_ + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    K_.resize(N, N);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();

    diag_pos_.assign(N, -1);
    base_diag_ = Vector::Zero(N);
    for (int j = 0; j < N; ++j) {
      const int p = K_.outerIndexPtr()[j];
      diag_pos_[j] = p;  // diagonal is the first entry of each lower column
      base_diag_[j] = K_.valuePtr()[p];
    }

    const bool same = analyzed_ && outer_.size() == static_cast<size_t>(N + 1) &&
                      inner_.size() == static_cast<size_t>(K_.nonZeros()) &&
                      std::equal(outer_.begin(), outer_.end(), K_.outerIndexPtr()) &&
                      std::equal(inner_.begin(), inner_.end(), K_.innerIndexPtr());
    if (!same) {
      ldlt_.analyzePattern(K_);
      outer_.assign(K_.outerIndexPtr(), K_.outerIndexPtr() + N + 1);
      inner_.assign(K_.innerIndexPtr(), K_.innerIndexPtr() + K_.nonZeros());
      analyzed_ = true;
    }
  }

  /// extra_primal: length n added to P's diagonal; extra_dual: length m
  /// subtracted from the dual diagonal.
  bool factor(const Vector& extra_primal, const Vector& extra_dual, double rho, double delta) {
    const int N = n_ + m_;
    reg_ = Vector(N);
    reg_.head(n_).setConstant(rho);
    reg_.tail(m_).setConstant(-delta);
    double* v = K_.valuePtr();
    for (int j = 0; j < n_; ++j) v[diag_pos_[j]] = base_diag_[j] + extra_primal[j] + rho;
    for (int i = 0; i < m_; ++i) v[diag_pos_[n_ + i]] = -extra_dual[i] - delta;
    ldlt_.factorize(K_);
    if (ldlt_.info() != Eigen::Success) return false;
    const Vector& d = ldlt_.vectorD();
    if (!d.allFinite()) return false;
    int pos = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) pos += d[i] > 0.0;
    return pos == n_;
  }

  /// Solves against the regularized factor and refines against the
  /// unregularized matrix.
  bool solve(const Vector& rhs, Vector& x, int refine) const {
    x = ldlt_.solve(rhs);
    if (!x.allFinite()) return false;
    const double rn = rhs.cwiseAbs().maxCoeff();
    for (int k = 0; k < refine; ++k) {
      Vector r = rhs - apply_unregularized(x);
      if (r.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + rn)) break;
      Vector dx = ldlt_.solve(r);
      if (!dx.allFinite()) break;
      x += dx;
    }
    return x.allFinite();
  }

 private:
  Vector apply_unregularized(const Vector& x) const {
    Vector y = Vector::Zero(x.size());
    for (int j = 0; j < K_.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(K_, j); it; ++it) {
        const int i = static_cast<int>(it.row());
        y[i] += it.value() * x[j];
        if (i != j) y[j] += it.value() * x[i];
      }
    return y - reg_.cwiseProduct(x);
  }

  int n_ = 0, m_ = 0, m_eq_ = 0;
  SparseMatrix K_;
  std::vector<int> diag_pos_;
  Vector base_diag_;
  Vector reg_;
  Ldlt ldlt_;
  bool analyzed_ = false;
  std::vector<int> outer_, inner_;
};

SparseMatrix stack_rows(const SparseMatrix& a, const SparseMatrix& b, int n) {
  SparseMatrix out(a.rows() + b.rows(), n);
  std::vector<Triplet> trip;
  trip.reserve(a.nonZeros() + b.nonZeros());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), k, it.value());
  for (int k = 0; k < b.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(b, k); it; ++it)
      trip.emplace_back(static_cast<int>(a.rows() + it.row()), k, it.value());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

struct Iterate {
  Vector z, y, lam, s, nl, nu;
};

QpSolution unscale(const ScaledQp& s, const Iterate& it) {
  QpSolution sol;
  sol.z = s.D.cwiseProduct(it.z);
  sol.y_eq = s.Ee.cwiseProduct(it.y) / s.c;
  sol.y_ineq = s.Ei.cwiseProduct(it.lam) / s.c;
  sol.y_bounds = (it.nl - it.nu).cwiseQuotient(s.D) / s.c;
  return sol;
}

class InteriorPoint final : public QpBackend {
 public:
  std::string_view name() const override { return "reference"; }

  QpSolution solve(const QpData& qp, const QpSettings& st, const QpSolution* warm) override {
    qp.validate();
    const ScaledQp s = equilibrate(qp, st.ruiz_iters);
    const int n = s.n, me = s.me, mi = s.mi;
    const double target = st.tol * kkt_scale(qp);

    const SparseMatrix G = stack_rows(s.Ae, s.Ai, n);
    kkt_.assemble(s.P, G, me);

    Iterate x = initial_point(s, warm);
    int n_comp = mi;
    for (int j = 0; j < n; ++j) n_comp += s.has_l[j] + s.has_u[j];

    QpSolution best;
    bool failed = false;
    int iter = 0;
    double rho = st.reg_primal, delta = st.reg_dual;

    Vector sl(n), su(n);
    for (; iter <= st.max_iter; ++iter) {
      slacks(s, x.z, sl, su);
      const Vector rd = s.P * x.z + s.q - s.Ae.transpose() * x.y - s.Ai.transpose() * x.lam - x.nl + x.nu;
      const Vector re = s.Ae * x.z - s.be;
      const Vector ri = s.Ai * x.z - x.s - s.bi;
      double mu = x.s.dot(x.lam) + sl.dot(x.nl) + su.dot(x.nu);
      mu = n_comp ? mu / n_comp : 0.0;

      QpSolution cur = unscale(s, x);
      cur.kkt = kkt_residuals(qp, cur);
      cur.iterations = iter;
      if (iter == 0 || cur.kkt.max() <= best.kkt.max()) best = cur;
      if (cur.kkt.max() <= target) break;
      if (iter == st.max_iter) break;

      Vector dprim(n), ddual(mi);
      for (int j = 0; j < n; ++j)
        dprim[j] = (s.has_l[j] ? x.nl[j] / sl[j] : 0.0) + (s.has_u[j] ? x.nu[j] / su[j] : 0.0);
      for (int i = 0; i < mi; ++i) ddual[i] = x.s[i] / x.lam[i];
      Vector extra_dual = Vector::Zero(me + mi);
      extra_dual.tail(mi) = ddual;

      bool ok = kkt_.factor(dprim, extra_dual, rho, delta);
      while (!ok && rho < 1e-3) {
        rho *= 100.0;
        delta *= 100.0;
        ok = kkt_.factor(dprim, extra_dual, rho, delta);
      }
      if (!ok) {
        failed = true;
        break;
      }

      // Predictor.
      Vector rs = x.s.cwiseProduct(x.lam);
      Vector rl = sl.cwiseProduct(x.nl);
      Vector ru = su.cwiseProduct(x.nu);
      Direction aff;
      if (!direction(s, x, sl, su, rd, re, ri, rs, rl, ru, st.refine_steps, aff)) {
        failed = true;
        break;
      }
      const double a_aff = step_length(s, x, sl, su, aff, 1.0);
      double sigma = 0.0;
      if (n_comp > 0 && mu > 0.0) {
        double mu_aff = 0.0;
        for (int i = 0; i < mi; ++i) mu_aff += (x.s[i] + a_aff * aff.ds[i]) * (x.lam[i] + a_aff * aff.dlam[i]);
        for (int j = 0; j < n; ++j) {
          if (s.has_l[j]) mu_aff += (sl[j] + a_aff * aff.dz[j]) * (x.nl[j] + a_aff * aff.dnl[j]);
          if (s.has_u[j]) mu_aff += (su[j] - a_aff * aff.dz[j]) * (x.nu[j] + a_aff * aff.dnu[j]);
        }
        mu_aff /= n_comp;
        sigma = std::clamp(std::pow(mu_aff / mu, 3), 0.0, 1.0);
      }

      // Corrector.
      Direction dir;
      if (n_comp > 0) {
        const double sm = sigma * mu;
        for (int i = 0; i < mi; ++i) rs[i] += aff.ds[i] * aff.dlam[i] - sm;
        for (int j = 0; j < n; ++j) {
          rl[j] = s.has_l[j] ? rl[j] + aff.dz[j] * aff.dnl[j] - sm : 0.0;
          ru[j] = s.has_u[j] ? ru[j] - aff.dz[j] * aff.dnu[j] - sm : 0.0;
        }
        if (!direction(s, x, sl, su, rd, re, ri, rs, rl, ru, st.refine_steps, dir)) {
          failed = true;
          break;
        }
      } else {
        dir = aff;
      }
      const double tau = std::max(0.99, 1.0 - mu);
      const double alpha = step_length(s, x, sl, su, dir, tau);
      x.z += alpha * dir.dz;
      x.y += alpha * dir.dy;
      x.lam += alpha * dir.dlam;
      x.s += alpha * dir.ds;
      x.nl += alpha * dir.dnl;
      x.nu += alpha * dir.dnu;
      if (!x.z.allFinite() || !x.lam.allFinite() || !x.s.allFinite()) {
        failed = true;
        break;
      }
    }

    slacks(s, x.z, sl, su);
    if (st.polish) {
      if (auto pol = polish(qp, s, x, sl, su, st.refine_steps)) {
        if (pol->kkt.max() < best.kkt.max()) {
          pol->iterations = iter;
          best = std::move(*pol);
          best.polished = true;
        }
      }
    }
    QpSolution snapped = best;
    snap_bounds(qp, snapped);
    snapped.kkt = kkt_residuals(qp, snapped);
    if (snapped.kkt.max() <= std::max(best.kkt.max(), target)) best = std::move(snapped);
    best.iterations = iter;
    if (best.kkt.max() <= target)
      best.status = QpStatus::Optimal;
    else
      best.status = failed ? QpStatus::NumericalFailure : QpStatus::MaxIter;
    return best;
  }

 private:
  struct Direction {
    Vector dz, dy, dlam, ds, dnl, dnu;
  };

  static void slacks(const ScaledQp& s, const Vector& z, Vector& sl, Vector& su) {
    for (int j = 0; j < s.n; ++j) {
      sl[j] = s.has_l[j] ? z[j] - s.l[j] : 1.0;
      su[j] = s.has_u[j] ? s.u[j] - z[j] : 1.0;
    }
  }

  static Iterate initial_point(const ScaledQp& s, const QpSolution* warm) {
    Iterate x;
    x.z = Vector::Zero(s.n);
    if (warm && warm->z.size() == s.n && warm->z.allFinite()) x.z = warm->z.cwiseQuotient(s.D);
    for (int j = 0; j < s.n; ++j) {
      const bool hl = s.has_l[j], hu = s.has_u[j];
      if (hl && hu) {
        const double w = s.u[j] - s.l[j];
        const double k = std::min(1.0, 0.25 * w);
        x.z[j] = w > 0.0 ? std::clamp(x.z[j], s.l[j] + k, s.u[j] - k) : s.l[j];
      } else if (hl) {
        x.z[j] = std::max(x.z[j], s.l[j] + 1.0);
      } else if (hu) {
        x.z[j] = std::min(x.z[j], s.u[j] - 1.0);
      }
    }
    x.y = Vector::Zero(s.me);
    x.lam = Vector::Ones(s.mi);
    x.s = (s.Ai * x.z - s.bi).cwiseMax(1.0);
    x.nl = Vector::Zero(s.n);
    x.nu = Vector::Zero(s.n);
    for (int j = 0; j < s.n; ++j) {
      if (s.has_l[j]) x.nl[j] = 1.0;
      if (s.has_u[j]) x.nu[j] = 1.0;
    }
    return x;
  }

  bool direction(const ScaledQp& s, const Iterate& x, const Vector& sl, const Vector& su,
                 const Vector& rd, const Vector& re, const Vector& ri, const Vector& rs,
                 const Vector& rl, const Vector& ru, int refine, Direction& d) {
    const int n = s.n, me = s.me, mi = s.mi;
    Vector rhs(n + me + mi);
    for (int j = 0; j < n; ++j) {
      double v = -rd[j];
      if (s.has_l[j]) v -= rl[j] / sl[j];
      if (s.has_u[j]) v += ru[j] / su[j];
      rhs[j] = v;
    }
    rhs.segment(n, me) = -re;
    for (int i = 0; i < mi; ++i) rhs[n + me + i] = -ri[i] - rs[i] / x.lam[i];
    Vector sol;
    if (!kkt_.solve(rhs, sol, refine)) return false;
    d.dz = sol.head(n);
    d.dy = -sol.segment(n, me);
    d.dlam = -sol.tail(mi);
    d.ds = s.Ai * d.dz + ri;
    d.dnl = Vector::Zero(n);
    d.dnu = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (s.has_l[j]) d.dnl[j] = (-rl[j] - x.nl[j] * d.dz[j]) / sl[j];
      if (s.has_u[j]) d.dnu[j] = (-ru[j] + x.nu[j] * d.dz[j]) / su[j];
    }
    return true;
  }

  static double step_length(const ScaledQp& s, const Iterate& x, const Vector& sl, const Vector& su,
                            const Direction& d, double tau) {
    double a = 1.0;
    auto limit = [&](double v, double dv) {
      if (dv < 0.0) a = std::min(a, -tau * v / dv);
    };
    for (int i = 0; i < s.mi; ++i) {
      limit(x.s[i], d.ds[i]);
      limit(x.lam[i], d.dlam[i]);
    }
    for (int j = 0; j < s.n; ++j) {
      if (s.has_l[j]) {
        limit(sl[j], d.dz[j]);
        limit(x.nl[j], d.dnl[j]);
      }
      if (s.has_u[j]) {
        limit(su[j], -d.dz[j]);
        limit(x.nu[j], d.dnu[j]);
      }
    }
    return a;
  }

  /// Solves the equality-constrained QP on the active set guessed from the
  /// final iterate. Entries whose multiplier comes out negative are dropped
  /// and the system is solved again, a few rounds at most.
  std::optional<QpSolution> polish(const QpData& qp, const ScaledQp& s, const Iterate& x,
                                   const Vector& sl, const Vector& su, int refine) {
    const int n = s.n;
    std::vector<int> act_ineq, act_lo, act_up;
    for (int i = 0; i < s.mi; ++i)
      if (x.lam[i] > x.s[i]) act_ineq.push_back(i);
    for (int j = 0; j < n; ++j) {
      if (s.has_l[j] && x.nl[j] > sl[j]) act_lo.push_back(j);
      else if (s.has_u[j] && x.nu[j] > su[j]) act_up.push_back(j);
    }
    const double slack = 1e-9 * std::max(1.0, s.q.cwiseAbs().maxCoeff());
    constexpr int kRounds = 4;
    for (int round = 0; round < kRounds; ++round) {
      Iterate p;
      if (!solve_active(s, act_ineq, act_lo, act_up, refine, p)) return std::nullopt;
      std::vector<int> keep_ineq, keep_lo, keep_up;
      for (int i : act_ineq)
        if (p.lam[i] >= -slack) keep_ineq.push_back(i);
      for (int j : act_lo)
        if (p.nl[j] >= -slack) keep_lo.push_back(j);
      for (int j : act_up)
        if (p.nu[j] >= -slack) keep_up.push_back(j);
      if (keep_ineq.size() != act_ineq.size() || keep_lo.size() != act_lo.size() ||
          keep_up.size() != act_up.size()) {
        act_ineq = std::move(keep_ineq);
        act_lo = std::move(keep_lo);
        act_up = std::move(keep_up);
        continue;
      }
      p.lam = p.lam.cwiseMax(0.0);
      p.nl = p.nl.cwiseMax(0.0);
      p.nu = p.nu.cwiseMax(0.0);
      for (int j : act_lo) p.z[j] = s.l[j];
      for (int j : act_up) p.z[j] = s.u[j];
      for (int j = 0; j < n; ++j) {
        if (s.has_l[j] && p.z[j] < s.l[j] - 1e-9 * (1.0 + std::abs(s.l[j]))) return std::nullopt;
        if (s.has_u[j] && p.z[j] > s.u[j] + 1e-9 * (1.0 + std::abs(s.u[j]))) return std::nullopt;
        if (s.has_l[j]) p.z[j] = std::max(p.z[j], s.l[j]);
        if (s.has_u[j]) p.z[j] = std::min(p.z[j], s.u[j]);
      }
      QpSolution out = unscale(s, p);
      for (int j : act_lo) out.z[j] = qp.lb[j];
      for (int j : act_up) out.z[j] = qp.ub[j];
      out.kkt = kkt_residuals(qp, out);
      return out;
    }
    return std::nullopt;
  }

  /// Equality-constrained KKT solve with the given rows and bounds held active.
  static bool solve_active(const ScaledQp& s, const std::vector<int>& act_ineq, const std::vector<int>& act_lo,
                           const std::vector<int>& act_up, int refine, Iterate& p) {
    const int n = s.n;
    const int m = s.me + static_cast<int>(act_ineq.size() + act_lo.size() + act_up.size());
    std::vector<Triplet> trip;
    trip.reserve(s.Ae.nonZeros() + s.Ai.nonZeros() + act_lo.size() + act_up.size());
    for (int k = 0; k < s.Ae.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s.Ae, k); it; ++it)
        trip.emplace_back(static_cast<int>(it.row()), k, it.value());
    std::vector<int> row_of(s.mi, -1);
    for (size_t a = 0; a < act_ineq.size(); ++a) row_of[act_ineq[a]] = s.me + static_cast<int>(a);
    for (int k = 0; k < s.Ai.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s.Ai, k); it; ++it)
        if (row_of[it.row()] >= 0) trip.emplace_back(row_of[it.row()], k, it.value());
    Vector h(m);
    h.head(s.me) = s.be;
    int r = s.me;
    for (int i : act_ineq) h[r++] = s.bi[i];
    for (int j : act_lo) {
      trip.emplace_back(r, j, 1.0);
      h[r++] = s.l[j];
    }
    for (int j : act_up) {
      trip.emplace_back(r, j, 1.0);
      h[r++] = s.u[j];
    }
    SparseMatrix G(m, n);
    G.setFromTriplets(trip.begin(), trip.end());

    KktSystem sys;
    sys.assemble(s.P, G, m);
    const double reg = 1e-9;
    if (!sys.factor(Vector::Zero(n), Vector::Zero(m), reg, reg)) return false;
    Vector rhs(n + m);
    rhs.head(n) = -s.q;
    rhs.tail(m) = h;
    Vector sol;
    if (!sys.solve(rhs, sol, std::max(refine, 10))) return false;

    p.z = sol.head(n);
    const Vector y = -sol.tail(m);
    p.y = y.head(s.me);
    p.lam = Vector::Zero(s.mi);
    p.s = Vector::Zero(s.mi);
    p.nl = Vector::Zero(n);
    p.nu = Vector::Zero(n);
    r = s.me;
    for (int i : act_ineq) p.lam[i] = y[r++];
    for (int j : act_lo) p.nl[j] = y[r++];
    for (int j : act_up) p.nu[j] = -y[r++];
    return true;
  }

  /// Puts strictly-active bounds exactly on the boundary and projects the
  /// rest into the box.
  static void snap_bounds(const QpData& qp, QpSolution& sol) {
    for (int j = 0; j < qp.n(); ++j) {
      const double yb = sol.y_bounds[j];
      const double dl = sol.z[j] - qp.lb[j];
      const double du = qp.ub[j] - sol.z[j];
      if (std::isfinite(qp.lb[j]) && yb > 0.0 && dl < 1e-7 * (1.0 + std::abs(qp.lb[j])) && yb > 100.0 * dl)
        sol.z[j] = qp.lb[j];
      else if (std::isfinite(qp.ub[j]) && yb < 0.0 && du < 1e-7 * (1.0 + std::abs(qp.ub[j])) && -yb > 100.0 * du)
        sol.z[j] = qp.ub[j];
      sol.z[j] = std::clamp(sol.z[j], qp.lb[j], qp.ub[j]);
    }
  }

  KktSystem kkt_;
};

}  // namespace

std::unique_ptr<QpBackend> make_interior_point_backend() { return std::make_unique<InteriorPoint>(); }

}  // namespace crisp::detail
