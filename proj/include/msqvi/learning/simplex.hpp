#pragma once

// Dense revised simplex for small box-bounded LPs
//
//   maximize c'w  subject to  A w <= b,  -u <= w <= u   (u finite)
//
// solved through its dual
//
//   minimize b'l + u'(p + q)  subject to  A'l + p - q = c,  l, p, q >= 0.
//
// The dual always has the feasible starting basis {p_k if c_k >= 0 else q_k},
// so no phase 1 is needed. The simplex multipliers of the optimal dual basis
// are the primal solution w.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "msqvi/game.hpp"

namespace msqvi {

struct BoxLp {
  Matrix a;
  Vector b;
  Vector c;
  Vector bound;
};

struct SimplexOptions {
  double optimality_tolerance = 1e-10;
  double pivot_tolerance = 1e-11;
  double feasibility_tolerance = 1e-7;
  std::size_t max_iterations = 200000;
  /// Switch to Bland's rule after this many steps without objective progress.
  std::size_t stall_limit = 50;
};

struct LpSolution {
  Vector w;
  double objective = 0;
  double dual_objective = 0;
  double duality_gap = 0;
  double max_violation = 0;
  std::size_t iterations = 0;
  std::vector<bool> at_bound;

  std::size_t bound_count() const {
    return static_cast<std::size_t>(std::count(at_bound.begin(), at_bound.end(), true));
  }
};

inline LpSolution solve_box_lp(const BoxLp& lp, const SimplexOptions& opt = {}) {
  const Index m = lp.a.rows();
  const Index n = lp.a.cols();
  if (lp.b.size() != m || lp.c.size() != n || lp.bound.size() != n)
    throw DimensionError("lp", "inconsistent sizes");
  if (!lp.a.allFinite() || !lp.b.allFinite() || !lp.c.allFinite())
    throw LpError(LpError::Kind::kNumeric, "non-finite LP data");
  if (!(lp.bound.array() > 0).all() || !lp.bound.allFinite())
    throw LpError(LpError::Kind::kNumeric, "weight box must be finite and positive");

  Matrix a = lp.a;
  Vector b = lp.b;
  for (Index r = 0; r < m; ++r) {
    const double s = std::max(a.row(r).cwiseAbs().maxCoeff(), std::abs(b(r)));
    if (s > 0) {
      a.row(r) /= s;
      b(r) /= s;
    }
  }

  // Dual columns: [0, m) rows of A, [m, m+n) +e_k, [m+n, m+2n) -e_k.
  const Index cols = m + 2 * n;
  auto cost = [&](Index j) { return j < m ? b(j) : lp.bound((j - m) % n); };
  auto column = [&](Index j) -> Vector {
    if (j < m) return a.row(j).transpose();
    Vector e = Vector::Zero(n);
    e((j - m) % n) = j < m + n ? 1.0 : -1.0;
    return e;
  };

  std::vector<Index> basis(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) basis[k] = lp.c(k) >= 0 ? m + k : m + n + k;

  LpSolution out;
  bool bland = false;
  std::size_t stalled = 0;
  double best = std::numeric_limits<double>::infinity();
  Vector pi;
  Vector xb;
  for (;;) {
    if (out.iterations++ >= opt.max_iterations)
      throw LpError(LpError::Kind::kIterationLimit, "simplex iteration limit reached");
    Matrix bm(n, n);
    Vector gb(n);
    for (Index k = 0; k < n; ++k) {
      bm.col(k) = column(basis[k]);
      gb(k) = cost(basis[k]);
    }
    Eigen::PartialPivLU<Matrix> lu(bm);
    xb = lu.solve(lp.c);
    pi = lu.transpose().solve(gb);
    const double obj = gb.dot(xb);
    if (obj < best - 1e-13 * (1 + std::abs(best))) {
      best = obj;
      stalled = 0;
    } else if (++stalled > opt.stall_limit) {
      bland = true;
    }

    // Reduced costs are the primal slacks: b - A pi, u - pi, u + pi.
    const Vector slack_rows = b - a * pi;
    Index entering = -1;
    double most = 0;
    for (Index j = 0; j < cols; ++j) {
      double d;
      if (j < m) d = slack_rows(j);
      else if (j < m + n) d = lp.bound(j - m) - pi(j - m);
      else d = lp.bound(j - m - n) + pi(j - m - n);
      const double scaled = d / (1.0 + std::abs(cost(j)));
      if (scaled >= -opt.optimality_tolerance) continue;
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (scaled < most) {
        most = scaled;
        entering = j;
      }
    }
    if (entering < 0) break;

    const Vector dir = lu.solve(column(entering));
    const double dmax = dir.cwiseAbs().maxCoeff();
    Index leave = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
      if (dir(k) <= opt.pivot_tolerance * std::max(1.0, dmax)) continue;
      const double t = std::max(xb(k), 0.0) / dir(k);
      const bool better =
          t < theta - 1e-14 ||
          (t <= theta + 1e-14 && leave >= 0 &&
           (bland ? basis[k] < basis[leave] : dir(k) > dir(leave)));
      if (leave < 0 || better) {
        theta = std::min(theta, t);
        leave = k;
      }
    }
    if (leave < 0) throw LpError(LpError::Kind::kInfeasible, "constraints admit no feasible weights");
    basis[leave] = entering;
  }

  out.w = pi;
  out.objective = lp.c.dot(pi);
  out.dual_objective = 0;
  for (Index k = 0; k < n; ++k) out.dual_objective += cost(basis[k]) * std::max(xb(k), 0.0);
  out.duality_gap = std::abs(out.dual_objective - out.objective);
  double viol = 0;
  for (Index r = 0; r < m; ++r)
    viol = std::max(viol, (lp.a.row(r).dot(pi) - lp.b(r)) / (1.0 + std::abs(lp.b(r))));
  for (Index k = 0; k < n; ++k) viol = std::max(viol, (std::abs(pi(k)) - lp.bound(k)) / lp.bound(k));
  out.max_violation = viol;
  if (viol > opt.feasibility_tolerance)
    throw LpError(LpError::Kind::kNumeric, "primal solution violates constraints", out.duality_gap);
  if (out.duality_gap > 1e-6 * (1.0 + std::abs(out.objective)))
    throw LpError(LpError::Kind::kNumeric, "duality gap above tolerance", out.duality_gap);
  out.at_bound.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) out.at_bound[k] = std::abs(pi(k)) >= lp.bound(k) * (1 - 1e-9);
  return out;
}

}  // namespace msqvi
