#pragma once

// Linear-programming policy evaluation: maximize c'w subject to
// Phi(first sample)'w <= z_b for every tuple and |w_j| <= W.

#include "msqvi/learning/buffer.hpp"
#include "msqvi/learning/simplex.hpp"

namespace msqvi {

enum class MomentKind {
  kOnes,      // c = 1
  kBuffer,    // c = (1/B) sum_b Phi(first sample)
  kExplicit,  // c supplied in LpOptions::moments
};

struct LpOptions {
  MomentKind moment_kind = MomentKind::kOnes;
  Vector moments;
  double weight_box = 1e9;
  /// Optimize over the row space of Psi only (w = V y). Required when the
  /// features are linearly dependent on the data.
  bool row_space = false;
  double rank_tolerance = 1e-10;
  SimplexOptions simplex;
};

struct LpEvaluation {
  QFunction q;
  double objective = 0;
  double duality_gap = 0;
  std::size_t box_binding = 0;
  std::size_t iterations = 0;
};

inline Vector lp_moments(const LpOptions& opt, const Matrix& psi) {
  switch (opt.moment_kind) {
    case MomentKind::kOnes: return Vector::Ones(psi.cols());
    case MomentKind::kBuffer: return psi.colwise().mean().transpose();
    case MomentKind::kExplicit:
      if (opt.moments.size() != psi.cols()) throw DimensionError("lp.moments", "expected K entries");
      return opt.moments;
  }
  return {};
}

inline LpEvaluation lp_solve(const Matrix& psi, const Vector& z, const BasisSpec& basis,
                             std::size_t player, const LpOptions& opt = {}) {
  if (!(opt.weight_box > 0)) throw ConfigError("weight box must be positive");
  const Vector c = lp_moments(opt, psi);
  Vector scale(psi.cols());
  for (Index k = 0; k < psi.cols(); ++k) {
    const double n = psi.col(k).norm();
    scale(k) = n > 0 ? 1.0 / n : 1.0;
  }
  const Matrix a = psi * scale.asDiagonal();
  const Vector cs = scale.asDiagonal() * c;

  BoxLp lp;
  Matrix back;  // w = back * solution
  if (opt.row_space) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > opt.rank_tolerance * sv(0)) ++rank;
    if (rank == 0) throw SingularityError(player, 0, static_cast<long>(psi.cols()));
    const Matrix v = svd.matrixV().leftCols(rank);
    back = scale.asDiagonal() * v;
    lp = {a * v, z, v.transpose() * cs, Vector::Constant(rank, opt.weight_box)};
  } else {
    back = scale.asDiagonal();
    lp = {a, z, cs, scale.cwiseInverse() * opt.weight_box};
  }
  const LpSolution sol = solve_box_lp(lp, opt.simplex);
  LpEvaluation out{QFunction(basis, player, back * sol.w), sol.objective, sol.duality_gap, 0,
                   sol.iterations};
  if (opt.row_space) {
    out.box_binding = sol.bound_count();
  } else {
    for (Index k = 0; k < out.q.size(); ++k)
      if (std::abs(out.q.weights()(k)) >= opt.weight_box * (1 - 1e-9)) ++out.box_binding;
  }
  return out;
}

inline LpEvaluation lp_evaluate(const GameBuffer& buf, const QFunction& q_prev, const GameSpec& spec,
                                const LpOptions& opt = {}) {
  const Regression reg = assemble_regression(buf, spec, q_prev);
  return lp_solve(reg.psi, reg.target, q_prev.basis(), q_prev.player(), opt);
}

}  // namespace msqvi
