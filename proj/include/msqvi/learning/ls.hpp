#pragma once

// Least-squares policy evaluation: w = argmin ||Psi w - z||.

#include "msqvi/learning/buffer.hpp"

namespace msqvi {

enum class RankPolicy {
  kError,    // rank deficiency raises SingularityError
  kMinNorm,  // minimum-norm solution in equilibrated coordinates
};

struct LsOptions {
  RankPolicy rank = RankPolicy::kError;
  double rank_tolerance = 1e-10;  // relative to the largest pivot
};

struct LsResult {
  Vector weights;
  double residual_norm = 0;
  Index rank = 0;
};

/// Columns are equilibrated to unit norm before a column-pivoted QR.
inline LsResult ls_solve(const Matrix& psi, const Vector& z, std::size_t player,
                         const LsOptions& opt = {}) {
  if (psi.rows() != z.size()) throw DimensionError("targets", "one per row");
  Vector scale(psi.cols());
  for (Index c = 0; c < psi.cols(); ++c) {
    const double n = psi.col(c).norm();
    scale(c) = n > 0 ? 1.0 / n : 1.0;
  }
  const Matrix a = psi * scale.asDiagonal();
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(opt.rank_tolerance);
  LsResult out;
  out.rank = qr.rank();
  Vector y;
  if (out.rank < psi.cols()) {
    if (opt.rank == RankPolicy::kError)
      throw SingularityError(player, static_cast<long>(out.rank), static_cast<long>(psi.cols()));
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    cod.setThreshold(opt.rank_tolerance);
    y = cod.solve(z);
  } else {
    y = qr.solve(z);
  }
  out.weights = scale.asDiagonal() * y;
  out.residual_norm = (psi * out.weights - z).norm();
  return out;
}

struct LsEvaluation {
  QFunction q;
  double residual_norm = 0;
  Index rank = 0;
};

inline LsEvaluation ls_evaluate(const GameBuffer& buf, const QFunction& q_prev, const GameSpec& spec,
                                const LsOptions& opt = {}) {
  const Regression reg = assemble_regression(buf, spec, q_prev);
  LsResult r = ls_solve(reg.psi, reg.target, q_prev.player(), opt);
  return {QFunction(q_prev.basis(), q_prev.player(), std::move(r.weights)), r.residual_norm, r.rank};
}

}  // namespace msqvi
