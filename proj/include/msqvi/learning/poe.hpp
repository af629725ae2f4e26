#pragma once

// Persistence of excitation: lambda_min of (1/B) sum_b Phi_b Phi_b'.

#include "msqvi/learning/buffer.hpp"

namespace msqvi {

enum class PoeScaling {
  kRaw,         // Gram matrix of the features as they are
  kNormalized,  // columns rescaled to unit mean square first
};

inline double poe_lambda_min(const Matrix& psi, PoeScaling scaling = PoeScaling::kRaw) {
  if (psi.rows() == 0) throw DimensionError("buffer", "needs at least one tuple");
  Matrix p = psi;
  if (scaling == PoeScaling::kNormalized) {
    for (Index c = 0; c < p.cols(); ++c) {
      const double rms = p.col(c).norm() / std::sqrt(static_cast<double>(p.rows()));
      if (rms > 0) p.col(c) /= rms;
    }
  }
  const Matrix gram = p.transpose() * p / static_cast<double>(p.rows());
  return Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

struct PoeResult {
  double lambda_min = 0;
  bool passed = false;
};

inline PoeResult poe_check(const GameBuffer& buf, const BasisSpec& basis, std::size_t player,
                           double threshold, PoeScaling scaling = PoeScaling::kRaw) {
  const double l = poe_lambda_min(feature_matrix(buf, basis, player), scaling);
  return {l, l >= threshold};
}

/// Throws ExcitationError when the check fails.
inline double require_poe(const GameBuffer& buf, const BasisSpec& basis, std::size_t player,
                          double threshold, PoeScaling scaling = PoeScaling::kRaw) {
  const PoeResult r = poe_check(buf, basis, player, threshold, scaling);
  if (!r.passed) throw ExcitationError(player, r.lambda_min, threshold);
  return r.lambda_min;
}

}  // namespace msqvi
