#pragma once

#include <utility>

#include "msqvi/basis.hpp"

namespace msqvi {

/// Q_i(z) = Phi_i(z)' w for one player. Stores only the parametric part; the
/// approximation error has no runtime representation.
class QFunction {
 public:
  QFunction() = default;
  QFunction(BasisSpec basis, std::size_t player, Vector weights)
      : basis_(std::move(basis)), player_(player), weights_(std::move(weights)) {
    if (player_ >= basis_.n_players()) throw DimensionError("player", "index out of range");
    if (weights_.size() != basis_.size())
      throw DimensionError("weights", "expected K = " + std::to_string(basis_.size()));
  }

  static QFunction zero(const BasisSpec& basis, std::size_t player) {
    return QFunction(basis, player, Vector::Zero(basis.size()));
  }

  /// Builds Q from the symmetric matrix W of X' W X.
  static QFunction from_matrix(const BasisSpec& basis, std::size_t player, const Matrix& w) {
    if (w.rows() != basis.lifted_dim()) throw DimensionError("matrix", "expected d x d");
    return QFunction(basis, player, matrix_to_weights(w));
  }

  const BasisSpec& basis() const { return basis_; }
  std::size_t player() const { return player_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }

  double operator()(const TrackingSample& sample) const {
    return features(basis_, sample, player_).dot(weights_);
  }
  double value_lifted(const Vector& lifted) const { return monomials(lifted).dot(weights_); }

  /// Reconstructed symmetric W.
  Matrix matrix() const { return weights_to_matrix(weights_, basis_.lifted_dim()); }

 private:
  BasisSpec basis_;
  std::size_t player_ = 0;
  Vector weights_;
};

inline double q_eval(const QFunction& q, const TrackingSample& sample, std::size_t player) {
  if (player != q.player()) throw DimensionError("player", "Q-function belongs to another player");
  return q(sample);
}

}  // namespace msqvi
