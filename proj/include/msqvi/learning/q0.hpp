#pragma once

// Initial Q-functions: X' W0 X with W0 = base * I and the own-action
// diagonal multiplied by a per-player factor.

#include <vector>

#include "msqvi/qfunction.hpp"

namespace msqvi {

struct Q0Profile {
  double base = 1.0;
  std::vector<double> own_action_multiplier;  // one per player

  /// Own-action weights 1e5 and 1e8 times the rest.
  static Q0Profile glucose(double base = 1.0) { return {base, {1e5, 1e8}}; }
  static Q0Profile uniform(double base, std::size_t players) {
    return {base, std::vector<double>(players, 1.0)};
  }
};

inline QFunction init_q0(const BasisSpec& basis, std::size_t player, const Q0Profile& profile) {
  if (profile.own_action_multiplier.size() != basis.n_players())
    throw DimensionError("q0.own_action_multiplier", "one per player");
  const double mult = profile.own_action_multiplier[player];
  if (!(profile.base > 0) || !(mult > 0)) throw ConfigError("Q0 scales must be positive");
  Matrix w = profile.base * Matrix::Identity(basis.lifted_dim(), basis.lifted_dim());
  const Index off = basis.action_offset(player, player);
  for (Index k = 0; k < basis.action_dims()[player]; ++k) w(off + k, off + k) *= mult;
  if (!is_spd(w)) throw ConfigError("Q0 matrix is not positive definite");
  return QFunction::from_matrix(basis, player, w);
}

inline std::vector<QFunction> init_q0(const BasisSpec& basis, const Q0Profile& profile) {
  std::vector<QFunction> out;
  for (std::size_t i = 0; i < basis.n_players(); ++i) out.push_back(init_q0(basis, i, profile));
  return out;
}

}  // namespace msqvi
