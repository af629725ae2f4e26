#pragma once

// Domain types for N-player discrete-time tracking games.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "msqvi/errors.hpp"

namespace msqvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Componentwise closed box [lo, hi] for one player's action.
struct ActionBounds {
  Vector lo;
  Vector hi;

  static ActionBounds unbounded(Index dim) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Vector::Constant(dim, -inf), Vector::Constant(dim, inf)};
  }
  static ActionBounds uniform(Index dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  }

  Index dim() const { return lo.size(); }
  bool contains(const Vector& u) const {
    return u.size() == lo.size() && (u.array() >= lo.array()).all() &&
           (u.array() <= hi.array()).all();
  }
  Vector clamp(const Vector& u) const { return u.cwiseMax(lo).cwiseMin(hi); }
};

/// Observed (x, r, a_1..a_N) at one time step.
struct TrackingSample {
  Vector state;
  Vector reference;
  std::vector<Vector> actions;
};

/// Symmetric with strictly positive eigenvalues.
inline bool is_spd(const Matrix& m, double tol = 0.0) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if ((m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm())) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > tol;
}

/// Dimensions, discount and costs of an N-player tracking game.
///
/// The tracked output is `output_map * x`, which must have the reference's
/// dimension; state costs act on the error `output_map * x - r`. For
/// full-state tracking `output_map` is the identity.
struct GameSpec {
  Index state_dim = 0;
  Index ref_dim = 0;
  std::vector<Index> action_dims;
  double discount = 0.95;
  Matrix output_map;
  std::vector<Matrix> state_cost;                // S_ii, ref_dim x ref_dim
  std::vector<std::vector<Matrix>> action_cost;  // R_ij, m_j x m_j
  std::vector<ActionBounds> action_bounds;
  /// Set by the plant; admits discount == 1.
  bool stable_reference = false;

  std::size_t n_players() const { return action_dims.size(); }
  Index total_action_dim() const {
    Index s = 0;
    for (Index m : action_dims) s += m;
    return s;
  }

  void validate() const {
    const std::size_t n = n_players();
    if (n == 0) throw ConfigError("game needs at least one player");
    if (state_dim <= 0 || ref_dim <= 0) throw ConfigError("state and reference dims must be positive");
    for (Index m : action_dims)
      if (m <= 0) throw ConfigError("action dims must be positive");
    if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
    if (discount == 1.0 && !stable_reference)
      throw ConfigError("discount = 1 requires an asymptotically stable reference");
    if (output_map.rows() != ref_dim || output_map.cols() != state_dim)
      throw DimensionError("output_map", "expected ref_dim x state_dim");
    if (state_cost.size() != n) throw DimensionError("state_cost", "one matrix per player");
    if (action_cost.size() != n) throw DimensionError("action_cost", "one row per player");
    if (action_bounds.size() != n) throw DimensionError("action_bounds", "one box per player");
    for (std::size_t i = 0; i < n; ++i) {
      const auto pi = std::to_string(i);
      if (state_cost[i].rows() != ref_dim || state_cost[i].cols() != ref_dim)
        throw DimensionError("state_cost[" + pi + "]");
      if (!is_spd(state_cost[i])) throw ConfigError("state_cost[" + pi + "] is not SPD");
      if (action_cost[i].size() != n)
        throw DimensionError("action_cost[" + pi + "]", "row must have N entries");
      for (std::size_t j = 0; j < n; ++j) {
        const auto& r = action_cost[i][j];
        const auto pij = "action_cost[" + pi + "][" + std::to_string(j) + "]";
        if (r.rows() != action_dims[j] || r.cols() != action_dims[j]) throw DimensionError(pij);
        if (!is_spd(r)) throw ConfigError(pij + " is not SPD");
      }
      const auto& b = action_bounds[i];
      if (b.lo.size() != action_dims[i] || b.hi.size() != action_dims[i])
        throw DimensionError("action_bounds[" + pi + "]");
      if ((b.lo.array() > b.hi.array()).any())
        throw ConfigError("action_bounds[" + pi + "] has lo > hi");
    }
  }

  void check_sample(const TrackingSample& s) const {
    if (s.state.size() != state_dim) throw DimensionError("sample.state");
    if (s.reference.size() != ref_dim) throw DimensionError("sample.reference");
    if (s.actions.size() != n_players()) throw DimensionError("sample.actions", "one per player");
    for (std::size_t j = 0; j < s.actions.size(); ++j)
      if (s.actions[j].size() != action_dims[j])
        throw DimensionError("sample.actions[" + std::to_string(j) + "]");
  }
};

/// e = x - r for equal-dimension state and reference.
inline Vector tracking_error(const Vector& state, const Vector& reference) {
  if (state.size() != reference.size())
    throw DimensionError("tracking_error", "state and reference differ in size");
  return state - reference;
}

/// e = C x - r using the game's output map.
inline Vector tracking_error(const GameSpec& spec, const Vector& state, const Vector& reference) {
  if (state.size() != spec.state_dim) throw DimensionError("state");
  if (reference.size() != spec.ref_dim) throw DimensionError("reference");
  return spec.output_map * state - reference;
}

/// l_i = e' S_ii e + sum_j u_j' R_ij u_j.
inline double stage_cost(const GameSpec& spec, std::size_t player, const TrackingSample& s) {
  if (player >= spec.n_players()) throw DimensionError("player", "index out of range");
  spec.check_sample(s);
  const Vector e = tracking_error(spec, s.state, s.reference);
  double cost = e.dot(spec.state_cost[player] * e);
  for (std::size_t j = 0; j < spec.n_players(); ++j)
    cost += s.actions[j].dot(spec.action_cost[player][j] * s.actions[j]);
  return cost;
}

/// Clamps every player's action to its box.
inline std::vector<Vector> clamp_actions(const GameSpec& spec, std::vector<Vector> actions) {
  for (std::size_t j = 0; j < actions.size(); ++j) actions[j] = spec.action_bounds[j].clamp(actions[j]);
  return actions;
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace msqvi
