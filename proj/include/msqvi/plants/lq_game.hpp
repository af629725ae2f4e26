#pragma once

// Linear-quadratic tracking games and a small nonlinear control-affine game.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>

#include "msqvi/plant.hpp"

namespace msqvi {

/// x+ = A x + sum_i B_i u_i, r+ = F r, with the costs of `game`.
struct LQGameSpec {
  GameSpec game;
  Matrix A;
  std::vector<Matrix> B;
  Matrix F;
};

class LinearDynamics : public Dynamics {
 public:
  explicit LinearDynamics(LQGameSpec lq) : lq_(std::move(lq)) {}

  Index state_dim() const override { return lq_.A.rows(); }
  Index ref_dim() const override { return lq_.F.rows(); }
  Vector step(const Vector& x, std::span<const Vector> actions) const override {
    if (actions.size() != lq_.B.size()) throw DimensionError("actions", "one per player");
    Vector next = lq_.A * x;
    for (std::size_t i = 0; i < actions.size(); ++i) next.noalias() += lq_.B[i] * actions[i];
    return next;
  }
  Vector ref_step(const Vector& r) const override { return lq_.F * r; }
  const LQGameSpec& spec() const { return lq_; }

 private:
  LQGameSpec lq_;
};

inline double spectral_radius(const Matrix& a) {
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

inline double spectral_norm(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

struct LqGeneratorOptions {
  Index state_dim = 2;
  std::size_t n_players = 2;
  Index action_dim = 1;
  double discount = 0.95;
  /// Rejection bound on rho(A).
  double max_spectral_radius = 1.2;
  /// If positive, A is rescaled so that ||A||_2 <= a_norm_cap.
  double a_norm_cap = 0.0;
  /// ||B_i||_2 of every player.
  double input_scale = 0.5;
  /// Weak-coupling knob: multiplies the cross costs R_ij, i != j.
  double coupling = 1.0;
  /// ||F||_2; below 1 gives an asymptotically stable reference.
  double reference_norm = 0.9;
  double action_bound = 1e3;
};

namespace detail {

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = n(rng);
  return m;
}

inline Matrix random_spd(std::mt19937_64& rng, Index dim, double floor) {
  const Matrix m = gaussian(rng, dim, dim);
  return m.transpose() * m / static_cast<double>(dim) + floor * Matrix::Identity(dim, dim);
}

inline Matrix scaled_to_norm(Matrix m, double norm) {
  const double s = spectral_norm(m);
  return s > 0.0 ? Matrix(m * (norm / s)) : m;
}

}  // namespace detail

/// Random LQ tracking game with SPD costs. Same options and seed give the
/// same game.
inline std::pair<LQGameSpec, std::shared_ptr<LinearDynamics>> generate_lq_game(
    const LqGeneratorOptions& opt, std::uint64_t seed) {
  if (opt.state_dim <= 0 || opt.n_players == 0 || opt.action_dim <= 0)
    throw ConfigError("generator dimensions must be positive");
  std::mt19937_64 rng(seed);
  const Index n = opt.state_dim;

  LQGameSpec lq;
  do {
    lq.A = detail::gaussian(rng, n, n) / std::sqrt(static_cast<double>(n));
  } while (spectral_radius(lq.A) > opt.max_spectral_radius);
  if (opt.a_norm_cap > 0.0 && spectral_norm(lq.A) > opt.a_norm_cap)
    lq.A = detail::scaled_to_norm(lq.A, opt.a_norm_cap);
  for (std::size_t i = 0; i < opt.n_players; ++i)
    lq.B.push_back(detail::scaled_to_norm(detail::gaussian(rng, n, opt.action_dim), opt.input_scale));
  lq.F = detail::scaled_to_norm(detail::gaussian(rng, n, n), opt.reference_norm);

  GameSpec& g = lq.game;
  g.state_dim = n;
  g.ref_dim = n;
  g.action_dims.assign(opt.n_players, opt.action_dim);
  g.discount = opt.discount;
  g.output_map = Matrix::Identity(n, n);
  g.stable_reference = spectral_radius(lq.F) < 1.0;
  for (std::size_t i = 0; i < opt.n_players; ++i) {
    g.state_cost.push_back(detail::random_spd(rng, n, 0.5));
    std::vector<Matrix> row;
    for (std::size_t j = 0; j < opt.n_players; ++j) {
      if (i == j) row.push_back(detail::random_spd(rng, opt.action_dim, 0.5));
      else row.push_back(opt.coupling * detail::random_spd(rng, opt.action_dim, 0.1));
    }
    g.action_cost.push_back(std::move(row));
    g.action_bounds.push_back(ActionBounds::uniform(opt.action_dim, -opt.action_bound, opt.action_bound));
  }
  g.validate();
  auto dyn = std::make_shared<LinearDynamics>(lq);
  return {std::move(lq), std::move(dyn)};
}

/// Two-state, two-player control-affine game tracking x1 to a constant
/// setpoint:
///
///   x1+ = 0.8 x1 + 0.2 sin(x2) + 0.3 u2
///   x2+ = 0.9 x2 - 0.1 x1^2 / (1 + x1^2) + (0.5 + 0.1 sin(x1)) u1
///   r+  = r
class NonlinearToyDynamics : public Dynamics {
 public:
  Index state_dim() const override { return 2; }
  Index ref_dim() const override { return 1; }
  Vector step(const Vector& x, std::span<const Vector> u) const override {
    if (x.size() != 2 || u.size() != 2) throw DimensionError("nonlinear toy step");
    Vector next(2);
    next(0) = 0.8 * x(0) + 0.2 * std::sin(x(1)) + 0.3 * u[1](0);
    next(1) = 0.9 * x(1) - 0.1 * x(0) * x(0) / (1.0 + x(0) * x(0)) +
              (0.5 + 0.1 * std::sin(x(0))) * u[0](0);
    return next;
  }
  Vector ref_step(const Vector& r) const override { return r; }

  static GameSpec game(double discount = 0.95) {
    GameSpec g;
    g.state_dim = 2;
    g.ref_dim = 1;
    g.action_dims = {1, 1};
    g.discount = discount;
    g.output_map = Matrix(1, 2);
    g.output_map << 1.0, 0.0;
    g.state_cost = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.5)};
    g.action_cost = {{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.1)},
                     {Matrix::Constant(1, 1, 0.1), Matrix::Constant(1, 1, 2.0)}};
    g.action_bounds = {ActionBounds::uniform(1, -5.0, 5.0), ActionBounds::uniform(1, -5.0, 5.0)};
    return g;
  }
};

}  // namespace msqvi
