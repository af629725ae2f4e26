#pragma once

// Model-based ground truth for LQ tracking games.
//
// Over the lifted vector z_i = [x; r; a_i; a_-i] every Q-function of an LQ
// game is z' P z. With s = [x; r], the lifted dynamics are s+ = M z and a
// linear profile lifts s to z = G s, so H-step evaluation of a profile
// against a terminal P is
//
//   P+ = L + sum_{m=1}^{H-1} g^m T_m' L T_m + g^H T_H' P T_H,
//   T_m = G (M G)^{m-1} M.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "msqvi/plants/lq_game.hpp"

namespace msqvi {

/// Lifted order of player i: [x; r; a_i; a_-i ascending].
inline std::vector<std::size_t> lifted_player_order(std::size_t n_players, std::size_t player) {
  std::vector<std::size_t> order{player};
  for (std::size_t j = 0; j < n_players; ++j)
    if (j != player) order.push_back(j);
  return order;
}

/// Stage cost l_i = z' L z in player i's lifted order.
inline Matrix lifted_stage_cost(const GameSpec& g, std::size_t player) {
  const Index n = g.state_dim, nr = g.ref_dim, s = n + nr;
  const Index d = s + g.total_action_dim();
  Matrix l = Matrix::Zero(d, d);
  const Matrix& c = g.output_map;
  const Matrix& q = g.state_cost[player];
  l.block(0, 0, n, n) = c.transpose() * q * c;
  l.block(0, n, n, nr) = -c.transpose() * q;
  l.block(n, 0, nr, n) = -q * c;
  l.block(n, n, nr, nr) = q;
  Index off = s;
  for (std::size_t j : lifted_player_order(g.n_players(), player)) {
    const Index m = g.action_dims[j];
    l.block(off, off, m, m) = g.action_cost[player][j];
    off += m;
  }
  return l;
}

/// s+ = M z in player i's lifted order.
inline Matrix lifted_transition(const LQGameSpec& lq, std::size_t player) {
  const GameSpec& g = lq.game;
  const Index n = g.state_dim, nr = g.ref_dim, s = n + nr;
  Matrix m = Matrix::Zero(s, s + g.total_action_dim());
  m.block(0, 0, n, n) = lq.A;
  m.block(n, n, nr, nr) = lq.F;
  Index off = s;
  for (std::size_t j : lifted_player_order(g.n_players(), player)) {
    m.block(0, off, n, g.action_dims[j]) = lq.B[j];
    off += g.action_dims[j];
  }
  return m;
}

/// z = G s for the profile of gains (each m_j x (n + nr)).
inline Matrix lifted_profile(const GameSpec& g, std::span<const Matrix> gains, std::size_t player) {
  const Index s = g.state_dim + g.ref_dim;
  Matrix out(s + g.total_action_dim(), s);
  out.topRows(s).setIdentity();
  Index off = s;
  for (std::size_t j : lifted_player_order(g.n_players(), player)) {
    out.middleRows(off, g.action_dims[j]) = gains[j];
    off += g.action_dims[j];
  }
  return out;
}

/// Greedy gain of player i for Q = z' P z with opponents at `gains`.
/// A zero P gives the zero gain.
inline Matrix greedy_gain(const GameSpec& g, const Matrix& p, std::span<const Matrix> gains,
                          std::size_t player) {
  const Index s = g.state_dim + g.ref_dim;
  const Index mi = g.action_dims[player];
  if (p.isZero(0.0)) return Matrix::Zero(mi, s);
  const Index rest = p.rows() - s - mi;
  Matrix others(rest, s);
  Index off = 0;
  for (std::size_t j : lifted_player_order(g.n_players(), player)) {
    if (j == player) continue;
    others.middleRows(off, g.action_dims[j]) = gains[j];
    off += g.action_dims[j];
  }
  const Matrix own = p.block(s, s, mi, mi);
  require_curvature(own, player);
  const Matrix rhs = p.block(s, 0, mi, s) + p.block(s, s + mi, mi, rest) * others;
  return -own.ldlt().solve(rhs);
}

/// H-step evaluation of `gains` against terminal P for player i.
inline Matrix multi_step_update(const LQGameSpec& lq, const Matrix& p, std::span<const Matrix> gains,
                                std::size_t player, std::size_t horizon) {
  const GameSpec& g = lq.game;
  const double gamma = g.discount;
  const Matrix l = lifted_stage_cost(g, player);
  const Matrix m = lifted_transition(lq, player);
  const Matrix lift = lifted_profile(g, gains, player);
  Matrix t = lift * m;
  Matrix out = l;
  double disc = 1.0;
  for (std::size_t k = 1; k < horizon; ++k) {
    disc *= gamma;
    out += disc * t.transpose() * l * t;
    t = lift * (m * t);
  }
  disc *= gamma;
  out += disc * t.transpose() * p * t;
  return 0.5 * (out + out.transpose());
}

struct ExactLQSolution {
  std::vector<Matrix> q_matrices;  // per player, lifted order of that player
  std::vector<Matrix> gains;       // per player, m_i x (n + nr) over [x; r]
  std::size_t iterations = 0;
  double residual = 0;             // last sup-norm weight change
  bool converged = false;
  std::vector<std::vector<Matrix>> history;  // q_matrices after each round, if requested
};

struct ExactIterationOptions {
  std::size_t horizon = 1;
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
  bool keep_history = false;
};

/// Closed-form multi-step Q iteration with Jacobi player updates, starting
/// from `initial` (zero matrices if empty) and mu^{-1} = 0.
inline ExactLQSolution exact_msqvi_lq(const LQGameSpec& lq, std::vector<Matrix> initial,
                                      const ExactIterationOptions& opt) {
  const GameSpec& g = lq.game;
  g.validate();
  const std::size_t n = g.n_players();
  const Index s = g.state_dim + g.ref_dim;
  const Index d = s + g.total_action_dim();
  if (initial.empty()) initial.assign(n, Matrix::Zero(d, d));
  if (initial.size() != n) throw DimensionError("initial", "one matrix per player");

  std::vector<Matrix> gains;
  for (std::size_t i = 0; i < n; ++i) gains.push_back(Matrix::Zero(g.action_dims[i], s));
  auto improve = [&](const std::vector<Matrix>& ps, const std::vector<Matrix>& prev) {
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(greedy_gain(g, ps[i], prev, i));
    return out;
  };

  ExactLQSolution sol;
  std::vector<Matrix> p = std::move(initial);
  gains = improve(p, gains);
  for (sol.iterations = 0; sol.iterations < opt.max_iterations;) {
    std::vector<Matrix> next;
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) {
      next.push_back(multi_step_update(lq, p[i], gains, i, opt.horizon));
      delta = std::max(delta, matrix_to_weights(next[i] - p[i]).cwiseAbs().maxCoeff());
    }
    ++sol.iterations;
    if (!std::isfinite(delta)) throw DivergenceError(sol.iterations, "exact iteration diverged");
    gains = improve(next, gains);
    p = std::move(next);
    if (opt.keep_history) sol.history.push_back(p);
    sol.residual = delta;
    if (delta <= opt.tolerance) {
      sol.converged = true;
      break;
    }
  }
  sol.q_matrices = std::move(p);
  sol.gains = std::move(gains);
  return sol;
}

/// Exact value iteration (H = 1) from Q = 0.
inline ExactLQSolution exact_vi_lq(const LQGameSpec& lq, double tolerance = 1e-12,
                                   std::size_t max_iterations = 100000) {
  ExactIterationOptions opt;
  opt.horizon = 1;
  opt.tolerance = tolerance;
  opt.max_iterations = max_iterations;
  ExactLQSolution sol = exact_msqvi_lq(lq, {}, opt);
  if (!sol.converged)
    throw DivergenceError(sol.iterations, "exact value iteration did not converge; the game is "
                                          "likely outside the weak-coupling class");
  return sol;
}

/// Exact solution as learner-side objects over BasisSpec::exact_lq.
inline std::vector<QFunction> exact_q_functions(const LQGameSpec& lq, const ExactLQSolution& sol) {
  const GameSpec& g = lq.game;
  const BasisSpec basis = BasisSpec::exact_lq(g.state_dim, g.ref_dim, g.action_dims);
  std::vector<QFunction> out;
  for (std::size_t i = 0; i < g.n_players(); ++i)
    out.push_back(QFunction::from_matrix(basis, i, sol.q_matrices[i]));
  return out;
}

inline Profile exact_profile(const LQGameSpec& lq, const std::vector<Matrix>& gains) {
  const GameSpec& g = lq.game;
  const BasisSpec basis = BasisSpec::exact_lq(g.state_dim, g.ref_dim, g.action_dims);
  Profile out;
  for (const Matrix& k : gains) out.push_back(Policy(LinearFeedback{basis.signals(), k}));
  return out;
}

/// l_i(sample) + gamma min_u q(x+, r+, u, mu_-i(x+, r+)) with the true model.
inline double coupled_bellman_apply(const QFunction& q, std::span<const Policy> opponents,
                                    const Dynamics& model, const GameSpec& spec,
                                    const TrackingSample& sample) {
  const std::size_t i = q.player();
  const Vector x = model.step(sample.state, sample.actions);
  const Vector r = model.ref_step(sample.reference);
  const Vector others = opponent_actions(opponents, i, x, r);
  return stage_cost(spec, i, sample) + spec.discount * minimize_own_action(q, x, r, others).second;
}

/// Discounted cost of player i over `steps` steps of the unclamped closed
/// loop u_j = K_j [x; r].
inline double discounted_cost(const LQGameSpec& lq, std::span<const Matrix> gains, std::size_t player,
                              const Vector& x0, const Vector& r0, std::size_t steps) {
  const GameSpec& g = lq.game;
  Vector x = x0, r = r0;
  double total = 0, disc = 1;
  for (std::size_t k = 0; k < steps; ++k) {
    Vector sr(x.size() + r.size());
    sr << x, r;
    TrackingSample smp{x, r, {}};
    for (const Matrix& kj : gains) smp.actions.push_back(kj * sr);
    total += disc * stage_cost(g, player, smp);
    Vector next = lq.A * x;
    for (std::size_t j = 0; j < gains.size(); ++j) next += lq.B[j] * smp.actions[j];
    x = next;
    r = lq.F * r;
    disc *= g.discount;
  }
  return total;
}

}  // namespace msqvi
