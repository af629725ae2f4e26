#pragma once

// Weakly coupled two-player LQ tracking benchmark shared by the unit and
// acceptance tests.

#include <memory>
#include <random>

#include "msqvi/msqvi.hpp"

namespace msqvi::bench {

inline LqGeneratorOptions lq_options(Index state_dim = 2) {
  LqGeneratorOptions o;
  o.state_dim = state_dim;
  o.n_players = 2;
  o.action_dim = 1;
  o.discount = 0.95;
  o.a_norm_cap = 0.9;
  o.input_scale = 0.01;
  o.coupling = 0.1;
  o.reference_norm = 0.9;
  return o;
}

struct LqRun {
  LQGameSpec lq;
  std::shared_ptr<LinearDynamics> dynamics;
  BasisSpec basis;
  EvalConfig cfg;
  std::vector<QFunction> q0;
};

inline LqRun make_lq_run(std::uint64_t game_seed, std::size_t horizon = 3,
                         Backend backend = Backend::kLs, Index state_dim = 2) {
  auto [lq, dyn] = generate_lq_game(lq_options(state_dim), game_seed);
  LqRun run{lq, dyn, BasisSpec::exact_lq(state_dim, state_dim, {1, 1}), {}, {}};
  run.cfg.backend = backend;
  run.cfg.horizon = horizon;
  run.cfg.buffer_size = 48;
  run.cfg.tolerance = 1e-10;
  run.cfg.max_rounds = 2000;
  run.cfg.exploration = ExplorationConfig::symmetric({1, 1}, 1.0);
  run.cfg.restart = uniform_start(state_dim, state_dim, 1.0);
  run.cfg.lp.moment_kind = MomentKind::kBuffer;
  run.q0 = init_q0(run.basis, Q0Profile::uniform(1e3, 2));
  return run;
}

inline MsqviResult learn(const LqRun& run, std::uint64_t rng_seed,
                         const RoundObserver& observer = {}) {
  const Index n = run.lq.game.state_dim;
  DynamicsPlant plant(run.dynamics, Vector::Zero(n), Vector::Zero(n));
  std::mt19937_64 rng(rng_seed);
  return run_msqvi(plant, run.lq.game, run.basis, run.cfg, run.q0, rng, observer);
}

/// Largest absolute entry of the difference between learned and exact gains.
inline double gain_error(const LqRun& run, const MsqviResult& res, const ExactLQSolution& exact) {
  double err = 0;
  for (std::size_t i = 0; i < res.policies.size(); ++i) {
    Matrix k;
    if (!linear_gain_over(res.policies[i], run.basis.signals(), k))
      return std::numeric_limits<double>::infinity();
    err = std::max(err, (k - exact.gains[i]).cwiseAbs().maxCoeff());
  }
  return err;
}

/// a = 0.9, b_1 = b_2 = 0.5, S = 1, R_ii = 1, R_ij = 0.1, tracking a
/// reference with r+ = 0.5 r.
inline LQGameSpec scalar_game(double reference_gain = 0.5) {
  LQGameSpec lq;
  lq.A = Matrix::Constant(1, 1, 0.9);
  lq.B = {Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.5)};
  lq.F = Matrix::Constant(1, 1, reference_gain);
  GameSpec& g = lq.game;
  g.state_dim = 1;
  g.ref_dim = 1;
  g.action_dims = {1, 1};
  g.discount = 0.95;
  g.output_map = Matrix::Identity(1, 1);
  g.state_cost = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
  g.action_cost = {{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.1)},
                   {Matrix::Constant(1, 1, 0.1), Matrix::Constant(1, 1, 1.0)}};
  g.action_bounds = {ActionBounds::unbounded(1), ActionBounds::unbounded(1)};
  g.validate();
  return lq;
}

}  // namespace msqvi::bench
