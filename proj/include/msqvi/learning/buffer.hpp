#pragma once

// Multi-step game data: each tuple starts with one exploratory step and
// continues with H - 1 steps under the current policies. The tuple records
// the H post-exploration samples with the policies' (clamped) actions.

#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "msqvi/learning/exploration.hpp"
#include "msqvi/plant.hpp"

namespace msqvi {

struct BufferTuple {
  TrackingSample first;                  // (x_b, r_b, a_b)
  std::vector<TrackingSample> on_policy;  // m = 1..H: (x_m, r_m, mu^p(x_m, r_m))
};

struct GameBuffer {
  std::size_t horizon = 1;
  std::vector<BufferTuple> tuples;

  std::size_t size() const { return tuples.size(); }
};

/// Draws a start (x, r) for resettable plants.
using StartSampler = std::function<std::pair<Vector, Vector>(std::mt19937_64&)>;

struct CollectConfig {
  std::size_t horizon = 3;
  std::size_t buffer_size = 48;
  /// Empty: tuples chain along one trajectory (tuple b + 1 starts where
  /// tuple b ended). Otherwise every tuple restarts the plant at a draw.
  StartSampler restart;
};

/// Uniform box sampler for restart mode.
inline StartSampler uniform_start(Index state_dim, Index ref_dim, double half_width) {
  return [=](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    Vector x(state_dim), r(ref_dim);
    for (Index k = 0; k < state_dim; ++k) x(k) = u(rng);
    for (Index k = 0; k < ref_dim; ++k) r(k) = u(rng);
    return std::pair{x, r};
  };
}

inline GameBuffer collect_buffer(Plant& plant, const GameSpec& spec, std::span<const Policy> now,
                                 std::span<const Policy> previous, std::size_t round,
                                 const ExplorationConfig& explore, const CollectConfig& cfg,
                                 std::mt19937_64& rng) {
  if (cfg.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (now.size() != spec.n_players() || previous.size() != spec.n_players())
    throw DimensionError("policies", "one per player");
  GameBuffer buf;
  buf.horizon = cfg.horizon;
  buf.tuples.reserve(cfg.buffer_size);
  for (std::size_t b = 0; b < cfg.buffer_size; ++b) {
    if (cfg.restart) {
      auto [x, r] = cfg.restart(rng);
      plant.reset(x, r);
    }
    auto observe = [&]() {
      const Vector& x = plant.state();
      const Vector& r = plant.reference();
      if (!x.allFinite() || !r.allFinite()) throw DivergenceError(b, "non-finite plant state in tuple");
      return std::pair<Vector, Vector>{x, r};
    };
    BufferTuple t;
    auto [x0, r0] = observe();
    std::vector<Vector> a;
    for (std::size_t i = 0; i < spec.n_players(); ++i)
      a.push_back(explore_action(now, previous, round, x0, r0, i, explore, spec, rng));
    plant.step(a);
    t.first = {std::move(x0), std::move(r0), std::move(a)};
    for (std::size_t m = 1; m <= cfg.horizon; ++m) {
      auto [x, r] = observe();
      auto u = act(now, x, r, spec);
      if (m < cfg.horizon) plant.step(u);
      t.on_policy.push_back({std::move(x), std::move(r), std::move(u)});
    }
    buf.tuples.push_back(std::move(t));
  }
  return buf;
}

/// z_b = l_i(first) + sum_{m=1}^{H-1} gamma^m l_i(on-policy m) + gamma^H Q(on-policy H).
inline double multi_step_target(const BufferTuple& t, const GameSpec& spec, const QFunction& q,
                                std::size_t horizon) {
  const std::size_t i = q.player();
  if (horizon < 1 || horizon > t.on_policy.size()) throw DimensionError("horizon", "beyond tuple");
  double z = stage_cost(spec, i, t.first);
  double disc = 1.0;
  for (std::size_t m = 1; m < horizon; ++m) {
    disc *= spec.discount;
    z += disc * stage_cost(spec, i, t.on_policy[m - 1]);
  }
  disc *= spec.discount;
  return z + disc * q(t.on_policy[horizon - 1]);
}

/// Regression data of one player: rows Phi(first sample), targets z_b.
/// Dimensions are B x K whatever the horizon.
struct Regression {
  Matrix psi;
  Vector target;
};

inline Regression assemble_regression(const GameBuffer& buf, const GameSpec& spec,
                                      const QFunction& q_prev, std::size_t horizon = 0) {
  if (horizon == 0) horizon = buf.horizon;
  const BasisSpec& basis = q_prev.basis();
  Regression reg{Matrix(static_cast<Index>(buf.size()), basis.size()),
                 Vector(static_cast<Index>(buf.size()))};
  for (std::size_t b = 0; b < buf.size(); ++b) {
    const auto row = static_cast<Index>(b);
    reg.psi.row(row) = features(basis, buf.tuples[b].first, q_prev.player()).transpose();
    reg.target(row) = multi_step_target(buf.tuples[b], spec, q_prev, horizon);
  }
  return reg;
}

/// Feature rows only.
inline Matrix feature_matrix(const GameBuffer& buf, const BasisSpec& basis, std::size_t player) {
  Matrix psi(static_cast<Index>(buf.size()), basis.size());
  for (std::size_t b = 0; b < buf.size(); ++b)
    psi.row(static_cast<Index>(b)) = features(basis, buf.tuples[b].first, player).transpose();
  return psi;
}

}  // namespace msqvi
