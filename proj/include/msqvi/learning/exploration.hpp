#pragma once

// Exploratory actions: a = mu^p + n in round 0, (mu^p + mu^{p-1}) / 2 + n
// afterwards, with n drawn uniformly per coordinate.

#include <random>
#include <span>
#include <vector>

#include "msqvi/policy.hpp"

namespace msqvi {

/// Componentwise interval [lo, hi] of the additive exploration noise.
struct NoiseRange {
  Vector lo;
  Vector hi;

  static NoiseRange uniform(Index dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  }
  void validate() const {
    if (lo.size() != hi.size()) throw DimensionError("noise range");
    if ((lo.array() > hi.array()).any()) throw ConfigError("noise range has lo > hi");
  }
};

struct ExplorationConfig {
  std::vector<NoiseRange> noise;  // one per player

  /// Insulin/glucagon defaults: [1e-3, 5e-3] and [1e-5, 5e-5].
  static ExplorationConfig glucose() {
    return {{NoiseRange::uniform(1, 1e-3, 5e-3), NoiseRange::uniform(1, 1e-5, 5e-5)}};
  }
  static ExplorationConfig symmetric(const std::vector<Index>& dims, double half_width) {
    ExplorationConfig c;
    for (Index m : dims) c.noise.push_back(NoiseRange::uniform(m, -half_width, half_width));
    return c;
  }
  void validate(const GameSpec& spec) const {
    if (noise.size() != spec.n_players()) throw DimensionError("exploration.noise", "one per player");
    for (std::size_t i = 0; i < noise.size(); ++i) {
      noise[i].validate();
      if (noise[i].lo.size() != spec.action_dims[i])
        throw DimensionError("exploration.noise[" + std::to_string(i) + "]");
    }
  }
};

inline Vector draw_noise(const NoiseRange& range, std::mt19937_64& rng) {
  Vector n(range.lo.size());
  for (Index k = 0; k < n.size(); ++k) {
    const double lo = range.lo(k), hi = range.hi(k);
    n(k) = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return n;
}

/// Clamped exploratory action of `player` at (x, r) in round `round`.
inline Vector explore_action(std::span<const Policy> now, std::span<const Policy> previous,
                             std::size_t round, const Vector& x, const Vector& r,
                             std::size_t player, const ExplorationConfig& cfg,
                             const GameSpec& spec, std::mt19937_64& rng) {
  Vector base = now[player](x, r);
  if (round > 0) base = (base + previous[player](x, r)) / 2.0;
  return spec.action_bounds[player].clamp(base + draw_noise(cfg.noise[player], rng));
}

}  // namespace msqvi
