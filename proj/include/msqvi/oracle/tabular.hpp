#pragma once

// Coupled value iteration on rectilinear grids.
//
// The combined signal s = [x; r] lives on a tensor grid; each player's
// scalar action lives on its own 1-D grid. Q_i is a table over (cell,
// joint action). Successor values are read by multilinear interpolation of
// V_i over the grid (points outside are clamped to the boundary), which
// keeps the operator monotone and a gamma-contraction in the sup norm.

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "msqvi/plant.hpp"

namespace msqvi {

inline constexpr std::size_t kMaxTabularCells = 100000;

class TensorGrid {
 public:
  TensorGrid() = default;
  explicit TensorGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
    size_ = 1;
    for (const auto& a : axes_) {
      if (a.empty()) throw ConfigError("grid axes must be nonempty");
      if (!std::is_sorted(a.begin(), a.end()) || std::adjacent_find(a.begin(), a.end()) != a.end())
        throw ConfigError("grid axes must be strictly increasing");
      size_ *= a.size();
    }
  }

  std::size_t size() const { return size_; }
  std::size_t dim() const { return axes_.size(); }
  const std::vector<std::vector<double>>& axes() const { return axes_; }

  /// Row-major: the last axis varies fastest.
  Vector point(std::size_t cell) const {
    Vector p(static_cast<Index>(dim()));
    for (std::size_t k = dim(); k-- > 0;) {
      p(static_cast<Index>(k)) = axes_[k][cell % axes_[k].size()];
      cell /= axes_[k].size();
    }
    return p;
  }

  /// (cell, weight) pairs of the multilinear interpolation stencil.
  std::vector<std::pair<std::size_t, double>> stencil(const Vector& p) const {
    std::vector<std::pair<std::size_t, double>> out{{0, 1.0}};
    for (std::size_t k = 0; k < dim(); ++k) {
      const auto& a = axes_[k];
      const double v = std::clamp(p(static_cast<Index>(k)), a.front(), a.back());
      std::size_t lo = 0;
      double t = 0;
      if (a.size() > 1) {
        lo = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), v) - a.begin());
        lo = std::min(lo == 0 ? 0 : lo - 1, a.size() - 2);
        t = (v - a[lo]) / (a[lo + 1] - a[lo]);
      }
      std::vector<std::pair<std::size_t, double>> next;
      for (auto [c, w] : out) {
        next.push_back({c * a.size() + lo, w * (1 - t)});
        if (t > 0) next.push_back({c * a.size() + lo + 1, w * t});
      }
      out = std::move(next);
    }
    return out;
  }

 private:
  std::vector<std::vector<double>> axes_;
  std::size_t size_ = 0;
};

/// Discretized game with precomputed costs and successor stencils.
class TabularGame {
 public:
  using Step = std::function<Vector(const Vector& s, const std::vector<Vector>& actions)>;
  using Cost = std::function<double(std::size_t player, const Vector& s,
                                    const std::vector<Vector>& actions)>;

  TabularGame(TensorGrid grid, std::vector<std::vector<double>> action_axes, double discount,
              const Step& step, const Cost& cost)
      : grid_(std::move(grid)), actions_(std::move(action_axes)), discount_(discount) {
    joint_ = 1;
    for (const auto& a : actions_) {
      if (a.empty()) throw ConfigError("action grids must be nonempty");
      joint_ *= a.size();
    }
    if (grid_.size() * joint_ > kMaxTabularCells)
      throw ConfigError("tabular game exceeds " + std::to_string(kMaxTabularCells) + " cells");
    const std::size_t n = actions_.size();
    cost_.assign(n, std::vector<double>(grid_.size() * joint_));
    next_.resize(grid_.size() * joint_);
    for (std::size_t c = 0; c < grid_.size(); ++c) {
      const Vector s = grid_.point(c);
      for (std::size_t j = 0; j < joint_; ++j) {
        const auto a = joint_actions(j);
        for (std::size_t i = 0; i < n; ++i) cost_[i][c * joint_ + j] = cost(i, s, a);
        next_[c * joint_ + j] = grid_.stencil(step(s, a));
      }
    }
  }

  /// Grid over [x; r] of a model-visible plant with scalar actions.
  static TabularGame from_model(const Dynamics& model, const GameSpec& spec, TensorGrid grid,
                                std::vector<std::vector<double>> action_axes) {
    const Index n = spec.state_dim;
    auto step = [&model, n](const Vector& s, const std::vector<Vector>& a) {
      Vector out(s.size());
      out << model.step(s.head(n), a), model.ref_step(s.tail(s.size() - n));
      return out;
    };
    auto cost = [&spec, n](std::size_t i, const Vector& s, const std::vector<Vector>& a) {
      return stage_cost(spec, i, {s.head(n), s.tail(s.size() - n), a});
    };
    return TabularGame(std::move(grid), std::move(action_axes), spec.discount, step, cost);
  }

  std::size_t players() const { return actions_.size(); }
  std::size_t cells() const { return grid_.size(); }
  std::size_t joint_actions() const { return joint_; }
  std::size_t table_size() const { return grid_.size() * joint_; }
  double discount() const { return discount_; }
  const TensorGrid& grid() const { return grid_; }
  const std::vector<std::vector<double>>& action_axes() const { return actions_; }
  double cost(std::size_t player, std::size_t entry) const { return cost_[player][entry]; }

  /// Player 0's action index is the most significant digit.
  std::vector<std::size_t> joint_digits(std::size_t j) const {
    std::vector<std::size_t> d(actions_.size());
    for (std::size_t k = actions_.size(); k-- > 0;) {
      d[k] = j % actions_[k].size();
      j /= actions_[k].size();
    }
    return d;
  }
  std::size_t joint_index(const std::vector<std::size_t>& digits) const {
    std::size_t j = 0;
    for (std::size_t k = 0; k < actions_.size(); ++k) j = j * actions_[k].size() + digits[k];
    return j;
  }
  std::vector<Vector> joint_actions(std::size_t j) const {
    const auto d = joint_digits(j);
    std::vector<Vector> a;
    for (std::size_t k = 0; k < d.size(); ++k) a.push_back(Vector::Constant(1, actions_[k][d[k]]));
    return a;
  }

  /// Per player and cell: action index.
  using GridPolicy = std::vector<std::vector<std::size_t>>;

  /// V_i(c) = min over own index of Q_i(c, u, mu_-i(c)).
  std::vector<double> own_min(std::size_t player, std::span<const double> q,
                              const GridPolicy& profile) const {
    std::vector<double> v(cells());
    for (std::size_t c = 0; c < cells(); ++c) {
      std::vector<std::size_t> d(players());
      for (std::size_t k = 0; k < players(); ++k) d[k] = profile[k][c];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < actions_[player].size(); ++u) {
        d[player] = u;
        best = std::min(best, q[c * joint_ + joint_index(d)]);
      }
      v[c] = best;
    }
    return v;
  }

  /// (C_i Q)(c, a) = l_i(c, a) + gamma Interp(V_i)(next(c, a)).
  std::vector<double> apply(std::size_t player, std::span<const double> q,
                            const GridPolicy& profile) const {
    if (q.size() != table_size()) throw DimensionError("table", "size mismatch");
    const auto v = own_min(player, q, profile);
    std::vector<double> out(table_size());
    for (std::size_t e = 0; e < table_size(); ++e) {
      double nv = 0;
      for (auto [c, w] : next_[e]) nv += w * v[c];
      out[e] = cost_[player][e] + discount_ * nv;
    }
    return out;
  }

  /// Greedy response of `player` against `profile` for table q.
  std::vector<std::size_t> greedy(std::size_t player, std::span<const double> q,
                                  const GridPolicy& profile) const {
    std::vector<std::size_t> out(cells());
    for (std::size_t c = 0; c < cells(); ++c) {
      std::vector<std::size_t> d(players());
      for (std::size_t k = 0; k < players(); ++k) d[k] = profile[k][c];
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < actions_[player].size(); ++u) {
        d[player] = u;
        const double val = q[c * joint_ + joint_index(d)];
        if (val < best) {
          best = val;
          out[c] = u;
        }
      }
    }
    return out;
  }

  /// Every player at the action closest to 0.
  GridPolicy zero_policy() const {
    GridPolicy p;
    for (const auto& a : actions_) {
      std::size_t k = 0;
      for (std::size_t u = 1; u < a.size(); ++u)
        if (std::abs(a[u]) < std::abs(a[k])) k = u;
      p.push_back(std::vector<std::size_t>(cells(), k));
    }
    return p;
  }

 private:
  TensorGrid grid_;
  std::vector<std::vector<double>> actions_;
  double discount_;
  std::size_t joint_ = 1;
  std::vector<std::vector<double>> cost_;
  std::vector<std::vector<std::pair<std::size_t, double>>> next_;
};

struct TabularSolution {
  std::vector<std::vector<double>> q;  // per player
  TabularGame::GridPolicy policies;
  std::vector<double> sweep_delta;    // max over players of the sup-norm change
};

/// Coupled VI from Q = 0 with Jacobi greedy updates after each sweep.
inline TabularSolution brute_force_dp(const TabularGame& game, std::size_t sweeps,
                                      double tolerance = 0.0) {
  TabularSolution sol;
  sol.q.assign(game.players(), std::vector<double>(game.table_size(), 0.0));
  sol.policies = game.zero_policy();
  for (std::size_t k = 0; k < sweeps; ++k) {
    double delta = 0;
    std::vector<std::vector<double>> next;
    for (std::size_t i = 0; i < game.players(); ++i) {
      next.push_back(game.apply(i, sol.q[i], sol.policies));
      for (std::size_t e = 0; e < game.table_size(); ++e)
        delta = std::max(delta, std::abs(next[i][e] - sol.q[i][e]));
    }
    TabularGame::GridPolicy greedy;
    for (std::size_t i = 0; i < game.players(); ++i)
      greedy.push_back(game.greedy(i, next[i], sol.policies));
    sol.q = std::move(next);
    sol.policies = std::move(greedy);
    sol.sweep_delta.push_back(delta);
    if (delta <= tolerance) break;
  }
  return sol;
}

}  // namespace msqvi
