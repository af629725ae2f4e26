#pragma once

// Feedback policies and closed-form greedy improvement for quadratic bases.
//
// Player i's Q is quadratic in its own action a_i:
//
//   Q = a_i' W_aa a_i + 2 a_i' (W_as s + W_ao a_-i) + (terms free of a_i)
//
// so the minimizer is a_i = -W_aa^{-1} (W_as s + W_ao a_-i). When every
// opponent plays a linear feedback over the same signals, the composite is
// again a linear feedback; otherwise it is evaluated pointwise.

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "msqvi/qfunction.hpp"

namespace msqvi {

class Policy;
using Profile = std::vector<Policy>;

struct ZeroPolicy {
  Index action_dim = 1;
};

/// u = gain * s(x, r).
struct LinearFeedback {
  std::vector<Signal> signals;
  Matrix gain;
};

/// Pointwise argmin of q against the opponents in `profile`.
struct NumericArgmin {
  std::shared_ptr<const QFunction> q;
  std::shared_ptr<const Profile> profile;
};

/// Blocks of W relevant to player i's greedy action.
struct ActionBlocks {
  Matrix own;     // W_aa, m_i x m_i
  Matrix signal;  // W_as, m_i x s
  Matrix other;   // W_ao, m_i x (sum of opponents' dims), lifted order
};

inline ActionBlocks action_blocks(const QFunction& q) {
  const Matrix w = q.matrix();
  const BasisSpec& b = q.basis();
  const std::size_t i = q.player();
  const Index s = b.signal_count();
  const Index m = b.action_dims()[i];
  const Index rest = b.lifted_dim() - s - m;
  return {w.block(s, s, m, m), w.block(s, 0, m, s), w.block(s, s + m, m, rest)};
}

/// Throws CurvatureError unless W_aa is positive definite. Eigenvalues at
/// machine zero relative to the block count as degenerate.
inline void require_curvature(const Matrix& own, std::size_t player) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(own, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 0.0) || lo <= 64.0 * std::numeric_limits<double>::epsilon() * hi)
    throw CurvatureError(player, lo);
}

class Policy {
 public:
  using Variant = std::variant<ZeroPolicy, LinearFeedback, NumericArgmin>;

  Policy() : v_(ZeroPolicy{}) {}
  Policy(ZeroPolicy p) : v_(p) {}  // NOLINT
  Policy(LinearFeedback p) : v_(std::move(p)) {  // NOLINT
    if (std::get<LinearFeedback>(v_).gain.cols() !=
        static_cast<Index>(std::get<LinearFeedback>(v_).signals.size()))
      throw DimensionError("gain", "columns must match signal count");
  }
  Policy(NumericArgmin p) : v_(std::move(p)) {}  // NOLINT

  static Policy zero(Index action_dim) { return Policy(ZeroPolicy{action_dim}); }

  const Variant& variant() const { return v_; }
  const LinearFeedback* linear() const { return std::get_if<LinearFeedback>(&v_); }
  bool is_zero() const { return std::holds_alternative<ZeroPolicy>(v_); }

  Index action_dim() const {
    return std::visit(
        [](const auto& p) -> Index {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, ZeroPolicy>) return p.action_dim;
          else if constexpr (std::is_same_v<T, LinearFeedback>) return p.gain.rows();
          else return p.q->basis().action_dims()[p.q->player()];
        },
        v_);
  }

  /// Unclamped action mu(x, r).
  Vector operator()(const Vector& x, const Vector& r) const;

 private:
  Variant v_;
};

/// Writes the gain of `p` over `signals`; false if `p` is not linear over
/// exactly those signals.
inline bool linear_gain_over(const Policy& p, const std::vector<Signal>& signals, Matrix& gain) {
  if (p.is_zero()) {
    gain = Matrix::Zero(p.action_dim(), static_cast<Index>(signals.size()));
    return true;
  }
  if (const auto* lf = p.linear(); lf && lf->signals == signals) {
    gain = lf->gain;
    return true;
  }
  return false;
}

/// Opponents' actions at (x, r), stacked in player i's lifted order.
inline Vector opponent_actions(std::span<const Policy> profile, std::size_t player, const Vector& x,
                               const Vector& r) {
  Index total = 0;
  for (std::size_t j = 0; j < profile.size(); ++j)
    if (j != player) total += profile[j].action_dim();
  Vector out(total);
  Index off = 0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j == player) continue;
    const Vector a = profile[j](x, r);
    out.segment(off, a.size()) = a;
    off += a.size();
  }
  return out;
}

/// argmin over a_i of q at (x, r) with the opponents fixed at `others`
/// (lifted order). The Q must have positive definite own-action curvature.
inline Vector greedy_action(const QFunction& q, const Vector& x, const Vector& r,
                            const Vector& others) {
  const ActionBlocks blk = action_blocks(q);
  require_curvature(blk.own, q.player());
  const Vector s = q.basis().signal_values(x, r);
  if (others.size() != blk.other.cols()) throw DimensionError("opponent actions");
  return -blk.own.llt().solve(blk.signal * s + blk.other * others);
}

inline Vector Policy::operator()(const Vector& x, const Vector& r) const {
  return std::visit(
      [&](const auto& p) -> Vector {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ZeroPolicy>) {
          return Vector::Zero(p.action_dim);
        } else if constexpr (std::is_same_v<T, LinearFeedback>) {
          Vector s(static_cast<Index>(p.signals.size()));
          for (std::size_t k = 0; k < p.signals.size(); ++k)
            s(static_cast<Index>(k)) = p.signals[k].eval(x, r);
          return p.gain * s;
        } else {
          return greedy_action(*p.q, x, r, opponent_actions(*p.profile, p.q->player(), x, r));
        }
      },
      v_);
}

/// mu_i = argmin_u Q_i(x, r, u, mu_-i(x, r)), with the opponents taken from
/// `profile` (entry `player` is ignored).
inline Policy improve_policy(const QFunction& q, std::span<const Policy> profile,
                             std::size_t player) {
  if (player != q.player()) throw DimensionError("player", "Q-function belongs to another player");
  if (profile.size() != q.basis().n_players()) throw DimensionError("profile", "one policy per player");
  const ActionBlocks blk = action_blocks(q);
  require_curvature(blk.own, player);

  const auto& signals = q.basis().signals();
  const Index s = q.basis().signal_count();
  Matrix opp_gain(blk.other.cols(), s);
  bool symbolic = true;
  Index off = 0;
  for (std::size_t j = 0; j < profile.size() && symbolic; ++j) {
    if (j == player) continue;
    if (profile[j].action_dim() != q.basis().action_dims()[j])
      throw DimensionError("profile[" + std::to_string(j) + "]", "action dim");
    Matrix g;
    symbolic = linear_gain_over(profile[j], signals, g);
    if (symbolic) opp_gain.middleRows(off, g.rows()) = g;
    off += profile[j].action_dim();
  }
  if (symbolic) {
    const Matrix rhs = blk.signal + blk.other * opp_gain;
    return Policy(LinearFeedback{signals, -blk.own.llt().solve(rhs)});
  }
  return Policy(NumericArgmin{std::make_shared<const QFunction>(q),
                              std::make_shared<const Profile>(profile.begin(), profile.end())});
}

/// Simultaneous improvement of all players against the previous profile.
inline Profile improve_profile(std::span<const QFunction> qs, std::span<const Policy> previous) {
  Profile next;
  next.reserve(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) next.push_back(improve_policy(qs[i], previous, i));
  return next;
}

inline Profile zero_profile(const std::vector<Index>& action_dims) {
  Profile p;
  for (Index m : action_dims) p.push_back(Policy::zero(m));
  return p;
}

/// Unclamped actions of the whole profile.
inline std::vector<Vector> profile_actions(std::span<const Policy> profile, const Vector& x,
                                           const Vector& r) {
  std::vector<Vector> out;
  out.reserve(profile.size());
  for (const auto& p : profile) out.push_back(p(x, r));
  return out;
}

/// Executed actions: the profile clamped to the game's action bounds.
inline std::vector<Vector> act(std::span<const Policy> profile, const Vector& x, const Vector& r,
                               const GameSpec& spec) {
  return clamp_actions(spec, profile_actions(profile, x, r));
}

/// min over u of q(x, r, u, others). A Q that does not depend on the own
/// action at all returns its value at u = 0; otherwise the curvature must be
/// positive definite.
inline std::pair<Vector, double> minimize_own_action(const QFunction& q, const Vector& x,
                                                     const Vector& r, const Vector& others) {
  const ActionBlocks blk = action_blocks(q);
  const std::size_t i = q.player();
  const BasisSpec& b = q.basis();
  Vector u;
  if (blk.own.isZero(0.0) && blk.signal.isZero(0.0) && blk.other.isZero(0.0)) {
    u = Vector::Zero(blk.own.rows());
  } else {
    u = greedy_action(q, x, r, others);
  }
  Vector lifted(b.lifted_dim());
  lifted.head(b.signal_count()) = b.signal_values(x, r);
  lifted.segment(b.action_offset(i, i), u.size()) = u;
  lifted.tail(others.size()) = others;
  return {u, q.value_lifted(lifted)};
}

}  // namespace msqvi
