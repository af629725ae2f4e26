#pragma once

// Quadratic feature map over a lifted signal vector.
//
// Player i's lifted vector is X_i = [s(x, r); a_i; a_-i], where s(x, r) is an
// ordered list of scalar signals of the state and reference, a_i is the
// player's own action and a_-i the remaining actions in ascending player
// order. Features are the unique products X_j X_k, j <= k, listed
// upper-triangular row-major:
//
//   (0,0) (0,1) ... (0,d-1) (1,1) (1,2) ... (d-1,d-1)
//
// so K = d (d + 1) / 2. Weights serialized with this order carry the tag
// kMonomialOrderVersion.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "msqvi/game.hpp"

namespace msqvi {

inline constexpr std::string_view kMonomialOrderVersion = "quad-utrm-v1";

enum class SignalKind { kState, kStateSquared, kReference, kReferenceSquared, kConstant };

/// One scalar entry of s(x, r).
struct Signal {
  SignalKind kind = SignalKind::kState;
  Index index = 0;

  static Signal state(Index j) { return {SignalKind::kState, j}; }
  static Signal state_squared(Index j) { return {SignalKind::kStateSquared, j}; }
  static Signal reference(Index j) { return {SignalKind::kReference, j}; }
  static Signal reference_squared(Index j) { return {SignalKind::kReferenceSquared, j}; }
  // Extension point: a constant signal adds affine and constant terms. Bases
  // with a constant no longer give mu(0, 0) = 0.
  static Signal constant() { return {SignalKind::kConstant, 0}; }

  double eval(const Vector& x, const Vector& r) const {
    switch (kind) {
      case SignalKind::kState: return x(index);
      case SignalKind::kStateSquared: return x(index) * x(index);
      case SignalKind::kReference: return r(index);
      case SignalKind::kReferenceSquared: return r(index) * r(index);
      case SignalKind::kConstant: return 1.0;
    }
    return 0.0;
  }

  std::string name() const {
    const auto j = std::to_string(index + 1);
    switch (kind) {
      case SignalKind::kState: return "x" + j;
      case SignalKind::kStateSquared: return "x" + j + "^2";
      case SignalKind::kReference: return "r" + j;
      case SignalKind::kReferenceSquared: return "r" + j + "^2";
      case SignalKind::kConstant: return "1";
    }
    return "?";
  }

  /// Inverse of name().
  static Signal parse(std::string_view text) {
    if (text == "1") return constant();
    if (text.size() < 2 || (text[0] != 'x' && text[0] != 'r'))
      throw ConfigError("unknown signal '" + std::string(text) + "'");
    const bool squared = text.size() > 2 && text.substr(text.size() - 2) == "^2";
    const auto digits = text.substr(1, text.size() - 1 - (squared ? 2 : 0));
    Index j = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') throw ConfigError("unknown signal '" + std::string(text) + "'");
      j = 10 * j + (c - '0');
    }
    if (j < 1) throw ConfigError("signal indices start at 1: '" + std::string(text) + "'");
    if (text[0] == 'x') return squared ? state_squared(j - 1) : state(j - 1);
    return squared ? reference_squared(j - 1) : reference(j - 1);
  }

  bool operator==(const Signal&) const = default;
};

/// Unique quadratic monomials of X, upper-triangular row-major.
inline Vector monomials(const Vector& lifted) {
  const Index d = lifted.size();
  Vector phi(d * (d + 1) / 2);
  Index k = 0;
  for (Index a = 0; a < d; ++a)
    for (Index b = a; b < d; ++b) phi(k++) = lifted(a) * lifted(b);
  return phi;
}

/// Symmetric W with X' W X = monomials(X)' w.
inline Matrix weights_to_matrix(const Vector& w, Index d) {
  if (w.size() != d * (d + 1) / 2) throw DimensionError("weights", "length must be d(d+1)/2");
  Matrix m(d, d);
  Index k = 0;
  for (Index a = 0; a < d; ++a) {
    m(a, a) = w(k++);
    for (Index b = a + 1; b < d; ++b) {
      m(a, b) = m(b, a) = 0.5 * w(k++);
    }
  }
  return m;
}

/// Inverse of weights_to_matrix for symmetric input.
inline Vector matrix_to_weights(const Matrix& m) {
  const Index d = m.rows();
  if (m.cols() != d) throw DimensionError("matrix", "must be square");
  Vector w(d * (d + 1) / 2);
  Index k = 0;
  for (Index a = 0; a < d; ++a) {
    w(k++) = m(a, a);
    for (Index b = a + 1; b < d; ++b) w(k++) = m(a, b) + m(b, a);
  }
  return w;
}

/// Layout of the lifted vector shared by all players of a game.
class BasisSpec {
 public:
  BasisSpec() = default;
  BasisSpec(std::vector<Signal> signals, std::vector<Index> action_dims)
      : signals_(std::move(signals)), action_dims_(std::move(action_dims)) {
    if (action_dims_.empty()) throw ConfigError("basis needs at least one player");
  }

  /// [x; r; a_i; a_-i]: represents every LQ-game Q-function exactly.
  static BasisSpec exact_lq(Index state_dim, Index ref_dim, std::vector<Index> action_dims) {
    std::vector<Signal> s;
    for (Index j = 0; j < state_dim; ++j) s.push_back(Signal::state(j));
    for (Index j = 0; j < ref_dim; ++j) s.push_back(Signal::reference(j));
    return BasisSpec(std::move(s), std::move(action_dims));
  }

  /// [x1, x2, x1^2, x2^2, r, r^2, a_i, a_-i]; two scalar players give d = 8, K = 36.
  static BasisSpec glucose(std::vector<Index> action_dims = {1, 1}) {
    return BasisSpec({Signal::state(0), Signal::state(1), Signal::state_squared(0),
                      Signal::state_squared(1), Signal::reference(0),
                      Signal::reference_squared(0)},
                     std::move(action_dims));
  }

  const std::vector<Signal>& signals() const { return signals_; }
  const std::vector<Index>& action_dims() const { return action_dims_; }
  std::size_t n_players() const { return action_dims_.size(); }
  Index signal_count() const { return static_cast<Index>(signals_.size()); }

  Index lifted_dim() const {
    Index d = signal_count();
    for (Index m : action_dims_) d += m;
    return d;
  }
  Index size() const {
    const Index d = lifted_dim();
    return d * (d + 1) / 2;
  }

  /// Offset of player j's action inside player i's lifted vector.
  Index action_offset(std::size_t player, std::size_t j) const {
    check_player(player);
    if (j == player) return signal_count();
    Index off = signal_count() + action_dims_[player];
    for (std::size_t k = 0; k < j; ++k)
      if (k != player) off += action_dims_[k];
    return off;
  }

  Vector signal_values(const Vector& x, const Vector& r) const {
    Vector s(signal_count());
    for (Index k = 0; k < signal_count(); ++k) {
      const Signal& sig = signals_[static_cast<std::size_t>(k)];
      const bool on_state = sig.kind == SignalKind::kState || sig.kind == SignalKind::kStateSquared;
      const bool on_ref =
          sig.kind == SignalKind::kReference || sig.kind == SignalKind::kReferenceSquared;
      if ((on_state && sig.index >= x.size()) || (on_ref && sig.index >= r.size()))
        throw DimensionError("signal " + sig.name(), "index beyond state/reference size");
      s(k) = sig.eval(x, r);
    }
    return s;
  }

  /// X_i = [s(x, r); a_i; a_-i].
  Vector lifted(const TrackingSample& sample, std::size_t player) const {
    check_player(player);
    if (sample.actions.size() != n_players()) throw DimensionError("sample.actions");
    Vector out(lifted_dim());
    out.head(signal_count()) = signal_values(sample.state, sample.reference);
    for (std::size_t j = 0; j < n_players(); ++j) {
      if (sample.actions[j].size() != action_dims_[j])
        throw DimensionError("sample.actions[" + std::to_string(j) + "]");
      out.segment(action_offset(player, j), action_dims_[j]) = sample.actions[j];
    }
    return out;
  }

  std::vector<std::string> lifted_names(std::size_t player) const {
    std::vector<std::string> names(static_cast<std::size_t>(lifted_dim()));
    for (std::size_t k = 0; k < signals_.size(); ++k) names[k] = signals_[k].name();
    for (std::size_t j = 0; j < n_players(); ++j)
      for (Index c = 0; c < action_dims_[j]; ++c) {
        std::string n = "a" + std::to_string(j + 1);
        if (action_dims_[j] > 1) n += "_" + std::to_string(c + 1);
        names[static_cast<std::size_t>(action_offset(player, j) + c)] = n;
      }
    return names;
  }

  std::vector<std::string> monomial_names(std::size_t player) const {
    const auto x = lifted_names(player);
    std::vector<std::string> out;
    for (std::size_t a = 0; a < x.size(); ++a)
      for (std::size_t b = a; b < x.size(); ++b) out.push_back(a == b ? x[a] + "^2" : x[a] + "*" + x[b]);
    return out;
  }

  bool operator==(const BasisSpec&) const = default;

 private:
  void check_player(std::size_t player) const {
    if (player >= n_players()) throw DimensionError("player", "index out of range");
  }

  std::vector<Signal> signals_;
  std::vector<Index> action_dims_;
};

/// Phi_i(x, r, a_i, a_-i), length K.
inline Vector features(const BasisSpec& basis, const TrackingSample& sample, std::size_t player) {
  return monomials(basis.lifted(sample, player));
}

}  // namespace msqvi
