#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msqvi {

/// Base class of every error raised by the library. Messages number players
/// from 1; player() accessors are zero-based.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes disagree with the game definition.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& field, const std::string& detail = {})
      : Error("dimension mismatch in " + field + (detail.empty() ? "" : ": " + detail)),
        field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Invalid game, basis or learning configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A rollout produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error("trajectory diverged at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// The metabolic model produced a non-finite internal state.
class ModelBlowupError : public Error {
 public:
  using Error::Error;
};

/// The own-action block of a Q iterate is not positive definite, so the
/// greedy policy is undefined.
class CurvatureError : public Error {
 public:
  CurvatureError(std::size_t player, double min_eigenvalue)
      : Error("own-action curvature of player " + std::to_string(player + 1) +
              " is not positive definite (min eigenvalue " + std::to_string(min_eigenvalue) +
              ")"),
        player_(player),
        min_eigenvalue_(min_eigenvalue) {}
  std::size_t player() const noexcept { return player_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  std::size_t player_;
  double min_eigenvalue_;
};

/// The buffer does not excite the feature space (Gram matrix too small).
class ExcitationError : public Error {
 public:
  ExcitationError(std::size_t player, double lambda_min, double threshold)
      : Error("persistence of excitation failed for player " + std::to_string(player + 1) +
              ": lambda_min " + std::to_string(lambda_min) + " < " +
              std::to_string(threshold) + " (enrich exploration or enlarge the buffer)"),
        player_(player),
        lambda_min_(lambda_min) {}
  std::size_t player() const noexcept { return player_; }
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  std::size_t player_;
  double lambda_min_;
};

/// Rank-deficient regression matrix in the least-squares evaluation.
class SingularityError : public Error {
 public:
  SingularityError(std::size_t player, long rank, long columns)
      : Error("regression matrix of player " + std::to_string(player + 1) + " has rank " +
              std::to_string(rank) + " < " + std::to_string(columns)),
        player_(player),
        rank_(rank) {}
  std::size_t player() const noexcept { return player_; }
  long rank() const noexcept { return rank_; }

 private:
  std::size_t player_;
  long rank_;
};

/// Linear program could not be solved to the requested accuracy.
class LpError : public Error {
 public:
  enum class Kind { kInfeasible, kUnbounded, kNumeric, kIterationLimit };
  LpError(Kind kind, const std::string& what, double gap = 0.0)
      : Error(what), kind_(kind), gap_(gap) {}
  Kind kind() const noexcept { return kind_; }
  double duality_gap() const noexcept { return gap_; }

 private:
  Kind kind_;
  double gap_;
};

}  // namespace msqvi
