#pragma once

// Multi-step Q-function value iteration driver.
//
// Round p: collect a buffer with mu^p (exploring around the mean of mu^p and
// mu^{p-1}), evaluate every player's Q^{p+1} by LS or LP against the
// H-step targets built from Q^p, then improve all players simultaneously
// against mu^p. Stops once every player's largest change over the buffer
// points is at most the tolerance. H = 1 is plain value iteration.

#include <chrono>
#include <functional>
#include <random>
#include <vector>

#include "msqvi/learning/buffer.hpp"
#include "msqvi/learning/lp.hpp"
#include "msqvi/learning/ls.hpp"
#include "msqvi/learning/poe.hpp"
#include "msqvi/learning/q0.hpp"

namespace msqvi {

enum class Backend { kLs, kLp };

enum class PoeMode {
  kStrict,  // failure raises ExcitationError
  kWarn,    // failure is recorded in the report only
};

struct EvalConfig {
  Backend backend = Backend::kLs;
  std::size_t horizon = 3;
  /// Optional per-round horizons; the last entry repeats.
  std::vector<std::size_t> horizon_schedule;
  std::size_t buffer_size = 48;
  double tolerance = 1e-10;
  std::size_t max_rounds = 2000;
  double poe_threshold = 1e-8;
  PoeScaling poe_scaling = PoeScaling::kRaw;
  PoeMode poe_mode = PoeMode::kStrict;
  /// Relative slack of the per-round monotonicity diagnostic.
  double monotone_tolerance = 1e-7;
  LsOptions ls;
  LpOptions lp;
  ExplorationConfig exploration;
  StartSampler restart;

  std::size_t horizon_at(std::size_t round) const {
    if (horizon_schedule.empty()) return horizon;
    return horizon_schedule[std::min(round, horizon_schedule.size() - 1)];
  }

  void validate(const GameSpec& spec, const BasisSpec& basis) const {
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    for (std::size_t h : horizon_schedule)
      if (h < 1) throw ConfigError("horizon schedule entries must be at least 1");
    if (buffer_size < static_cast<std::size_t>(basis.size()))
      throw ConfigError("buffer size " + std::to_string(buffer_size) + " is below K = " +
                        std::to_string(basis.size()));
    if (!(tolerance >= 0)) throw ConfigError("tolerance must be nonnegative");
    if (max_rounds == 0) throw ConfigError("max_rounds must be positive");
    if (poe_threshold < 0) throw ConfigError("PoE threshold must be nonnegative");
    if (basis.action_dims() != spec.action_dims)
      throw DimensionError("basis", "action dims differ from the game");
    exploration.validate(spec);
  }
};

struct IterationReport {
  std::size_t round = 0;
  std::size_t horizon = 1;
  std::vector<Vector> weights;                 // Q^{p+1}
  std::vector<double> delta;                   // max_b |Q^{p+1} - Q^p|
  std::vector<double> residual_or_objective;  // LS residual norm or LP objective
  std::vector<double> poe_lambda_min;
  std::vector<bool> poe_passed;
  std::vector<double> max_increase;            // max_b (Q^{p+1} - Q^p) / (1 + |Q^p|)
  std::vector<std::size_t> monotone_violations;
  std::vector<std::size_t> box_binding;
  double wall_seconds = 0;
  bool converged = false;
};

struct MsqviResult {
  std::vector<QFunction> q;
  Profile policies;  // greedy with respect to q
  std::vector<IterationReport> reports;
  bool converged = false;
  GameBuffer last_buffer;

  std::size_t rounds() const { return reports.size(); }
};

using RoundObserver = std::function<void(const IterationReport&, const GameBuffer&)>;

/// One player's evaluation on a collected buffer.
struct PlayerEvaluation {
  QFunction q;
  double residual_or_objective = 0;
  std::size_t box_binding = 0;
};

inline PlayerEvaluation evaluate_player(const GameBuffer& buf, const QFunction& q_prev,
                                        const GameSpec& spec, const EvalConfig& cfg) {
  if (cfg.backend == Backend::kLs) {
    LsEvaluation e = ls_evaluate(buf, q_prev, spec, cfg.ls);
    return {std::move(e.q), e.residual_norm, 0};
  }
  LpEvaluation e = lp_evaluate(buf, q_prev, spec, cfg.lp);
  return {std::move(e.q), e.objective, e.box_binding};
}

inline MsqviResult run_msqvi(Plant& plant, const GameSpec& spec, const BasisSpec& basis,
                             const EvalConfig& cfg, std::vector<QFunction> q0,
                             std::mt19937_64& rng, const RoundObserver& observer = {}) {
  spec.validate();
  cfg.validate(spec, basis);
  if (q0.size() != spec.n_players()) throw DimensionError("q0", "one per player");
  for (std::size_t i = 0; i < q0.size(); ++i)
    if (q0[i].player() != i || !(q0[i].basis() == basis)) throw DimensionError("q0", "basis or player mismatch");

  const std::size_t n = spec.n_players();
  Profile previous = zero_profile(spec.action_dims);
  std::vector<QFunction> q = std::move(q0);
  Profile now = improve_profile(q, previous);

  MsqviResult out;
  for (std::size_t p = 0; p < cfg.max_rounds; ++p) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationReport rep;
    rep.round = p;
    rep.horizon = cfg.horizon_at(p);
    GameBuffer buf = collect_buffer(plant, spec, now, previous, p, cfg.exploration,
                                    {rep.horizon, cfg.buffer_size, cfg.restart}, rng);

    std::vector<QFunction> next;
    for (std::size_t i = 0; i < n; ++i) {
      const PoeResult poe = poe_check(buf, basis, i, cfg.poe_threshold, cfg.poe_scaling);
      if (!poe.passed && cfg.poe_mode == PoeMode::kStrict)
        throw ExcitationError(i, poe.lambda_min, cfg.poe_threshold);
      PlayerEvaluation e = evaluate_player(buf, q[i], spec, cfg);
      if (!e.q.weights().allFinite()) throw DivergenceError(p, "non-finite weights");

      double delta = 0, increase = -std::numeric_limits<double>::infinity();
      std::size_t violations = 0;
      for (const auto& t : buf.tuples) {
        const double before = q[i](t.first);
        const double after = e.q(t.first);
        delta = std::max(delta, std::abs(after - before));
        const double rel = (after - before) / (1.0 + std::abs(before));
        increase = std::max(increase, rel);
        if (rel > cfg.monotone_tolerance) ++violations;
      }
      rep.weights.push_back(e.q.weights());
      rep.delta.push_back(delta);
      rep.residual_or_objective.push_back(e.residual_or_objective);
      rep.poe_lambda_min.push_back(poe.lambda_min);
      rep.poe_passed.push_back(poe.passed);
      rep.max_increase.push_back(increase);
      rep.monotone_violations.push_back(violations);
      rep.box_binding.push_back(e.box_binding);
      next.push_back(std::move(e.q));
    }
    rep.converged = true;
    for (double d : rep.delta) rep.converged = rep.converged && d <= cfg.tolerance;

    Profile improved = improve_profile(next, now);
    previous = std::move(now);
    now = std::move(improved);
    q = std::move(next);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (observer) observer(rep, buf);
    out.reports.push_back(std::move(rep));
    out.last_buffer = std::move(buf);
    if (out.reports.back().converged) {
      out.converged = true;
      break;
    }
  }
  out.q = std::move(q);
  out.policies = std::move(now);
  return out;
}

/// Value iteration: the same loop with H = 1.
inline MsqviResult run_vi(Plant& plant, const GameSpec& spec, const BasisSpec& basis,
                          EvalConfig cfg, std::vector<QFunction> q0, std::mt19937_64& rng,
                          const RoundObserver& observer = {}) {
  cfg.horizon = 1;
  cfg.horizon_schedule.clear();
  return run_msqvi(plant, spec, basis, cfg, std::move(q0), rng, observer);
}

}  // namespace msqvi
