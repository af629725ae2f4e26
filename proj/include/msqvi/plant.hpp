#pragma once

// Plant abstractions.
//
// `Dynamics` is the model-visible form x+ = f(x) + sum g_i(x) u_i, r+ = h(r)
// used by oracles and tests. `Plant` is what the learner touches: it exposes
// the current observation and a step with actions, nothing else.

#include <memory>
#include <span>
#include <vector>

#include "msqvi/policy.hpp"

namespace msqvi {

class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual Index state_dim() const = 0;
  virtual Index ref_dim() const = 0;
  /// Deterministic: equal inputs give bitwise-equal outputs.
  virtual Vector step(const Vector& x, std::span<const Vector> actions) const = 0;
  virtual Vector ref_step(const Vector& r) const = 0;
};

class Plant {
 public:
  virtual ~Plant() = default;
  virtual Index state_dim() const = 0;
  virtual Index ref_dim() const = 0;
  virtual const Vector& state() const = 0;
  virtual const Vector& reference() const = 0;
  /// Applies already-clamped actions and advances one sample period.
  virtual void step(std::span<const Vector> actions) = 0;
  virtual bool resettable() const { return false; }
  virtual void reset(const Vector& /*x*/, const Vector& /*r*/) {
    throw ConfigError("plant cannot be reset to an arbitrary state");
  }
};

/// Plant backed by a pure Dynamics model.
class DynamicsPlant : public Plant {
 public:
  DynamicsPlant(std::shared_ptr<const Dynamics> dynamics, Vector x0, Vector r0)
      : dyn_(std::move(dynamics)), x_(std::move(x0)), r_(std::move(r0)) {
    check();
  }

  Index state_dim() const override { return dyn_->state_dim(); }
  Index ref_dim() const override { return dyn_->ref_dim(); }
  const Vector& state() const override { return x_; }
  const Vector& reference() const override { return r_; }
  void step(std::span<const Vector> actions) override {
    x_ = dyn_->step(x_, actions);
    r_ = dyn_->ref_step(r_);
  }
  bool resettable() const override { return true; }
  void reset(const Vector& x, const Vector& r) override {
    x_ = x;
    r_ = r;
    check();
  }
  const Dynamics& dynamics() const { return *dyn_; }

 private:
  void check() const {
    if (x_.size() != dyn_->state_dim()) throw DimensionError("x0");
    if (r_.size() != dyn_->ref_dim()) throw DimensionError("r0");
  }

  std::shared_ptr<const Dynamics> dyn_;
  Vector x_;
  Vector r_;
};

/// Closed-loop trajectory. samples[k] holds (x_k, r_k) and the executed
/// (clamped) actions at k; requested[k] holds the pre-clamp actions.
struct Trajectory {
  std::vector<TrackingSample> samples;
  std::vector<std::vector<Vector>> requested;
};

/// Runs `steps` closed-loop steps from (x0, r0). The result has steps + 1
/// entries; entry k + 1's state is the plant's response to entry k.
inline Trajectory rollout(Plant& plant, const GameSpec& spec, std::span<const Policy> policies,
                          const Vector& x0, const Vector& r0, std::size_t steps) {
  if (policies.size() != spec.n_players()) throw DimensionError("policies", "one per player");
  plant.reset(x0, r0);
  Trajectory t;
  t.samples.reserve(steps + 1);
  for (std::size_t k = 0;; ++k) {
    const Vector& x = plant.state();
    const Vector& r = plant.reference();
    if (!x.allFinite() || !r.allFinite()) throw DivergenceError(k, "non-finite state");
    auto requested = profile_actions(policies, x, r);
    auto applied = clamp_actions(spec, requested);
    t.samples.push_back({x, r, applied});
    t.requested.push_back(std::move(requested));
    if (k == steps) break;
    plant.step(applied);
  }
  return t;
}

}  // namespace msqvi
