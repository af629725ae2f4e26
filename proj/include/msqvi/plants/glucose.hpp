#pragma once

// Minimal dual-hormone glucose model (Bergman minimal model with
// subcutaneous insulin, a glucagon action compartment, two-compartment gut
// absorption and an exercise sensitivity factor), integrated with 1-minute
// Euler substeps inside each 5-minute CGM period.
//
//   q1' = -q1/tm + 1000 cho               q2' = (q1 - q2)/tm
//   s1' = uI/T - s1/ti                    s2' = (s1 - s2)/ti
//   ip' = 1000 s2/(ti vi) - ke ip         xa' = p2 (si ip - xa)
//   z1' = uG/T - z1/tn                    z2' = (z1 - z2)/tn
//   ya' = py (sn z2/tn - ya)
//   e'  = (level - e)/te                  (te = onset or offset constant)
//   g'  = -(sg + xa (1 + kx e) + ku e) g + sg gb + f q2/(tm vg) + ya
//
// with T the CGM period, uI in U/T and uG in mg/T.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "msqvi/plant.hpp"
#include "msqvi/plants/scenario.hpp"

namespace msqvi {

struct GlucosePatient {
  double basal_glucose = 150;          // mg/dL
  double glucose_effectiveness = 0.01; // 1/min
  double glucose_volume = 180;         // dL
  double meal_time_constant = 30;      // min
  double meal_bioavailability = 0.7;
  double insulin_time_constant = 30;   // min
  double insulin_volume = 12;          // L
  double insulin_clearance = 0.138;    // 1/min
  double insulin_action_rate = 0.05;   // 1/min
  double insulin_sensitivity = 8e-4;   // 1/min per mU/L
  double glucagon_time_constant = 15;  // min
  double glucagon_action_rate = 0.1;   // 1/min
  double glucagon_sensitivity = 400;   // mg/dL per mg absorbed
  std::array<double, 3> exercise_levels{0.3, 0.6, 1.0};  // light, moderate, intense
  double exercise_onset = 10;          // min
  double exercise_offset = 60;         // min
  double exercise_sensitivity_gain = 1.0;
  double exercise_uptake = 3e-3;       // 1/min at level 1
  int sample_period = 5;               // min
  double cgm_noise_sd = 2;             // mg/dL
  double cgm_min = 40;
  double cgm_max = 400;

  void validate() const {
    const double positive[] = {basal_glucose, glucose_effectiveness, glucose_volume,
                               meal_time_constant, meal_bioavailability, insulin_time_constant,
                               insulin_volume, insulin_clearance, insulin_action_rate,
                               insulin_sensitivity, glucagon_time_constant, glucagon_action_rate,
                               glucagon_sensitivity, exercise_onset, exercise_offset, cgm_min};
    for (double v : positive)
      if (!(v > 0) || !std::isfinite(v)) throw ConfigError("patient parameters must be positive");
    if (sample_period < 1) throw ConfigError("sample period must be at least one minute");
    if (cgm_noise_sd < 0 || cgm_max <= cgm_min) throw ConfigError("invalid CGM settings");
    for (double l : exercise_levels)
      if (l < 0) throw ConfigError("exercise levels must be nonnegative");
  }

  /// Copy with sensitivities, volumes and basal level scaled by independent
  /// uniform factors in [1 - spread, 1 + spread].
  GlucosePatient varied(std::mt19937_64& rng, double spread) const {
    if (spread < 0 || spread >= 1) throw ConfigError("population spread must be in [0, 1)");
    GlucosePatient p = *this;
    if (spread == 0) return p;
    std::uniform_real_distribution<double> f(1 - spread, 1 + spread);
    p.insulin_sensitivity *= f(rng);
    p.glucose_effectiveness *= f(rng);
    p.glucose_volume *= f(rng);
    p.meal_time_constant *= f(rng);
    p.glucagon_sensitivity *= f(rng);
    p.basal_glucose *= f(rng);
    return p;
  }
};

struct GlucoseState {
  double gut1 = 0, gut2 = 0;           // mg
  double insulin_depot1 = 0, insulin_depot2 = 0;  // U
  double plasma_insulin = 0;           // mU/L above basal
  double insulin_action = 0;           // 1/min
  double glucagon_depot1 = 0, glucagon_depot2 = 0;  // mg
  double glucagon_action = 0;          // mg/dL/min
  double exercise = 0;
  double glucose = 0;                  // mg/dL

  bool finite() const {
    for (double v : {gut1, gut2, insulin_depot1, insulin_depot2, plasma_insulin, insulin_action,
                     glucagon_depot1, glucagon_depot2, glucagon_action, exercise, glucose})
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Hormone-free equilibrium without meals or exercise.
  static GlucoseState at_basal(const GlucosePatient& p) {
    GlucoseState s;
    s.glucose = p.basal_glucose;
    return s;
  }
};

/// Exogenous input during one simulated minute.
struct MinuteInput {
  double cho_g_per_min = 0;
  double exercise_level = 0;
};

inline double cgm_reading(const GlucosePatient& p, double glucose) {
  return std::clamp(glucose, p.cgm_min, p.cgm_max);
}

/// Advances one CGM period. `inputs` holds one entry per minute of the
/// period. Returns the new state and the noise-free CGM reading.
inline std::pair<GlucoseState, double> glucose_step(const GlucosePatient& p, GlucoseState s,
                                                    double insulin, double glucagon,
                                                    std::span<const MinuteInput> inputs) {
  if (static_cast<int>(inputs.size()) != p.sample_period)
    throw DimensionError("inputs", "one entry per simulated minute");
  if (insulin < 0 || glucagon < 0) throw DimensionError("doses", "must be nonnegative");
  const double period = p.sample_period;
  for (const MinuteInput& in : inputs) {
    const GlucoseState o = s;
    const double ra = p.meal_bioavailability * o.gut2 / p.meal_time_constant;
    s.gut1 += -o.gut1 / p.meal_time_constant + 1000.0 * in.cho_g_per_min;
    s.gut2 += (o.gut1 - o.gut2) / p.meal_time_constant;
    s.insulin_depot1 += insulin / period - o.insulin_depot1 / p.insulin_time_constant;
    s.insulin_depot2 += (o.insulin_depot1 - o.insulin_depot2) / p.insulin_time_constant;
    s.plasma_insulin += 1000.0 * o.insulin_depot2 / (p.insulin_time_constant * p.insulin_volume) -
                        p.insulin_clearance * o.plasma_insulin;
    s.insulin_action +=
        p.insulin_action_rate * (p.insulin_sensitivity * o.plasma_insulin - o.insulin_action);
    s.glucagon_depot1 += glucagon / period - o.glucagon_depot1 / p.glucagon_time_constant;
    s.glucagon_depot2 += (o.glucagon_depot1 - o.glucagon_depot2) / p.glucagon_time_constant;
    s.glucagon_action += p.glucagon_action_rate *
                         (p.glucagon_sensitivity * o.glucagon_depot2 / p.glucagon_time_constant -
                          o.glucagon_action);
    const double tc = in.exercise_level > o.exercise ? p.exercise_onset : p.exercise_offset;
    s.exercise += (in.exercise_level - o.exercise) / tc;
    const double uptake = p.glucose_effectiveness +
                          o.insulin_action * (1.0 + p.exercise_sensitivity_gain * o.exercise) +
                          p.exercise_uptake * o.exercise;
    s.glucose += -uptake * o.glucose + p.glucose_effectiveness * p.basal_glucose +
                 ra / p.glucose_volume + o.glucagon_action;
    s.glucose = std::max(s.glucose, 0.0);
  }
  if (!s.finite()) throw ModelBlowupError("glucose model produced a non-finite state");
  return {s, cgm_reading(p, s.glucose)};
}

/// Lazily realized sequence of daily scenarios on an absolute minute clock.
class ScenarioTimeline {
 public:
  ScenarioTimeline(ScenarioConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    cfg_.validate();
  }

  MinuteInput at(const GlucosePatient& p, long minute) {
    const long day = minute >= 0 ? minute / 1440 : -1;
    MinuteInput in;
    for (long d = std::max(0L, day - 1); d <= day + 1; ++d) {
      const DailyScenario& sc = realized(d);
      const double t = static_cast<double>(minute - 1440 * d);
      in.cho_g_per_min += sc.cho_rate(t);
      if (sc.exercising(t))
        in.exercise_level = std::max(in.exercise_level,
                                     p.exercise_levels[static_cast<int>(sc.exercise_intensity)]);
    }
    return in;
  }

  const DailyScenario& realized(long day) {
    while (static_cast<long>(days_.size()) <= day) days_.push_back(sample_scenario(cfg_, rng_));
    return days_[static_cast<std::size_t>(day)];
  }

 private:
  ScenarioConfig cfg_;
  std::mt19937_64 rng_;
  std::deque<DailyScenario> days_;
};

/// Plant whose observation is a CGM trace. Keeps the per-step records needed
/// for glycaemic summaries.
class CgmPlant : public Plant {
 public:
  const std::vector<double>& cgm_trace() const { return cgm_; }
  const std::vector<double>& insulin_trace() const { return insulin_; }
  const std::vector<double>& glucagon_trace() const { return glucagon_; }
  virtual double sample_period_min() const = 0;

 protected:
  std::vector<double> cgm_, insulin_, glucagon_;
};

/// Observation x = [x1, x2]: x1 the CGM reading and x2 = (x1_k - x1_{k-6}) / 30,
/// with readings before the first one taken as 0. Reference r = [setpoint].
/// Actions: player 0 insulin [U/5min], player 1 glucagon [mg/5min].
class GlucosePlant : public CgmPlant {
 public:
  struct Options {
    double initial_glucose = 120;
    double setpoint = 120;
    long start_minute = 0;
    std::uint64_t scenario_seed = 0;
    std::uint64_t noise_seed = 1;
  };

  GlucosePlant(GlucosePatient patient, ScenarioConfig scenario, Options opt)
      : p_(std::move(patient)),
        timeline_(std::move(scenario), opt.scenario_seed),
        noise_(opt.noise_seed),
        minute_(opt.start_minute),
        x_(2),
        r_(Vector::Constant(1, opt.setpoint)) {
    p_.validate();
    if (!(opt.initial_glucose > 0)) throw ConfigError("initial glucose must be positive");
    s_ = GlucoseState::at_basal(p_);
    s_.glucose = opt.initial_glucose;
    history_.assign(6, 0.0);
    observe(cgm_reading(p_, opt.initial_glucose));
  }

  Index state_dim() const override { return 2; }
  Index ref_dim() const override { return 1; }
  const Vector& state() const override { return x_; }
  const Vector& reference() const override { return r_; }
  double sample_period_min() const override { return p_.sample_period; }

  void step(std::span<const Vector> actions) override {
    if (actions.size() != 2) throw DimensionError("actions", "insulin and glucagon");
    const double insulin = std::max(0.0, actions[0](0));
    const double glucagon = std::max(0.0, actions[1](0));
    std::vector<MinuteInput> inputs;
    for (int k = 0; k < p_.sample_period; ++k) inputs.push_back(timeline_.at(p_, minute_ + k));
    auto [next, cgm] = glucose_step(p_, s_, insulin, glucagon, inputs);
    s_ = next;
    minute_ += p_.sample_period;
    insulin_.push_back(insulin);
    glucagon_.push_back(glucagon);
    if (p_.cgm_noise_sd > 0)
      cgm = cgm_reading(p_, cgm + std::normal_distribution<double>(0.0, p_.cgm_noise_sd)(noise_));
    observe(cgm);
  }

  const GlucoseState& internal_state() const { return s_; }
  const GlucosePatient& patient() const { return p_; }
  long minute() const { return minute_; }

 private:
  void observe(double cgm) {
    const double lagged = history_.front();
    history_.pop_front();
    history_.push_back(cgm);
    x_(0) = cgm;
    x_(1) = (cgm - lagged) / 30.0;
    cgm_.push_back(cgm);
  }

  GlucosePatient p_;
  ScenarioTimeline timeline_;
  std::mt19937_64 noise_;
  long minute_;
  GlucoseState s_;
  std::deque<double> history_;
  Vector x_;
  Vector r_;
};

/// Test stub: the CGM never moves.
class ConstantGlucosePlant : public CgmPlant {
 public:
  explicit ConstantGlucosePlant(double glucose, double setpoint = 120)
      : x_(Vector::Zero(2)), r_(Vector::Constant(1, setpoint)) {
    x_(0) = glucose;
    cgm_.push_back(glucose);
  }
  Index state_dim() const override { return 2; }
  Index ref_dim() const override { return 1; }
  const Vector& state() const override { return x_; }
  const Vector& reference() const override { return r_; }
  double sample_period_min() const override { return 5; }
  void step(std::span<const Vector> actions) override {
    if (actions.size() != 2) throw DimensionError("actions", "insulin and glucagon");
    insulin_.push_back(std::max(0.0, actions[0](0)));
    glucagon_.push_back(std::max(0.0, actions[1](0)));
    cgm_.push_back(x_(0));
  }

 private:
  Vector x_;
  Vector r_;
};

/// Two-player glucose game: S11 = 1, S22 = 1e-3 on the CGM error,
/// R11 = 100, R12 = R21 = 100, R22 = 300.
struct GlucoseGameOptions {
  double discount = 0.95;
  double insulin_max = 2.0;   // U/5min
  double glucagon_max = 0.1;  // mg/5min
  double s11 = 1, s22 = 1e-3;
  double r11 = 100, r12 = 100, r21 = 100, r22 = 300;
};

inline GameSpec glucose_game(const GlucoseGameOptions& o = {}) {
  GameSpec g;
  g.state_dim = 2;
  g.ref_dim = 1;
  g.action_dims = {1, 1};
  g.discount = o.discount;
  g.output_map = Matrix(1, 2);
  g.output_map << 1.0, 0.0;
  g.state_cost = {Matrix::Constant(1, 1, o.s11), Matrix::Constant(1, 1, o.s22)};
  g.action_cost = {{Matrix::Constant(1, 1, o.r11), Matrix::Constant(1, 1, o.r12)},
                   {Matrix::Constant(1, 1, o.r21), Matrix::Constant(1, 1, o.r22)}};
  g.action_bounds = {ActionBounds::uniform(1, 0.0, o.insulin_max),
                     ActionBounds::uniform(1, 0.0, o.glucagon_max)};
  g.validate();
  return g;
}

}  // namespace msqvi
