#pragma once

// Randomized daily meal and exercise scenarios.

#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "msqvi/errors.hpp"

namespace msqvi {

enum class ExerciseIntensity { kLight = 0, kModerate = 1, kIntense = 2 };

inline const char* to_string(ExerciseIntensity i) {
  switch (i) {
    case ExerciseIntensity::kLight: return "light";
    case ExerciseIntensity::kModerate: return "moderate";
    case ExerciseIntensity::kIntense: return "intense";
  }
  return "?";
}

inline ExerciseIntensity parse_intensity(const std::string& s) {
  if (s == "light") return ExerciseIntensity::kLight;
  if (s == "moderate") return ExerciseIntensity::kModerate;
  if (s == "intense") return ExerciseIntensity::kIntense;
  throw ConfigError("unknown exercise intensity '" + s + "'");
}

/// Nominal day plus half-widths of the uniform perturbations. Times are
/// minutes after midnight; relative widths are fractions of the nominal value.
struct ScenarioConfig {
  std::vector<double> meal_times_min{420, 600, 780, 900, 1080, 1380};
  std::vector<double> meal_cho_g{70, 30, 90, 30, 90, 25};
  std::vector<double> meal_durations_min{30, 15, 45, 15, 45, 20};
  double exercise_start_min = 960;
  ExerciseIntensity exercise_intensity = ExerciseIntensity::kModerate;
  double exercise_duration_min = 30;

  double meal_time_jitter_min = 60;
  double meal_cho_jitter = 0.4;
  double meal_duration_jitter = 0.5;
  double exercise_time_jitter_min = 60;
  double exercise_duration_jitter = 0.5;
  bool randomize_intensity = true;

  /// Same nominal day with every variability range set to zero.
  static ScenarioConfig nominal_only() {
    ScenarioConfig c;
    c.meal_time_jitter_min = c.meal_cho_jitter = c.meal_duration_jitter = 0;
    c.exercise_time_jitter_min = c.exercise_duration_jitter = 0;
    c.randomize_intensity = false;
    return c;
  }

  /// No meals and no exercise.
  static ScenarioConfig fasting() {
    ScenarioConfig c = nominal_only();
    c.meal_times_min.clear();
    c.meal_cho_g.clear();
    c.meal_durations_min.clear();
    c.exercise_duration_min = 0;
    return c;
  }

  void validate() const {
    if (meal_times_min.size() != meal_cho_g.size() || meal_cho_g.size() != meal_durations_min.size())
      throw ConfigError("meal times, amounts and durations must have equal length");
    for (double d : meal_durations_min)
      if (!(d > 0)) throw ConfigError("meal durations must be positive");
    for (double g : meal_cho_g)
      if (g < 0) throw ConfigError("meal amounts must be nonnegative");
    if (exercise_duration_min < 0) throw ConfigError("exercise duration must be nonnegative");
    if (meal_time_jitter_min < 0 || exercise_time_jitter_min < 0 || meal_cho_jitter < 0 ||
        meal_cho_jitter > 1 || meal_duration_jitter < 0 || meal_duration_jitter >= 1 ||
        exercise_duration_jitter < 0 || exercise_duration_jitter > 1)
      throw ConfigError("variability ranges out of bounds");
  }
};

struct Meal {
  double start_min = 0;
  double cho_g = 0;
  double duration_min = 1;
};

/// One realized day. Event times may fall outside [0, 1440).
struct DailyScenario {
  std::vector<Meal> meals;
  double exercise_start_min = 0;
  ExerciseIntensity exercise_intensity = ExerciseIntensity::kModerate;
  double exercise_duration_min = 0;

  /// Carbohydrate appearance rate at minute t of this day.
  double cho_rate(double t) const {
    double rate = 0;
    for (const auto& m : meals)
      if (t >= m.start_min && t < m.start_min + m.duration_min) rate += m.cho_g / m.duration_min;
    return rate;
  }
  bool exercising(double t) const {
    return t >= exercise_start_min && t < exercise_start_min + exercise_duration_min;
  }
};

namespace detail {
inline double jitter(std::mt19937_64& rng, double half_width) {
  if (half_width == 0) return 0;
  return std::uniform_real_distribution<double>(-half_width, half_width)(rng);
}
}  // namespace detail

inline DailyScenario sample_scenario(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  DailyScenario day;
  for (std::size_t k = 0; k < cfg.meal_times_min.size(); ++k) {
    Meal m;
    m.start_min = cfg.meal_times_min[k] + detail::jitter(rng, cfg.meal_time_jitter_min);
    m.cho_g = cfg.meal_cho_g[k] * (1 + detail::jitter(rng, cfg.meal_cho_jitter));
    m.duration_min = cfg.meal_durations_min[k] * (1 + detail::jitter(rng, cfg.meal_duration_jitter));
    day.meals.push_back(m);
  }
  day.exercise_start_min = cfg.exercise_start_min + detail::jitter(rng, cfg.exercise_time_jitter_min);
  day.exercise_intensity = cfg.exercise_intensity;
  if (cfg.randomize_intensity)
    day.exercise_intensity =
        static_cast<ExerciseIntensity>(std::uniform_int_distribution<int>(0, 2)(rng));
  day.exercise_duration_min =
      cfg.exercise_duration_min * (1 + detail::jitter(rng, cfg.exercise_duration_jitter));
  return day;
}

inline DailyScenario sample_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_scenario(cfg, rng);
}

/// Per-minute export: time_min, cho_g_per_min, exercise_intensity.
inline void write_scenario_csv(std::ostream& os, const DailyScenario& day, int minutes = 1440) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "time_min,cho_g_per_min,exercise_intensity\n";
  for (int t = 0; t < minutes; ++t) {
    os << t << ',' << day.cho_rate(t) << ','
       << (day.exercising(t) ? to_string(day.exercise_intensity) : "none") << '\n';
  }
}

}  // namespace msqvi
