#pragma once

// Experiment runner behind the msqvi command-line tool: JSON config ingestion,
// seeded learning and evaluation trials, CSV artifacts.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "msqvi/msqvi.hpp"

#ifndef MSQVI_VERSION
#define MSQVI_VERSION "0.0.0"
#endif

namespace msqvi::cli {

using json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kExcitation = 3,
  kNonConvergence = 4,
  kDivergence = 5,
  kOracleFail = 6,
};

enum class PlantKind { kLq, kNonlinearToy, kGlucose, kConstantGlucose };

struct LqSection {
  LqGeneratorOptions generator{.state_dim = 2,
                               .n_players = 2,
                               .action_dim = 1,
                               .discount = 0.95,
                               .max_spectral_radius = 1.2,
                               .a_norm_cap = 0.9,
                               .input_scale = 0.01,
                               .coupling = 0.1,
                               .reference_norm = 0.9,
                               .action_bound = 1e3};
  std::uint64_t game_seed = 1;
  double start_half_width = 1.0;
};

struct ToySection {
  double discount = 0.95;
  double start_half_width = 1.0;
};

struct GlucoseSection {
  GlucoseGameOptions game;
  double setpoint = 120;
  double initial_glucose_min = 70;
  double initial_glucose_max = 180;
  bool randomized_scenarios = true;
  double patient_spread = 0;
  double cgm_noise_sd = 2;
};

struct ConstantSection {
  double glucose = 120;
};

struct LearningSection {
  Backend backend = Backend::kLs;
  std::size_t horizon = 3;
  std::optional<std::size_t> buffer_size;  // defaults to 12 h of data
  double tolerance = 1e-10;
  std::size_t max_rounds = 2000;
  double poe_threshold = 1e-8;
  PoeScaling poe_scaling = PoeScaling::kRaw;
  std::optional<PoeMode> poe_mode;
  double monotone_tolerance = 1e-7;
  std::optional<RankPolicy> ls_rank;
  double rank_tolerance = 1e-10;
  MomentKind lp_moments = MomentKind::kOnes;
  std::vector<double> lp_explicit_moments;
  double lp_weight_box = 1e9;
  bool lp_row_space = false;
  std::vector<std::pair<double, double>> exploration;  // per player, every action dim
};

struct Q0Section {
  std::optional<double> base;
  std::vector<double> own_action_multiplier;
};

struct ExperimentConfig {
  PlantKind plant = PlantKind::kGlucose;
  LqSection lq;
  ToySection toy;
  GlucoseSection glucose;
  ConstantSection constant;
  LearningSection learning;
  Q0Section q0;
  std::size_t trials = 1;
  double evaluation_days = 60;
  bool learned_controller = true;
  double oracle_gain_tolerance = 1e-3;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

inline const char* plant_name(PlantKind k) {
  switch (k) {
    case PlantKind::kLq: return "lq";
    case PlantKind::kNonlinearToy: return "nonlinear-toy";
    case PlantKind::kGlucose: return "glucose";
    case PlantKind::kConstantGlucose: return "constant-glucose";
  }
  return "?";
}

inline bool is_glucose(PlantKind k) {
  return k == PlantKind::kGlucose || k == PlantKind::kConstantGlucose;
}

inline Backend parse_backend(const std::string& s) {
  if (s == "ls") return Backend::kLs;
  if (s == "lp") return Backend::kLp;
  throw ConfigError("backend must be 'ls' or 'lp', got '" + s + "'");
}

inline std::string algorithm_name(const LearningSection& l) {
  return std::string(l.horizon == 1 ? "VI" : "MSQVI") + (l.backend == Backend::kLs ? "-LS" : "-LP");
}

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError((path_.empty() ? std::string("config") : path_) + " must be an object");
  }
  /// Rejects keys that no accessor asked for.
  void done() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown key '" + path_ + k + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + path_ + key + "': " + e.what());
    }
  }
  template <class T>
  void get(const char* key, std::optional<T>& out) {
    T v{};
    if (j_.contains(key)) {
      get(key, v);
      out = v;
    } else {
      seen_.insert(key);
    }
  }
  bool has(const char* key) const { return j_.contains(key); }
  const json* raw(const char* key) const { return j_.contains(key) ? &j_.at(key) : nullptr; }
  std::optional<Reader> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return std::optional<Reader>(std::in_place, j_.at(key), path_ + key + ".");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline ExperimentConfig parse_config(const json& root) {
  ExperimentConfig c;
  detail::Reader r(root, "");
  std::string plant = "glucose";
  r.get("plant", plant);
  if (plant == "lq") c.plant = PlantKind::kLq;
  else if (plant == "nonlinear-toy") c.plant = PlantKind::kNonlinearToy;
  else if (plant == "glucose") c.plant = PlantKind::kGlucose;
  else if (plant == "constant-glucose") c.plant = PlantKind::kConstantGlucose;
  else throw ConfigError("unknown plant '" + plant + "'");

  if (auto s = r.child("lq")) {
    auto& g = c.lq.generator;
    s->get("state_dim", g.state_dim);
    s->get("n_players", g.n_players);
    s->get("action_dim", g.action_dim);
    s->get("discount", g.discount);
    s->get("max_spectral_radius", g.max_spectral_radius);
    s->get("a_norm_cap", g.a_norm_cap);
    s->get("input_scale", g.input_scale);
    s->get("coupling", g.coupling);
    s->get("reference_norm", g.reference_norm);
    s->get("action_bound", g.action_bound);
    s->get("game_seed", c.lq.game_seed);
    s->get("start_half_width", c.lq.start_half_width);
    s->done();
  }
  if (auto s = r.child("nonlinear_toy")) {
    s->get("discount", c.toy.discount);
    s->get("start_half_width", c.toy.start_half_width);
    s->done();
  }
  if (auto s = r.child("glucose")) {
    auto& g = c.glucose.game;
    s->get("discount", g.discount);
    s->get("insulin_max", g.insulin_max);
    s->get("glucagon_max", g.glucagon_max);
    s->get("s11", g.s11);
    s->get("s22", g.s22);
    s->get("r11", g.r11);
    s->get("r12", g.r12);
    s->get("r21", g.r21);
    s->get("r22", g.r22);
    s->get("setpoint", c.glucose.setpoint);
    s->get("initial_glucose_min", c.glucose.initial_glucose_min);
    s->get("initial_glucose_max", c.glucose.initial_glucose_max);
    s->get("randomized_scenarios", c.glucose.randomized_scenarios);
    s->get("patient_spread", c.glucose.patient_spread);
    s->get("cgm_noise_sd", c.glucose.cgm_noise_sd);
    s->done();
  }
  if (auto s = r.child("constant_glucose")) {
    s->get("glucose", c.constant.glucose);
    s->done();
  }

  if (auto s = r.child("learning")) {
    auto& l = c.learning;
    std::string backend = "ls";
    s->get("backend", backend);
    l.backend = parse_backend(backend);
    s->get("horizon", l.horizon);
    s->get("buffer_size", l.buffer_size);
    s->get("tolerance", l.tolerance);
    s->get("max_rounds", l.max_rounds);
    s->get("poe_threshold", l.poe_threshold);
    std::string scaling = "raw";
    s->get("poe_scaling", scaling);
    if (scaling == "raw") l.poe_scaling = PoeScaling::kRaw;
    else if (scaling == "normalized") l.poe_scaling = PoeScaling::kNormalized;
    else throw ConfigError("poe_scaling must be 'raw' or 'normalized'");
    if (s->has("poe_mode")) {
      std::string mode;
      s->get("poe_mode", mode);
      if (mode == "strict") l.poe_mode = PoeMode::kStrict;
      else if (mode == "warn") l.poe_mode = PoeMode::kWarn;
      else throw ConfigError("poe_mode must be 'strict' or 'warn'");
    }
    s->get("monotone_tolerance", l.monotone_tolerance);
    if (s->has("ls_rank")) {
      std::string rank;
      s->get("ls_rank", rank);
      if (rank == "error") l.ls_rank = RankPolicy::kError;
      else if (rank == "min-norm") l.ls_rank = RankPolicy::kMinNorm;
      else throw ConfigError("ls_rank must be 'error' or 'min-norm'");
    }
    s->get("rank_tolerance", l.rank_tolerance);
    if (const json* m = s->raw("lp_moments")) {
      if (m->is_string()) {
        std::string kind;
        s->get("lp_moments", kind);
        if (kind == "ones") l.lp_moments = MomentKind::kOnes;
        else if (kind == "buffer") l.lp_moments = MomentKind::kBuffer;
        else throw ConfigError("lp_moments must be 'ones', 'buffer' or an array");
      } else {
        s->get("lp_moments", l.lp_explicit_moments);
        l.lp_moments = MomentKind::kExplicit;
      }
    }
    s->get("lp_weight_box", l.lp_weight_box);
    s->get("lp_row_space", l.lp_row_space);
    s->get("exploration", l.exploration);
    s->done();
  }
  if (auto s = r.child("q0")) {
    s->get("base", c.q0.base);
    s->get("own_action_multiplier", c.q0.own_action_multiplier);
    s->done();
  }
  r.get("trials", c.trials);
  r.get("evaluation_days", c.evaluation_days);
  std::string controller = "learned";
  r.get("controller", controller);
  if (controller == "learned") c.learned_controller = true;
  else if (controller == "zero") c.learned_controller = false;
  else throw ConfigError("controller must be 'learned' or 'zero'");
  r.get("oracle_gain_tolerance", c.oracle_gain_tolerance);
  r.get("seed", c.seed);
  r.get("output_dir", c.output_dir);
  r.done();

  if (c.trials == 0) throw ConfigError("trials must be positive");
  if (!(c.evaluation_days > 0)) throw ConfigError("evaluation_days must be positive");
  if (c.learning.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (c.glucose.initial_glucose_min > c.glucose.initial_glucose_max ||
      !(c.glucose.initial_glucose_min > 0))
    throw ConfigError("initial glucose range is invalid");
  if (c.glucose.cgm_noise_sd < 0 || c.glucose.patient_spread < 0 || c.glucose.patient_spread >= 1)
    throw ConfigError("glucose noise and spread must be in range");
  return c;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

/// Independent stream for (seed, trial, purpose).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(purpose)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

enum Stream : std::uint64_t {
  kLearnRng = 1,
  kLearnScenario = 2,
  kLearnNoise = 3,
  kEvalScenario = 4,
  kEvalNoise = 5,
  kPatient = 6,
};

/// Game, basis, plant factory and learning configuration for one trial.
struct TrialSetup {
  GameSpec game;
  BasisSpec basis;
  EvalConfig eval;
  Q0Profile q0;
  std::optional<LQGameSpec> lq;
};

inline TrialSetup make_setup(const ExperimentConfig& c, std::size_t trial) {
  TrialSetup s;
  const LearningSection& l = c.learning;
  switch (c.plant) {
    case PlantKind::kLq: {
      auto [lq, dyn] = generate_lq_game(c.lq.generator, c.lq.game_seed + trial);
      s.game = lq.game;
      s.basis = BasisSpec::exact_lq(s.game.state_dim, s.game.ref_dim, s.game.action_dims);
      s.lq = std::move(lq);
      break;
    }
    case PlantKind::kNonlinearToy:
      s.game = NonlinearToyDynamics::game(c.toy.discount);
      s.basis = BasisSpec::exact_lq(2, 1, s.game.action_dims);
      break;
    case PlantKind::kGlucose:
    case PlantKind::kConstantGlucose:
      s.game = glucose_game(c.glucose.game);
      s.basis = BasisSpec::glucose(s.game.action_dims);
      break;
  }
  const bool glucose = is_glucose(c.plant);
  EvalConfig& e = s.eval;
  e.backend = l.backend;
  e.horizon = l.horizon;
  e.buffer_size = l.buffer_size.value_or(144 / l.horizon);
  e.tolerance = l.tolerance;
  e.max_rounds = l.max_rounds;
  e.poe_threshold = l.poe_threshold;
  e.poe_scaling = l.poe_scaling;
  e.poe_mode = l.poe_mode.value_or(glucose ? PoeMode::kWarn : PoeMode::kStrict);
  e.monotone_tolerance = l.monotone_tolerance;
  e.ls.rank = l.ls_rank.value_or(glucose ? RankPolicy::kMinNorm : RankPolicy::kError);
  e.ls.rank_tolerance = l.rank_tolerance;
  e.lp.moment_kind = l.lp_moments;
  if (l.lp_moments == MomentKind::kExplicit)
    e.lp.moments = Eigen::Map<const Vector>(l.lp_explicit_moments.data(),
                                            static_cast<Index>(l.lp_explicit_moments.size()));
  e.lp.weight_box = l.lp_weight_box;
  e.lp.row_space = l.lp_row_space;
  if (!l.exploration.empty()) {
    if (l.exploration.size() != s.game.n_players())
      throw ConfigError("learning.exploration needs one [lo, hi] pair per player");
    for (std::size_t i = 0; i < l.exploration.size(); ++i)
      e.exploration.noise.push_back(NoiseRange::uniform(s.game.action_dims[i], l.exploration[i].first,
                                                        l.exploration[i].second));
  } else if (glucose) {
    e.exploration = ExplorationConfig::glucose();
  } else {
    e.exploration = ExplorationConfig::symmetric(s.game.action_dims, 1.0);
  }
  if (c.plant == PlantKind::kLq)
    e.restart = uniform_start(s.game.state_dim, s.game.ref_dim, c.lq.start_half_width);
  else if (c.plant == PlantKind::kNonlinearToy)
    e.restart = uniform_start(2, 1, c.toy.start_half_width);
  e.validate(s.game, s.basis);

  if (glucose) s.q0 = Q0Profile::glucose(c.q0.base.value_or(1.0));
  else s.q0 = Q0Profile::uniform(c.q0.base.value_or(1e3), s.game.n_players());
  if (!c.q0.own_action_multiplier.empty()) s.q0.own_action_multiplier = c.q0.own_action_multiplier;
  return s;
}

inline GlucosePatient trial_patient(const ExperimentConfig& c, std::size_t trial) {
  GlucosePatient p;
  p.cgm_noise_sd = c.glucose.cgm_noise_sd;
  if (c.glucose.patient_spread > 0) {
    std::mt19937_64 rng(derive_seed(c.seed, trial, kPatient));
    p = p.varied(rng, c.glucose.patient_spread);
  }
  return p;
}

inline ScenarioConfig trial_scenarios(const ExperimentConfig& c) {
  return c.glucose.randomized_scenarios ? ScenarioConfig{} : ScenarioConfig::nominal_only();
}

/// Plant a trial learns on. Glucose trials start at a random reading.
inline std::unique_ptr<Plant> make_learning_plant(const ExperimentConfig& c, const TrialSetup& s,
                                                  std::size_t trial) {
  switch (c.plant) {
    case PlantKind::kLq: {
      auto dyn = std::make_shared<LinearDynamics>(*s.lq);
      return std::make_unique<DynamicsPlant>(dyn, Vector::Zero(s.game.state_dim),
                                             Vector::Zero(s.game.ref_dim));
    }
    case PlantKind::kNonlinearToy:
      return std::make_unique<DynamicsPlant>(std::make_shared<NonlinearToyDynamics>(),
                                             Vector::Zero(2), Vector::Zero(1));
    case PlantKind::kGlucose: {
      std::mt19937_64 rng(derive_seed(c.seed, trial, kLearnRng) ^ 0x9e3779b97f4a7c15ULL);
      GlucosePlant::Options o;
      o.initial_glucose = std::uniform_real_distribution<double>(
          c.glucose.initial_glucose_min, c.glucose.initial_glucose_max)(rng);
      o.setpoint = c.glucose.setpoint;
      o.scenario_seed = derive_seed(c.seed, trial, kLearnScenario);
      o.noise_seed = derive_seed(c.seed, trial, kLearnNoise);
      return std::make_unique<GlucosePlant>(trial_patient(c, trial), trial_scenarios(c), o);
    }
    case PlantKind::kConstantGlucose:
      return std::make_unique<ConstantGlucosePlant>(c.constant.glucose, c.glucose.setpoint);
  }
  throw ConfigError("unknown plant");
}

/// Fresh scenarios and noise for the post-convergence replay, continuing from
/// the last learning-phase reading.
inline std::unique_ptr<CgmPlant> make_evaluation_plant(const ExperimentConfig& c, std::size_t trial,
                                                       double initial_glucose) {
  if (c.plant == PlantKind::kConstantGlucose)
    return std::make_unique<ConstantGlucosePlant>(c.constant.glucose, c.glucose.setpoint);
  GlucosePlant::Options o;
  o.initial_glucose = initial_glucose;
  o.setpoint = c.glucose.setpoint;
  o.scenario_seed = derive_seed(c.seed, trial, kEvalScenario);
  o.noise_seed = derive_seed(c.seed, trial, kEvalNoise);
  return std::make_unique<GlucosePlant>(trial_patient(c, trial), trial_scenarios(c), o);
}

inline GlycaemicSummary summarize_plant(const CgmPlant& p) {
  const auto& cgm = p.cgm_trace();
  const std::size_t n = p.insulin_trace().size();
  if (n == 0) throw ConfigError("no samples to summarize");
  return summarize_trace(std::span(cgm).first(n), p.insulin_trace(), p.glucagon_trace(),
                         p.sample_period_min());
}

/// Maps a library exception to the tool's exit code.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e)) return kConfig;
  if (dynamic_cast<const ExcitationError*>(&e)) return kExcitation;
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const ModelBlowupError*>(&e))
    return kDivergence;
  return kOther;
}

struct TrialOutcome {
  int code = kOk;
  std::string error;
  std::size_t rounds = 0;
  bool converged = false;
  double final_delta = 0;
  std::optional<GlycaemicSummary> learning;
  std::optional<GlycaemicSummary> converged_summary;
  std::optional<double> max_gain_error;
  std::size_t monotone_violations = 0;
};

inline std::string trial_dir_name(std::size_t t) {
  std::ostringstream os;
  os << "trial_" << std::setw(3) << std::setfill('0') << t;
  return os.str();
}

enum class Command { kLearn, kEvaluate, kOracleCheck };

inline const char* command_name(Command c) {
  switch (c) {
    case Command::kLearn: return "learn";
    case Command::kEvaluate: return "evaluate";
    case Command::kOracleCheck: return "oracle-check";
  }
  return "?";
}

/// Learning (when requested) and the follow-up work of one trial. Everything
/// the trial writes goes below `dir`.
inline TrialOutcome run_trial(const ExperimentConfig& c, Command cmd, std::size_t trial,
                              const std::filesystem::path& dir) {
  TrialOutcome out;
  std::filesystem::create_directories(dir);
  try {
    const TrialSetup s = make_setup(c, trial);
    auto plant = make_learning_plant(c, s, trial);
    Profile policies = zero_profile(s.game.action_dims);
    double last_reading = c.glucose.setpoint;

    if (cmd != Command::kEvaluate || c.learned_controller) {
      std::ofstream log(dir / "iteration_log.csv");
      write_iteration_log_header(log, s.basis.size());
      auto observer = [&](const IterationReport& rep, const GameBuffer&) {
        write_iteration_log_rows(log, rep);
        for (std::size_t v : rep.monotone_violations) out.monotone_violations += v;
        out.final_delta = *std::max_element(rep.delta.begin(), rep.delta.end());
        ++out.rounds;
      };
      std::mt19937_64 rng(derive_seed(c.seed, trial, kLearnRng));
      const auto q0 = init_q0(s.basis, s.q0);
      MsqviResult res;
      try {
        res = run_msqvi(*plant, s.game, s.basis, s.eval, q0, rng, observer);
      } catch (...) {
        if (auto* g = dynamic_cast<CgmPlant*>(plant.get()); g && !g->insulin_trace().empty())
          out.learning = summarize_plant(*g);
        throw;
      }
      out.converged = res.converged;
      for (std::size_t i = 0; i < res.q.size(); ++i) {
        std::ofstream w(dir / ("weights_player" + std::to_string(i + 1) + ".csv"));
        write_weights(w, res.q[i]);
        if (res.policies[i].linear()) {
          std::ofstream p(dir / ("policy_player" + std::to_string(i + 1) + ".csv"));
          write_policy(p, res.policies[i], s.basis);
        }
      }
      policies = res.policies;
      if (auto* g = dynamic_cast<CgmPlant*>(plant.get())) {
        out.learning = summarize_plant(*g);
        last_reading = g->cgm_trace().back();
      }
      if (!res.converged) out.code = kNonConvergence;

      if (cmd == Command::kOracleCheck) {
        if (!s.lq) throw ConfigError("oracle-check requires the lq plant");
        const ExactLQSolution exact = exact_vi_lq(*s.lq);
        double err = 0;
        for (std::size_t i = 0; i < policies.size(); ++i) {
          Matrix gain;
          if (!linear_gain_over(policies[i], s.basis.signals(), gain))
            throw ConfigError("learned policy is not a linear feedback");
          err = std::max(err, (gain - exact.gains[i]).cwiseAbs().maxCoeff());
        }
        out.max_gain_error = err;
      }
    }

    if (cmd == Command::kEvaluate) {
      if (!is_glucose(c.plant)) throw ConfigError("evaluate requires a glucose plant");
      auto ev = make_evaluation_plant(c, trial, last_reading);
      const auto steps = static_cast<std::size_t>(c.evaluation_days * 1440.0 / ev->sample_period_min());
      for (std::size_t k = 0; k < steps; ++k) {
        const Vector& x = ev->state();
        if (!x.allFinite()) throw DivergenceError(k, "non-finite CGM state");
        ev->step(act(policies, x, ev->reference(), s.game));
      }
      out.converged_summary = summarize_plant(*ev);
    }
  } catch (const std::exception& e) {
    out.code = exit_code_for(e);
    out.error = e.what();
  }
  return out;
}

/// Runs `fn(t)` for every trial on up to `workers` threads.
template <class Fn>
void for_each_trial(std::size_t trials, std::size_t workers, Fn fn) {
  workers = std::clamp<std::size_t>(workers, 1, trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) fn(t);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

struct RunOptions {
  Command command = Command::kLearn;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t workers = 1;
  std::optional<std::string> backend;
  std::optional<std::size_t> horizon;
};

inline void write_manifest(const std::filesystem::path& dir, const RunOptions& opt,
                           const ExperimentConfig& c, const std::string& hash) {
  std::ofstream m(dir / "manifest.csv");
  m << "key,value\n"
    << "command," << command_name(opt.command) << '\n'
    << "config_hash," << hash << '\n'
    << "seed," << c.seed << '\n'
    << "code_version," << MSQVI_VERSION << '\n'
    << "monomial_order," << kMonomialOrderVersion << '\n'
    << "plant," << plant_name(c.plant) << '\n'
    << "algorithm," << algorithm_name(c.learning) << '\n'
    << "trials," << c.trials << '\n';
}

/// Full subcommand: returns the process exit code. Diagnostics go to `err`.
inline int run_command(const RunOptions& opt, std::ostream& err) {
  ExperimentConfig c;
  std::string hash;
  try {
    const std::string text = read_file(opt.config_path);
    hash = content_hash(text);
    c = parse_config_text(text);
    if (opt.seed) c.seed = *opt.seed;
    if (opt.out) c.output_dir = *opt.out;
    if (opt.backend) c.learning.backend = parse_backend(*opt.backend);
    if (opt.horizon) {
      if (*opt.horizon < 1) throw ConfigError("horizon must be at least 1");
      c.learning.horizon = *opt.horizon;
    }
    if (opt.command == Command::kOracleCheck && c.plant != PlantKind::kLq)
      throw ConfigError("oracle-check requires the lq plant");
    if (opt.command == Command::kEvaluate && !is_glucose(c.plant))
      throw ConfigError("evaluate requires a glucose plant");
    make_setup(c, 0);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  }

  const std::filesystem::path root(c.output_dir);
  std::filesystem::create_directories(root);
  write_manifest(root, opt, c, hash);

  std::vector<TrialOutcome> outcomes(c.trials);
  for_each_trial(c.trials, opt.workers, [&](std::size_t t) {
    outcomes[t] = run_trial(c, opt.command, t, root / trial_dir_name(t));
  });

  {
    std::ofstream f(root / "trials.csv");
    msqvi::detail::exact(f);
    f << "trial,rounds,converged,final_delta,monotone_violations,exit_code,error\n";
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      const auto& o = outcomes[t];
      std::string msg = o.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      f << t << ',' << o.rounds << ',' << (o.converged ? 1 : 0) << ',' << o.final_delta << ','
        << o.monotone_violations << ',' << o.code << ',' << msg << '\n';
    }
  }

  const std::string algo = c.learned_controller || opt.command != Command::kEvaluate
                               ? algorithm_name(c.learning)
                               : std::string("zero");
  if (is_glucose(c.plant) && opt.command != Command::kOracleCheck) {
    std::ofstream f(root / "summary.csv");
    write_summary_header(f);
    std::vector<GlycaemicSummary> learn, conv;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      if (outcomes[t].learning) {
        write_summary_row(f, trial_dir_name(t), "learning", algo, *outcomes[t].learning);
        learn.push_back(*outcomes[t].learning);
      }
      if (outcomes[t].converged_summary) {
        write_summary_row(f, trial_dir_name(t), "converged", algo, *outcomes[t].converged_summary);
        conv.push_back(*outcomes[t].converged_summary);
      }
    }
    if (!learn.empty()) write_summary_row(f, "mean", "learning", algo, average(learn));
    if (!conv.empty()) write_summary_row(f, "mean", "converged", algo, average(conv));
  }

  bool oracle_ok = true;
  if (opt.command == Command::kOracleCheck) {
    std::ofstream f(root / "oracle_report.csv");
    msqvi::detail::exact(f);
    f << "game,rounds,converged,max_gain_error,tolerance,pass\n";
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      const auto& o = outcomes[t];
      const bool pass = o.code == kOk && o.converged && o.max_gain_error &&
                        *o.max_gain_error <= c.oracle_gain_tolerance;
      oracle_ok = oracle_ok && pass;
      f << t << ',' << o.rounds << ',' << (o.converged ? 1 : 0) << ','
        << (o.max_gain_error ? *o.max_gain_error : std::numeric_limits<double>::quiet_NaN()) << ','
        << c.oracle_gain_tolerance << ',' << (pass ? "pass" : "fail") << '\n';
    }
  }

  int code = kOk;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const auto& o = outcomes[t];
    if (o.code == kOk) continue;
    if (!o.error.empty()) err << trial_dir_name(t) << ": " << o.error << '\n';
    else err << trial_dir_name(t) << ": round cap reached before convergence\n";
    if (code == kOk) code = o.code;
  }
  if (opt.command == Command::kOracleCheck && !oracle_ok) return kOracleFail;
  return code;
}

}  // namespace msqvi::cli
