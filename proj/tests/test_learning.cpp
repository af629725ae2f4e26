#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "msqvi/msqvi.hpp"
#include "support/lq_benchmark.hpp"

namespace msqvi {
namespace {

using bench::make_lq_run;

Policy linear(const BasisSpec& b, std::initializer_list<double> gains) {
  Matrix k(1, static_cast<Index>(gains.size()));
  Index j = 0;
  for (double g : gains) k(0, j++) = g;
  return Policy(LinearFeedback{b.signals(), k});
}

// Brute-force LP oracle: best feasible vertex of max c'w, A w <= b, |w| <= u.
double vertex_enumeration(const BoxLp& lp) {
  const Index n = lp.a.cols(), m = lp.a.rows();
  Matrix all(m + 2 * n, n);
  Vector rhs(m + 2 * n);
  all.topRows(m) = lp.a;
  rhs.head(m) = lp.b;
  for (Index k = 0; k < n; ++k) {
    all.row(m + 2 * k) = Vector::Unit(n, k).transpose();
    all.row(m + 2 * k + 1) = -Vector::Unit(n, k).transpose();
    rhs(m + 2 * k) = rhs(m + 2 * k + 1) = lp.bound(k);
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Index> pick(static_cast<std::size_t>(n));
  std::function<void(Index, Index)> rec = [&](Index depth, Index start) {
    if (depth == n) {
      Matrix s(n, n);
      Vector t(n);
      for (Index k = 0; k < n; ++k) {
        s.row(k) = all.row(pick[static_cast<std::size_t>(k)]);
        t(k) = rhs(pick[static_cast<std::size_t>(k)]);
      }
      Eigen::FullPivLU<Matrix> lu(s);
      if (lu.rank() < n) return;
      const Vector w = lu.solve(t);
      if (((all * w - rhs).array() <= 1e-9).all()) best = std::max(best, lp.c.dot(w));
      return;
    }
    for (Index r = start; r < all.rows(); ++r) {
      pick[static_cast<std::size_t>(depth)] = r;
      rec(depth + 1, r + 1);
    }
  };
  rec(0, 0);
  return best;
}

GameBuffer constant_buffer(std::size_t b_size) {
  // One scalar action, no signals: Phi = a^2 with a = 1, stage cost R a^2.
  GameBuffer buf;
  buf.horizon = 1;
  for (std::size_t b = 0; b < b_size; ++b) {
    BufferTuple t;
    t.first = {Vector::Zero(1), Vector::Zero(1), {Vector::Ones(1)}};
    t.on_policy = {{Vector::Zero(1), Vector::Zero(1), {Vector::Ones(1)}}};
    buf.tuples.push_back(t);
  }
  return buf;
}

GameSpec constant_cost_game(double cost, double discount) {
  GameSpec g;
  g.state_dim = 1;
  g.ref_dim = 1;
  g.action_dims = {1};
  g.discount = discount;
  g.output_map = Matrix::Identity(1, 1);
  g.state_cost = {Matrix::Identity(1, 1)};
  g.action_cost = {{Matrix::Constant(1, 1, cost)}};
  g.action_bounds = {ActionBounds::unbounded(1)};
  return g;
}

TEST(Explore, FirstRoundNoiseWithinPublishedRange) {
  const GameSpec g = glucose_game();
  const Profile zero = zero_profile({1, 1});
  const ExplorationConfig cfg = ExplorationConfig::glucose();
  std::mt19937_64 rng(1);
  Vector x(2);
  x << 150, 0;
  const Vector r = Vector::Constant(1, 120);
  for (int k = 0; k < 1000; ++k) {
    const double a1 = explore_action(zero, zero, 0, x, r, 0, cfg, g, rng)(0);
    const double a2 = explore_action(zero, zero, 0, x, r, 1, cfg, g, rng)(0);
    EXPECT_GE(a1, 1e-3);
    EXPECT_LE(a1, 5e-3);
    EXPECT_GE(a2, 1e-5);
    EXPECT_LE(a2, 5e-5);
  }
}

TEST(Explore, EqualPoliciesAddNoiseOnly) {
  const GameSpec g = glucose_game();
  const BasisSpec b = BasisSpec::glucose();
  const Profile mu{linear(b, {1e-3, 0, 0, 0, 0, 0}), Policy::zero(1)};
  ExplorationConfig cfg;
  cfg.noise = {NoiseRange::uniform(1, 0.25, 0.25), NoiseRange::uniform(1, 0, 0)};
  std::mt19937_64 rng(1);
  Vector x(2);
  x << 150, 0;
  const Vector r = Vector::Constant(1, 120);
  EXPECT_NEAR(explore_action(mu, mu, 4, x, r, 0, cfg, g, rng)(0), 0.4, 1e-15);
}

TEST(Explore, LaterRoundsAverageCurrentAndPrevious) {
  const GameSpec g = glucose_game();
  const BasisSpec b = BasisSpec::glucose();
  const Profile now{linear(b, {1e-3, 0, 0, 0, 0, 0}), Policy::zero(1)};
  const Profile prev{linear(b, {3e-3, 0, 0, 0, 0, 0}), Policy::zero(1)};
  ExplorationConfig cfg;
  cfg.noise = {NoiseRange::uniform(1, 0, 0), NoiseRange::uniform(1, 0, 0)};
  std::mt19937_64 rng(1);
  Vector x(2);
  x << 100, 0;
  const Vector r = Vector::Constant(1, 120);
  EXPECT_NEAR(explore_action(now, prev, 1, x, r, 0, cfg, g, rng)(0), 0.2, 1e-15);
  EXPECT_NEAR(explore_action(now, prev, 0, x, r, 0, cfg, g, rng)(0), 0.1, 1e-15);
}

TEST(Explore, ClampsToBounds) {
  const GameSpec g = glucose_game();
  const Profile zero = zero_profile({1, 1});
  ExplorationConfig cfg;
  cfg.noise = {NoiseRange::uniform(1, 5, 5), NoiseRange::uniform(1, -1, -1)};
  std::mt19937_64 rng(1);
  const Vector x = Vector::Constant(2, 100), r = Vector::Constant(1, 120);
  EXPECT_EQ(explore_action(zero, zero, 0, x, r, 0, cfg, g, rng)(0), 2.0);
  EXPECT_EQ(explore_action(zero, zero, 0, x, r, 1, cfg, g, rng)(0), 0.0);
}

TEST(Buffer, SingleStepHorizon) {
  auto run = make_lq_run(1, 1);
  DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
  const Profile zero = zero_profile({1, 1});
  std::mt19937_64 rng(3);
  const GameBuffer buf =
      collect_buffer(plant, run.lq.game, zero, zero, 0, run.cfg.exploration,
                     {.horizon = 1, .buffer_size = 10, .restart = run.cfg.restart}, rng);
  ASSERT_EQ(buf.size(), 10u);
  for (const auto& t : buf.tuples) {
    ASSERT_EQ(t.on_policy.size(), 1u);
    const Vector next = run.dynamics->step(t.first.state, t.first.actions);
    EXPECT_EQ(t.on_policy[0].state, next);
    EXPECT_EQ(t.on_policy[0].reference, run.dynamics->ref_step(t.first.reference));
    EXPECT_TRUE(t.on_policy[0].actions[0].isZero(0.0));
  }
}

TEST(Buffer, MultiStepTrajectoryConsistency) {
  auto run = make_lq_run(2, 3);
  const auto exact = exact_vi_lq(run.lq);
  const Profile mu = exact_profile(run.lq, exact.gains);
  DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
  std::mt19937_64 rng(3);
  const GameBuffer buf = collect_buffer(plant, run.lq.game, mu, mu, 1, run.cfg.exploration,
                                        {.horizon = 3, .buffer_size = 8, .restart = run.cfg.restart},
                                        rng);
  for (const auto& t : buf.tuples) {
    ASSERT_EQ(t.on_policy.size(), 3u);
    Vector x = run.dynamics->step(t.first.state, t.first.actions);
    for (std::size_t m = 0; m < 3; ++m) {
      EXPECT_LE((t.on_policy[m].state - x).norm(), 1e-14);
      const auto u = act(mu, t.on_policy[m].state, t.on_policy[m].reference, run.lq.game);
      EXPECT_EQ(t.on_policy[m].actions[0], u[0]);
      x = run.dynamics->step(x, u);
    }
  }
}

TEST(Buffer, TwelveHoursOfGlucoseDataPerRound) {
  GlucosePatient p;
  GlucosePlant plant(p, ScenarioConfig{}, {});
  const GameSpec g = glucose_game();
  const Profile zero = zero_profile({1, 1});
  std::mt19937_64 rng(4);
  const long before = plant.minute();
  collect_buffer(plant, g, zero, zero, 0, ExplorationConfig::glucose(),
                 {.horizon = 3, .buffer_size = 48}, rng);
  EXPECT_EQ(plant.minute() - before, 720);
  EXPECT_EQ(plant.insulin_trace().size(), 144u);
}

TEST(Buffer, ChainedTuplesContinueTheTrajectory) {
  GlucosePatient p;
  GlucosePlant plant(p, ScenarioConfig{}, {});
  const Profile zero = zero_profile({1, 1});
  std::mt19937_64 rng(4);
  const GameBuffer buf = collect_buffer(plant, glucose_game(), zero, zero, 0,
                                        ExplorationConfig::glucose(), {.horizon = 3, .buffer_size = 4}, rng);
  for (std::size_t b = 1; b < buf.size(); ++b) {
    const Vector& end = buf.tuples[b - 1].on_policy.back().state;
    EXPECT_EQ(buf.tuples[b].first.state, end);
  }
}

TEST(Buffer, SeededCollectionIsReproducible) {
  auto run = make_lq_run(3, 3);
  const Profile zero = zero_profile({1, 1});
  auto collect = [&] {
    DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
    std::mt19937_64 rng(77);
    return collect_buffer(plant, run.lq.game, zero, zero, 0, run.cfg.exploration,
                          {.horizon = 3, .buffer_size = 20, .restart = run.cfg.restart}, rng);
  };
  const GameBuffer a = collect(), b = collect();
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.tuples[k].first.state, b.tuples[k].first.state);
    EXPECT_EQ(a.tuples[k].first.actions[1], b.tuples[k].first.actions[1]);
    EXPECT_EQ(a.tuples[k].on_policy.back().state, b.tuples[k].on_policy.back().state);
  }
}

TEST(Target, MultiStepDiscountedSum) {
  const GameSpec g = constant_cost_game(1.0, 0.5);
  const BasisSpec basis({}, {1});
  GameBuffer buf = constant_buffer(1);
  buf.horizon = 3;
  buf.tuples[0].on_policy.assign(3, buf.tuples[0].on_policy[0]);
  const QFunction q(basis, 0, Vector::Constant(1, 8.0));
  // 1 + 0.5 + 0.25 + 0.125 * 8
  EXPECT_DOUBLE_EQ(multi_step_target(buf.tuples[0], g, q, 3), 2.75);
  EXPECT_DOUBLE_EQ(multi_step_target(buf.tuples[0], g, q, 1), 5.0);
  EXPECT_THROW(multi_step_target(buf.tuples[0], g, q, 4), DimensionError);
}

TEST(Poe, IdentityFeaturesGiveOneOverK) {
  const Matrix psi = Matrix::Identity(6, 6);
  EXPECT_NEAR(poe_lambda_min(psi), 1.0 / 6.0, 1e-15);
}

TEST(Poe, DuplicatedSampleFails) {
  auto run = make_lq_run(1);
  GameBuffer buf;
  buf.horizon = 1;
  TrackingSample s{Vector::Ones(2), Vector::Ones(2), {Vector::Ones(1), Vector::Ones(1)}};
  for (int k = 0; k < 40; ++k) buf.tuples.push_back({s, {s}});
  const PoeResult r = poe_check(buf, run.basis, 0, 1e-12);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.lambda_min, 0.0, 1e-12);
  try {
    require_poe(buf, run.basis, 1, 1e-8);
    FAIL() << "expected ExcitationError";
  } catch (const ExcitationError& e) {
    EXPECT_EQ(e.player(), 1u);
    EXPECT_NE(std::string(e.what()).find("player 2"), std::string::npos);
  }
}

TEST(Poe, RandomizedExplorationPassesOnBenchmark) {
  auto run = make_lq_run(5);
  DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
  const Profile zero = zero_profile({1, 1});
  std::mt19937_64 rng(5);
  const GameBuffer buf = collect_buffer(plant, run.lq.game, zero, zero, 0, run.cfg.exploration,
                                        {.horizon = 3, .buffer_size = 48, .restart = run.cfg.restart},
                                        rng);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(poe_check(buf, run.basis, i, 1e-8).passed);
}

TEST(Ls, ConstantRegressionReturnsCost) {
  const GameSpec g = constant_cost_game(3.0, 0.0 + 1e-300);
  const BasisSpec basis({}, {1});
  const GameBuffer buf = constant_buffer(5);
  const auto e = ls_evaluate(buf, QFunction(basis, 0, Vector::Constant(1, 7.0)), g);
  EXPECT_NEAR(e.q.weights()(0), 3.0, 1e-12);
}

TEST(Ls, ScalarBellmanFixedPoint) {
  const GameSpec g = constant_cost_game(1.0, 0.5);
  const BasisSpec basis({}, {1});
  const GameBuffer buf = constant_buffer(5);
  const auto e = ls_evaluate(buf, QFunction(basis, 0, Vector::Constant(1, 2.0)), g);
  EXPECT_NEAR(e.q.weights()(0), 2.0, 1e-14);
}

TEST(Ls, ResidualNotWorseThanPreviousWeights) {
  auto run = make_lq_run(4);
  DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
  const Profile zero = zero_profile({1, 1});
  std::mt19937_64 rng(5);
  const GameBuffer buf = collect_buffer(plant, run.lq.game, zero, zero, 0, run.cfg.exploration,
                                        {.horizon = 3, .buffer_size = 60, .restart = run.cfg.restart},
                                        rng);
  const Regression reg = assemble_regression(buf, run.lq.game, run.q0[0]);
  const LsResult ls = ls_solve(reg.psi, reg.target, 0);
  EXPECT_LE(ls.residual_norm, (reg.psi * run.q0[0].weights() - reg.target).norm());
}

TEST(Ls, RankDeficiencyPolicy) {
  Matrix psi(4, 2);
  psi << 1, 2, 2, 4, 3, 6, 4, 8;
  const Vector z = Vector::LinSpaced(4, 1, 4);
  EXPECT_THROW(ls_solve(psi, z, 0), SingularityError);
  LsOptions opt;
  opt.rank = RankPolicy::kMinNorm;
  const LsResult r = ls_solve(psi, z, 0, opt);
  EXPECT_EQ(r.rank, 1);
  EXPECT_LE(r.residual_norm, 1e-12);
}

TEST(Lp, OneDimensionalBindingConstraint) {
  const BasisSpec basis({}, {1});
  const Matrix psi = Matrix::Ones(4, 1);
  const Vector z = Vector::Constant(4, 2.5);
  LpOptions opt;
  opt.weight_box = 10;
  const auto e = lp_solve(psi, z, basis, 0, opt);
  EXPECT_NEAR(e.q.weights()(0), 2.5, 1e-12);
  EXPECT_EQ(e.box_binding, 0u);
}

TEST(Lp, SlackConstraintsHitTheBox) {
  const BasisSpec basis({Signal::state(0)}, {1});
  // Only the sum w1 + w3 is constrained; w2 is free up to the box.
  Matrix psi(3, 3);
  psi << 1, 0, 1, 1, 0, 1, 1, 0, 1;
  LpOptions opt;
  opt.weight_box = 50;
  opt.moment_kind = MomentKind::kExplicit;
  opt.moments = Vector(3);
  opt.moments << 1, -1, 0.5;
  const auto e = lp_solve(psi, Vector::Constant(3, 1.0), basis, 0, opt);
  EXPECT_NEAR(e.q.weights()(1), -50, 1e-9);
  EXPECT_GE(e.box_binding, 2u);
}

TEST(Lp, MatchesVertexEnumeration) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 40; ++trial) {
    const Index vars = 2 + trial % 2, rows = 6;
    BoxLp lp{Matrix(rows, vars), Vector(rows), Vector(vars), Vector::Constant(vars, 5.0)};
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < vars; ++j) lp.a(i, j) = n(rng);
      lp.b(i) = std::abs(n(rng)) + 0.1;
    }
    for (Index j = 0; j < vars; ++j) lp.c(j) = n(rng);
    const LpSolution sol = solve_box_lp(lp);
    EXPECT_NEAR(sol.objective, vertex_enumeration(lp), 1e-8 * (1 + std::abs(sol.objective)));
    EXPECT_LE(sol.max_violation, 1e-9);
    EXPECT_LE(sol.duality_gap, 1e-8);
  }
}

TEST(Lp, InfeasibleSystemReported) {
  BoxLp lp{Matrix(2, 1), Vector(2), Vector::Ones(1), Vector::Constant(1, 1.0)};
  lp.a << 1, -1;
  lp.b << -2, -2;
  try {
    solve_box_lp(lp);
    FAIL() << "expected LpError";
  } catch (const LpError& e) {
    EXPECT_EQ(e.kind(), LpError::Kind::kInfeasible);
  }
}

TEST(Lp, AgreesWithLsOnBenchmarkAfterConvergence) {
  auto ls_run = make_lq_run(6, 3, Backend::kLs);
  auto lp_run = make_lq_run(6, 3, Backend::kLp);
  const MsqviResult ls = bench::learn(ls_run, 1);
  const MsqviResult lp = bench::learn(lp_run, 1);
  ASSERT_TRUE(ls.converged);
  ASSERT_TRUE(lp.converged);
  for (const auto& rep : lp.reports)
    for (std::size_t b : rep.box_binding) EXPECT_EQ(b, 0u);
  for (const auto& t : lp.last_buffer.tuples)
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_NEAR(ls.q[i](t.first), lp.q[i](t.first), 1e-6 * (1 + std::abs(ls.q[i](t.first))));
}

TEST(ProblemSize, IndependentOfHorizon) {
  auto run = make_lq_run(7);
  for (std::size_t h : {1u, 3u, 6u}) {
    DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
    const Profile zero = zero_profile({1, 1});
    std::mt19937_64 rng(1);
    const GameBuffer buf = collect_buffer(plant, run.lq.game, zero, zero, 0, run.cfg.exploration,
                                          {.horizon = h, .buffer_size = 48, .restart = run.cfg.restart},
                                          rng);
    const Regression reg = assemble_regression(buf, run.lq.game, run.q0[0]);
    EXPECT_EQ(reg.psi.rows(), 48);
    EXPECT_EQ(reg.psi.cols(), run.basis.size());
    EXPECT_EQ(reg.target.size(), 48);
    const auto lp = lp_evaluate(buf, run.q0[0], run.lq.game, run.cfg.lp);
    EXPECT_EQ(lp.q.size(), run.basis.size());
  }
}

TEST(RunMsqvi, InfiniteToleranceStopsAfterOneRound) {
  auto run = make_lq_run(1);
  run.cfg.tolerance = std::numeric_limits<double>::infinity();
  const MsqviResult res = bench::learn(run, 1);
  EXPECT_EQ(res.rounds(), 1u);
  EXPECT_TRUE(res.converged);
}

TEST(RunMsqvi, UnitHorizonMatchesValueIteration) {
  auto run = make_lq_run(2, 1);
  const MsqviResult a = bench::learn(run, 9);
  DynamicsPlant plant(run.dynamics, Vector::Zero(2), Vector::Zero(2));
  std::mt19937_64 rng(9);
  EvalConfig cfg = run.cfg;
  cfg.horizon = 5;
  const MsqviResult b = run_vi(plant, run.lq.game, run.basis, cfg, run.q0, rng);
  ASSERT_EQ(a.rounds(), b.rounds());
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a.q[i].weights(), b.q[i].weights());
}

TEST(RunMsqvi, ConvergesToOracleGains) {
  auto run = make_lq_run(3);
  const MsqviResult res = bench::learn(run, 2);
  ASSERT_TRUE(res.converged);
  EXPECT_LE(bench::gain_error(run, res, exact_vi_lq(run.lq)), 1e-6);
  for (const auto& rep : res.reports)
    for (std::size_t v : rep.monotone_violations) EXPECT_EQ(v, 0u);
}

TEST(RunMsqvi, RoundCapReportsNonConvergence) {
  auto run = make_lq_run(4);
  run.cfg.max_rounds = 2;
  const MsqviResult res = bench::learn(run, 2);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.rounds(), 2u);
  EXPECT_FALSE(res.reports.back().converged);
}

TEST(RunMsqvi, ExcitationFailurePropagates) {
  auto run = make_lq_run(4);
  run.cfg.exploration = ExplorationConfig::symmetric({1, 1}, 0.0);
  run.cfg.restart = [](std::mt19937_64&) { return std::pair{Vector::Ones(2).eval(), Vector::Ones(2).eval()}; };
  EXPECT_THROW(bench::learn(run, 2), ExcitationError);
}

TEST(RunMsqvi, ObserverSeesEveryRound) {
  auto run = make_lq_run(5);
  std::size_t seen = 0;
  const MsqviResult res = bench::learn(run, 3, [&](const IterationReport& r, const GameBuffer& b) {
    EXPECT_EQ(r.round, seen++);
    EXPECT_EQ(b.size(), 48u);
    for (double d : r.delta) EXPECT_GE(d, 0.0);
  });
  EXPECT_EQ(seen, res.rounds());
}

TEST(RunMsqvi, ConfigValidation) {
  auto run = make_lq_run(5);
  run.cfg.buffer_size = 10;
  EXPECT_THROW(bench::learn(run, 1), ConfigError);
  run.cfg.buffer_size = 48;
  run.cfg.horizon = 0;
  EXPECT_THROW(bench::learn(run, 1), ConfigError);
}

TEST(InitQ0, UnitProfileIsIdentity) {
  const BasisSpec b = BasisSpec::glucose();
  const QFunction q = init_q0(b, 0, Q0Profile::uniform(1.0, 2));
  EXPECT_TRUE(q.matrix().isApprox(Matrix::Identity(8, 8)));
}

TEST(InitQ0, GlucoseProfileRatios) {
  const BasisSpec b = BasisSpec::glucose();
  const auto qs = init_q0(b, Q0Profile::glucose());
  for (std::size_t i = 0; i < 2; ++i) {
    const auto names = b.monomial_names(i);
    const Vector& w = qs[i].weights();
    const auto own = std::find(names.begin(), names.end(), "a" + std::to_string(i + 1) + "^2");
    ASSERT_NE(own, names.end());
    const Index k = own - names.begin();
    double rest = 0;
    for (Index j = 0; j < w.size(); ++j)
      if (j != k) rest = std::max(rest, std::abs(w(j)));
    EXPECT_DOUBLE_EQ(w(k) / rest, i == 0 ? 1e5 : 1e8);
  }
}

TEST(InitQ0, PositiveOnRandomSamples) {
  const BasisSpec b = BasisSpec::glucose();
  const auto qs = init_q0(b, Q0Profile::glucose(1e-3));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int k = 0; k < 200; ++k) {
    Vector x(2);
    x << n(rng), n(rng);
    const TrackingSample s{x, Vector::Constant(1, n(rng)),
                           {Vector::Constant(1, n(rng)), Vector::Constant(1, n(rng))}};
    EXPECT_GT(qs[0](s), 0.0);
    EXPECT_GT(qs[1](s), 0.0);
  }
}

TEST(InitQ0, RejectsNonPositiveScales) {
  EXPECT_THROW(init_q0(BasisSpec::glucose(), Q0Profile{0.0, {1, 1}}), ConfigError);
  EXPECT_THROW(init_q0(BasisSpec::glucose(), Q0Profile{1.0, {1}}), DimensionError);
}

TEST(Io, WeightsRoundTrip) {
  const BasisSpec b = BasisSpec::glucose();
  Vector w = Vector::LinSpaced(36, -1.0 / 3, 7.0 / 3);
  const QFunction q(b, 1, w);
  std::stringstream ss;
  write_weights(ss, q);
  const QFunction back = read_weights(ss, b, 1);
  EXPECT_EQ(back.weights(), w);
}

TEST(Io, WeightsRejectOtherOrder) {
  std::stringstream ss("# monomial_order: other\nindex,monomial,weight\n");
  EXPECT_THROW(read_weights(ss, BasisSpec::glucose(), 0), ConfigError);
}

TEST(Io, IterationLogColumns) {
  auto run = make_lq_run(1);
  run.cfg.max_rounds = 2;
  const MsqviResult res = bench::learn(run, 1);
  std::stringstream ss;
  write_iteration_log(ss, res.reports);
  std::string header, row;
  std::getline(ss, header);
  EXPECT_EQ(header.rfind("round,player,delta_sup,residual_or_objective,poe_lambda_min,w_1,", 0), 0u);
  EXPECT_NE(header.find(",w_21"), std::string::npos);
  int rows = 0;
  while (std::getline(ss, row)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Io, PolicyCsvNamesSignals) {
  const BasisSpec b = BasisSpec::glucose();
  std::stringstream ss;
  write_policy(ss, linear(b, {1, 2, 3, 4, 5, 6}), b);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "action,x1,x2,x1^2,x2^2,r1,r1^2");
}

}  // namespace
}  // namespace msqvi
