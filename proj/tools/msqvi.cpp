#include <iostream>

#include <CLI11.hpp>

#include "experiment.hpp"

int main(int argc, char** argv) {
  using namespace msqvi::cli;
  CLI::App app{"Multi-step Q-function value iteration for N-player tracking games"};
  app.require_subcommand(1);

  RunOptions opt;
  std::uint64_t seed = 0;
  std::string out, backend;
  std::size_t horizon = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out, "Output directory (overrides the config)");
    sub->add_option("--workers", opt.workers, "Parallel trials")->check(CLI::PositiveNumber);
    sub->add_option("--backend", backend, "Policy evaluation backend")
        ->check(CLI::IsMember({"ls", "lp"}));
    sub->add_option("--horizon", horizon, "Lookahead steps per evaluation")
        ->check(CLI::PositiveNumber);
  };
  auto* learn = app.add_subcommand("learn", "Learn controllers and write iteration logs and weights");
  auto* evaluate =
      app.add_subcommand("evaluate", "Learn, then replay controllers on fresh glucose scenarios");
  auto* oracle = app.add_subcommand("oracle-check", "Compare learned LQ gains with the exact solution");
  for (auto* sub : {learn, evaluate, oracle}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (learn->parsed()) opt.command = Command::kLearn;
  else if (evaluate->parsed()) opt.command = Command::kEvaluate;
  else opt.command = Command::kOracleCheck;
  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--out")) opt.out = out;
  if (sub->count("--backend")) opt.backend = backend;
  if (sub->count("--horizon")) opt.horizon = horizon;

  try {
    return run_command(opt, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
