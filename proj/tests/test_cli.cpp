#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>

#include "experiment.hpp"

namespace msqvi::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("msqvi_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(Command cmd, const fs::path& config, const fs::path& out, std::size_t workers = 1,
          std::optional<std::size_t> horizon = {}) {
    RunOptions opt;
    opt.command = cmd;
    opt.config_path = config.string();
    opt.out = out.string();
    opt.workers = workers;
    opt.horizon = horizon;
    std::ostringstream err;
    const int code = run_command(opt, err);
    last_error_ = err.str();
    return code;
  }

  fs::path dir_;
  std::string last_error_;
};

std::string lq_config(std::size_t trials) {
  return R"({
  "plant": "lq",
  "lq": { "input_scale": 0.01, "coupling": 0.1, "a_norm_cap": 0.9, "game_seed": 3 },
  "learning": { "backend": "ls", "horizon": 3, "buffer_size": 48, "tolerance": 1e-10,
                "exploration": [[-1.0, 1.0], [-1.0, 1.0]] },
  "q0": { "base": 1000.0 },
  "trials": )" + std::to_string(trials) + R"(,
  "seed": 5
})";
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(CliTest, MissingConfigReturnsConfigCode) {
  EXPECT_EQ(run(Command::kLearn, dir_ / "absent.json", dir_ / "out"), kConfig);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
  EXPECT_NE(last_error_.find("config error"), std::string::npos);
}

TEST_F(CliTest, UnknownKeyRejected) {
  const auto cfg = write("bad.json", R"({ "plant": "lq", "learning": { "horizn": 3 } })");
  EXPECT_EQ(run(Command::kLearn, cfg, dir_ / "out"), kConfig);
  EXPECT_NE(last_error_.find("horizn"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, OracleCheckRequiresLqPlant) {
  const auto cfg = write("c.json", R"({ "plant": "constant-glucose", "controller": "zero" })");
  EXPECT_EQ(run(Command::kOracleCheck, cfg, dir_ / "out"), kConfig);
}

TEST_F(CliTest, ConstantGlucoseStubStaysInTarget) {
  const auto cfg = write("c.json", R"({
  "plant": "constant-glucose",
  "constant_glucose": { "glucose": 120 },
  "controller": "zero",
  "trials": 1,
  "evaluation_days": 1
})");
  ASSERT_EQ(run(Command::kEvaluate, cfg, dir_ / "out"), kOk) << last_error_;
  const auto rows = read_csv(dir_ / "out" / "summary.csv");
  ASSERT_GE(rows.size(), 2u);
  const auto& header = rows[0];
  const auto col = std::find(header.begin(), header.end(), "pct_target") - header.begin();
  bool saw_converged = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    EXPECT_DOUBLE_EQ(std::stod(rows[r][static_cast<std::size_t>(col)]), 100.0);
    saw_converged = saw_converged || rows[r][1] == "converged";
  }
  EXPECT_TRUE(saw_converged);
}

TEST_F(CliTest, ManifestRecordsProvenance) {
  const auto cfg = write("lq.json", lq_config(1));
  ASSERT_EQ(run(Command::kLearn, cfg, dir_ / "out"), kOk) << last_error_;
  std::map<std::string, std::string> kv;
  for (const auto& row : read_csv(dir_ / "out" / "manifest.csv"))
    if (row.size() == 2) kv[row[0]] = row[1];
  for (const char* key : {"command", "config_hash", "seed", "code_version", "monomial_order"})
    EXPECT_TRUE(kv.count(key)) << key;
  EXPECT_EQ(kv["command"], "learn");
  EXPECT_EQ(kv["seed"], "5");
  EXPECT_EQ(kv["config_hash"].size(), 16u);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trial_000" / "iteration_log.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trial_000" / "weights_player1.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trial_000" / "policy_player2.csv"));
}

TEST_F(CliTest, RepeatRunsAreByteIdentical) {
  const auto cfg = write("lq.json", lq_config(3));
  ASSERT_EQ(run(Command::kLearn, cfg, dir_ / "a"), kOk) << last_error_;
  ASSERT_EQ(run(Command::kLearn, cfg, dir_ / "b"), kOk) << last_error_;
  ASSERT_EQ(run(Command::kLearn, cfg, dir_ / "c", 2), kOk) << last_error_;
  const auto a = read_tree(dir_ / "a");
  EXPECT_EQ(a, read_tree(dir_ / "b"));
  EXPECT_EQ(a, read_tree(dir_ / "c"));
  EXPECT_GE(a.size(), 3u * 5u);
}

TEST_F(CliTest, OracleCheckPassesOnBenchmark) {
  const auto cfg = write("lq.json", lq_config(2));
  ASSERT_EQ(run(Command::kOracleCheck, cfg, dir_ / "out"), kOk) << last_error_;
  const auto rows = read_csv(dir_ / "out" / "oracle_report.csv");
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r].back(), "pass");
    EXPECT_LE(std::stod(rows[r][3]), 1e-3);
  }
}

TEST_F(CliTest, LongerHorizonNeedsFewerRounds) {
  const auto cfg = write("lq.json", lq_config(1));
  ASSERT_EQ(run(Command::kLearn, cfg, dir_ / "h1", 1, 1), kOk) << last_error_;
  ASSERT_EQ(run(Command::kLearn, cfg, dir_ / "h3", 1, 3), kOk) << last_error_;
  const auto h1 = read_csv(dir_ / "h1" / "trials.csv"), h3 = read_csv(dir_ / "h3" / "trials.csv");
  EXPECT_LT(std::stoul(h3[1][1]), std::stoul(h1[1][1]));
}

TEST_F(CliTest, ExcitationFailureExitCode) {
  const auto cfg = write("lq.json", R"({
  "plant": "lq",
  "lq": { "start_half_width": 0.0 },
  "learning": { "exploration": [[0.0, 0.0], [0.0, 0.0]] },
  "trials": 1
})");
  EXPECT_EQ(run(Command::kLearn, cfg, dir_ / "out"), kExcitation);
  const auto rows = read_csv(dir_ / "out" / "trials.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][5], std::to_string(kExcitation));
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = MSQVI_CLI_PATH;
  const auto cfg = write("lq.json", lq_config(1));
  auto code = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(code(bin + " learn --config " + cfg.string() + " --out " + (dir_ / "o").string()), 0);
  EXPECT_EQ(code(bin + " learn"), 2);
  EXPECT_EQ(code(bin + " learn --config " + cfg.string() + " --backend qp"), 2);
  EXPECT_EQ(code(bin + " --help"), 0);
}

TEST(Seeds, StreamsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 0, Stream::kLearnRng), derive_seed(1, 0, Stream::kLearnRng));
  EXPECT_NE(derive_seed(1, 0, Stream::kLearnRng), derive_seed(1, 1, Stream::kLearnRng));
  EXPECT_NE(derive_seed(1, 0, Stream::kLearnRng), derive_seed(2, 0, Stream::kLearnRng));
  EXPECT_NE(derive_seed(1, 0, Stream::kLearnRng), derive_seed(1, 0, Stream::kPatient));
}

TEST(Config, DefaultsFollowThePlant) {
  const auto lq = parse_config_text(R"({ "plant": "lq" })");
  EXPECT_EQ(lq.learning.horizon, 3u);
  const auto setup = make_setup(lq, 0);
  EXPECT_EQ(setup.eval.buffer_size, 48u);
  const auto glu = parse_config_text(R"({ "plant": "glucose" })");
  const auto gs = make_setup(glu, 0);
  EXPECT_EQ(gs.eval.buffer_size, 48u);
  EXPECT_EQ(gs.basis.size(), 36);
  EXPECT_THROW(parse_config_text(R"({ "plant": "mars" })"), ConfigError);
  EXPECT_THROW(parse_config_text("{ not json"), ConfigError);
}

TEST(Config, ContentHashIsStable) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(content_hash("a"), content_hash("b"));
}

}  // namespace
}  // namespace msqvi::cli
