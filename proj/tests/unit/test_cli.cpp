#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "couette/nls2d.hpp"

using namespace couette;
using namespace couette::cli;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "couette-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::optional<int> parse(std::vector<std::string> args, RunConfig& cfg) {
  args.insert(args.begin(), "couette-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return parse_config(static_cast<int>(argv.size()), argv.data(), cfg, out, err);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("couette-cli-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, Defaults) {
  RunConfig cfg;
  EXPECT_FALSE(parse({"nonlinear-run"}, cfg).has_value());
  EXPECT_EQ(cfg.n, 64);
  EXPECT_EQ(cfg.K, 32);
  EXPECT_DOUBLE_EQ(cfg.Lx, 100.0);
  EXPECT_DOUBLE_EQ(cfg.nu, 1e-3);
  EXPECT_DOUBLE_EQ(cfg.m, 2.0);
  EXPECT_DOUBLE_EQ(cfg.eps, 0.08);
  EXPECT_DOUBLE_EQ(cfg.amplitude(), 0.01 * std::sqrt(1e-3));
}

TEST(Cli, InvalidEpsNamesConstraint) {
  const Invocation r = invoke({"linear-run", "--eps", "0.2"});
  EXPECT_EQ(r.code, kUsageError);
  EXPECT_NE(r.err.find("ε must lie in (0, 1/12)"), std::string::npos);
}

TEST(Cli, OtherUsageErrors) {
  EXPECT_EQ(invoke({"no-such-experiment"}).code, kUsageError);
  EXPECT_EQ(invoke({}).code, kUsageError);
  EXPECT_EQ(invoke({"linear-run", "--nu", "2"}).code, kUsageError);
  EXPECT_EQ(invoke({"linear-run", "--n", "16"}).code, kUsageError);
  EXPECT_EQ(invoke({"linear-run", "--A", "1", "--eps0", "0.1"}).code, kUsageError);
  EXPECT_EQ(invoke({"nonlinear-run", "--Lx", "10"}).code, kUsageError);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  std::ofstream(dir / "run.ini") << "nu = 1e-4\nn = 48\nseed = 5\n";
  RunConfig cfg;
  EXPECT_FALSE(parse({"nonlinear-run", "--config", (dir / "run.ini").string(), "--n", "96"}, cfg).has_value());
  EXPECT_DOUBLE_EQ(cfg.nu, 1e-4);
  EXPECT_EQ(cfg.n, 96);
  EXPECT_EQ(cfg.seed, 5u);

  std::ofstream(dir / "bad.ini") << "nu = 1e-4\nviscosity = 3\n";
  EXPECT_EQ(invoke({"nonlinear-run", "--config", (dir / "bad.ini").string()}).code, kUsageError);
}

TEST(Cli, OutputDirectory) {
  RunConfig cfg;
  cfg.experiment = "calibrate";
  cfg.out = "/x/y";
  EXPECT_EQ(cfg.output_dir(), fs::path("/x/y"));
  cfg.out.clear();
  setenv(kOutputRootEnv, "/root-out", 1);
  EXPECT_EQ(cfg.output_dir(), fs::path("/root-out/calibrate"));
  unsetenv(kOutputRootEnv);
  EXPECT_EQ(cfg.output_dir(), fs::path("couette-out/calibrate"));
}

TEST(Cli, VerifyOperatorWritesTableAndManifest) {
  const fs::path dir = scratch("verify");
  const Invocation r = invoke({"verify-operator", "--out", dir.string()});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  std::ifstream csv(dir / "operator.csv");
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 25);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["config"]["n"], 64);
  EXPECT_EQ(m["outputs"][0]["file"], "operator.csv");
  EXPECT_LE(m["results"]["sup_norm"].get<double>(), 1.0);
}

TEST(Cli, KelvinCheckIsDeterministic) {
  const fs::path a = scratch("kelvin-a"), b = scratch("kelvin-b");
  ASSERT_EQ(invoke({"kelvin-check", "--out", a.string()}).code, kSuccess);
  ASSERT_EQ(invoke({"kelvin-check", "--out", b.string()}).code, kSuccess);
  const std::string ca = slurp(a / "kelvin.csv");
  EXPECT_FALSE(ca.empty());
  EXPECT_EQ(ca, slurp(b / "kelvin.csv"));
}

TEST(Cli, InconclusiveSweepExitsThreeWithPartialOutputs) {
  const fs::path dir = scratch("sweep");
  const Invocation r = invoke({"threshold-sweep", "--nus", "0.01", "--n", "32", "--K", "8", "--dt", "0.5",
                               "--t-end", "2", "--out", dir.string()});
  ASSERT_EQ(r.code, kInconclusive) << r.out << r.err;
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "inconclusive");
  EXPECT_TRUE(m["outputs"][0]["partial"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "thresholds.csv"));
}

TEST(Cli, NonlinearRunWritesCheckpoint) {
  const fs::path dir = scratch("nonlinear");
  ASSERT_EQ(invoke({"nonlinear-run", "--n", "32", "--K", "8", "--t-end", "0.5", "--out", dir.string()}).code,
            kSuccess);
  int n = 0;
  const FlowState s = load_checkpoint(dir / "final.chk", &n);
  EXPECT_EQ(n, 32);
  EXPECT_EQ(s.K, 8);
  EXPECT_DOUBLE_EQ(s.Lx, 100.0);
  EXPECT_NEAR(s.t, 0.5, 1e-12);
}
