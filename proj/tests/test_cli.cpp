#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RIESZLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("rieszlab_cli_" + name); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

void expect_golden(const std::string& args, const std::string& golden) {
  const auto out = scratch(golden);
  ASSERT_EQ(run_cli(args + " --output " + out.string()), 0) << args;
  EXPECT_EQ(slurp(out), slurp(fs::path(RIESZLAB_GOLDEN_DIR) / golden)) << args;
  fs::remove(out);
}

}  // namespace

TEST(CliGolden, DivergenceTable) {
  expect_golden("divergence --alpha 1.5 --n 2 --t 1 --shells 12", "divergence_alpha1.5.csv");
}

TEST(CliGolden, EllipseDiagonal) {
  const auto m = scratch("diag.txt");
  write_text(m, "1 1 0\n2 0\n0 0.5\n");
  expect_golden("ellipse --matrix " + m.string(), "ellipse_diag.json");
}

TEST(CliGolden, ConstantCharacteristic) {
  expect_golden("characteristic --weight const:2 --n 2 --centers 3 --scales 4", "characteristic_const.json");
}

TEST(CliGolden, BellmanCheck) {
  expect_golden("bellman-check --points 50 --n 2 --Q 3 --seed 5", "bellman_check.json");
}

TEST(CliExit, UsageErrors) {
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("no-such-command"), 2);
  EXPECT_EQ(run_cli("characteristic"), 2);
  EXPECT_EQ(run_cli("characteristic --weight power:0.5 --mode sideways"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(CliExit, ConfigErrors) {
  EXPECT_EQ(run_cli("characteristic --weight bogus:1"), 2);
  EXPECT_EQ(run_cli("characteristic --weight power:0.5 --p 1"), 2);
  EXPECT_EQ(run_cli("riesz-norm --weight const:1 --N 7"), 2);
  EXPECT_EQ(run_cli("ellipse --matrix /nonexistent/matrix.txt"), 2);
  EXPECT_EQ(run_cli("dyadic-probe --depth 3 --strategy sideways"), 2);
}

TEST(CliExit, NumericalOutcomes) {
  EXPECT_EQ(run_cli("characteristic --weight power:1.5 --n 2 --mode poisson"), 3);
  EXPECT_EQ(run_cli("riesz-norm --weight power:1.5 --N 16 --max-iter 2"), 3);
}

TEST(CliExit, EllipseOutcomes) {
  const auto bad = scratch("infeasible.txt");
  write_text(bad, "1 1 0\n1 0\n0 0.1\n");
  const auto out = scratch("infeasible.json");
  EXPECT_EQ(run_cli("ellipse --matrix " + bad.string() + " --output " + out.string()), 2);
  const std::string json = slurp(out);
  EXPECT_NE(json.find("\"outcome\": \"hypothesis-violated\""), std::string::npos);
  EXPECT_NE(json.find("\"witness\""), std::string::npos);
  const auto good = scratch("narrow.txt");
  write_text(good, "1 1 0\n2 0\n0 0.5\n");
  EXPECT_EQ(run_cli("ellipse --matrix " + good.string() + " --tau-min 10 --tau-max 100"), 3);
}

TEST(CliSweep, ConfigFile) {
  const auto cfg = scratch("sweep.cfg");
  const auto out = scratch("sweep.csv");
  write_text(cfg,
             "# dyadic family\n"
             "kind = dyadic\n"
             "depth = 4\n"
             "alphas = 0, -0.5   # two members\n"
             "trials = 3\n"
             "output = " + out.string() + "\n");
  EXPECT_EQ(run_cli("sweep --config " + cfg.string()), 0);
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("weight_id,depth,q2_dyadic,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  write_text(cfg, "kind = dyadic\nunknown_key = 1\n");
  EXPECT_EQ(run_cli("sweep --config " + cfg.string()), 2);
  write_text(cfg, "kind = spectral\n");
  EXPECT_EQ(run_cli("sweep --config " + cfg.string()), 2);
  write_text(cfg, "kind = riesz\nN = abc\n");
  EXPECT_EQ(run_cli("sweep --config " + cfg.string()), 2);
  write_text(cfg, "depth = 3\n");
  EXPECT_EQ(run_cli("sweep --config " + cfg.string()), 2);
}
