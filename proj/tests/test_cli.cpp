#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "liouville/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("liouville_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Result lab(const std::string& args, const std::string& env = "") {
  const auto out = scratch() / "stdout", err = scratch() / "stderr";
  const std::string cmd = env + " " + LAB_BIN + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

}  // namespace

TEST(Cli, BetaReportsAnchorInBothUnits) {
  const Result r = lab("beta --alpha 2 --a " + std::to_string(std::log(16.0)));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = liouville::io::parse_json(r.out, "stdout");
  EXPECT_NEAR(j["beta"].get<double>(), 8.0, 1e-6);
  const Result rho = lab("--units rho beta --alpha 2 --a " + std::to_string(std::log(16.0)));
  const auto jr = liouville::io::parse_json(rho.out, "stdout");
  EXPECT_FALSE(jr.contains("beta"));
  EXPECT_NEAR(jr["rho"].get<double>(), 16.0 * std::numbers::pi, 1e-5);
}

TEST(Cli, OutputIsDeterministicAcrossJobs) {
  const Result a = lab("--jobs 1 mass-curve --alpha 1.5 --n 20 --a-lo -5 --a-hi 5");
  const Result b = lab("--jobs 3 mass-curve --alpha 1.5 --n 20 --a-lo -5 --a-hi 5");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "a,beta,converged,tail");
}

TEST(Cli, BlowupPointsJson) {
  const Result r = lab("blowup-points --alpha1 2 --alpha2 1 --m 1 --newton-starts 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = liouville::io::parse_json(r.out, "stdout");
  EXPECT_NEAR(j["points"][0][0].get<double>(), -1.0 / 3.0, 1e-14);
  EXPECT_EQ(j["newton_check"]["converged"].get<int>(), 3);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto cfg = scratch() / "points.cfg";
  std::ofstream(cfg) << "# blow-up points\nalpha1 = 2\nalpha2 = 2\nm = 1\n";
  const Result file = lab("--config " + cfg.string() + " blowup-points");
  ASSERT_EQ(file.code, 0) << file.err;
  EXPECT_EQ(liouville::io::parse_json(file.out, "o")["m"].get<int>(), 1);
  const Result over = lab("--config " + cfg.string() + " blowup-points --m 2");
  ASSERT_EQ(over.code, 0) << over.err;
  EXPECT_EQ(liouville::io::parse_json(over.out, "o")["m"].get<int>(), 2);
  std::ofstream(cfg) << "nonsense = 3\n";
  EXPECT_EQ(lab("--config " + cfg.string() + " blowup-points --alpha1 1 --alpha2 1 --m 1").code, 64);
}

TEST(Cli, OutputDirectoryAndEnvironmentOverride) {
  const auto d1 = scratch() / "flag", d2 = scratch() / "env";
  ASSERT_EQ(lab("--out " + d1.string() + " masses --alpha1 2 --alpha2 3").code, 0);
  EXPECT_TRUE(fs::exists(d1 / "masses.json"));
  ASSERT_EQ(lab("--out " + d1.string() + " masses --alpha1 1 --alpha2 1", "LIOUVILLE_LAB_OUT=" + d2.string()).code, 0);
  EXPECT_TRUE(fs::exists(d2 / "masses.json"));
  const auto j = liouville::io::parse_json(slurp(d2 / "masses.json"), "m");
  EXPECT_EQ(j["alpha1"].get<int>(), 1);
}

TEST(Cli, DiskSolveWritesGrid) {
  const auto d = scratch() / "disk";
  const Result r = lab("--out " + d.string() + " disk-solve --manufactured bubble --n-r 40 --n-theta 8");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto side = liouville::io::parse_json(slurp(d / "disk-solve.json"), "side");
  EXPECT_TRUE(side["converged"].get<bool>());
  EXPECT_EQ(fs::file_size(d / "disk-solve.bin"), 41u * 8u * 8u);
}

TEST(Cli, ScalingOutputIsLabelled) {
  const Result r = lab("scaling --schedule 0.2,0.1");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("status,", 0), 0u);
  while (std::getline(lines, line)) EXPECT_EQ(line.rfind("EXPLORATORY,", 0), 0u);
  const Result j = lab("--format json scaling --schedule 0.2");
  EXPECT_NE(j.out.find("EXPLORATORY"), std::string::npos);
}

TEST(Cli, HeightFromFile) {
  const Result t = lab("height --template");
  ASSERT_EQ(t.code, 0);
  const auto in = scratch() / "height.json";
  std::ofstream(in) << t.out;
  const Result r = lab("height --input " + in.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(liouville::io::parse_json(r.out, "h")["lambda"][0].get<double>(), 2.0 * std::log(10.0), 1e-12);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(lab("--help").code, 0);
  EXPECT_EQ(lab("").code, 64);
  EXPECT_EQ(lab("frobnicate").code, 64);
  EXPECT_EQ(lab("beta --alpha 2").code, 64);
  EXPECT_EQ(lab("beta --alpha two --a 0").code, 64);
  const Result inv = lab("blowup-points --alpha1 1 --alpha2 3 --m 1");
  EXPECT_EQ(inv.code, 1);
  EXPECT_EQ(inv.err.rfind("error kind=InvalidParams exit=1 msg=", 0), 0u) << inv.err;
  EXPECT_EQ(lab("beta --eps -1 --p 1 --a 0").code, 1);
  const Result nosol = lab("--units rho collapse --alpha 2 --mass 11pi --beta-bar 7.35 --eps 1e-2");
  EXPECT_EQ(nosol.code, 1) << nosol.err;
  const Result io = lab("height --input /nonexistent/h.json");
  EXPECT_EQ(io.code, 2);
  EXPECT_NE(io.err.find("kind=Io"), std::string::npos);
  const Result window = lab("collapse --alpha 2 --mass 6.3 --beta-bar 5 --eps 1e-2");
  EXPECT_EQ(window.code, 1);
  EXPECT_NE(window.err.find("kind=EmptyWindow"), std::string::npos);
}
