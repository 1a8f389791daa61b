#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli.hpp"

namespace archimedes::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "archimedes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("archimedes_cli_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

TEST(Cli, MkTable) {
  const auto r = run_cli({"mk-table", "--k-min", "2", "--k-max", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], "k,mk_quadrature,mk_closed_form,abs_diff");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double diff = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    EXPECT_LE(diff, 1e-10) << rows[i];
  }
}

TEST(Cli, VolumeOfTheTwoSphere) {
  const auto r = run_cli({"volume", "--n", "3", "--k", "2", "--r", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_NEAR(j["total"]["closed_form"].get<double>(), 4.0 * std::numbers::pi, 1e-13);
  EXPECT_LE(j["total"]["rel_diff"].get<double>(), 1e-6);
}

TEST(Cli, EnclosedVolumeOfTheOvaloid) {
  const auto r = run_cli({"volume", "--n", "4", "--k", "3", "--enclosed", "--samples", "20000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_LE(j["enclosed"]["rel_diff"].get<double>(), 1e-4);
  EXPECT_EQ(j["enclosed"]["monte_carlo"]["samples"], 20000);
}

TEST(Cli, VerifyGates) {
  auto r = run_cli({"verify", "--n", "4", "--k", "3", "--r", "1", "--mode", "residual"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(Json::parse(r.out)["passed"].get<bool>());
  r = run_cli({"verify", "--n", "3", "--k", "2", "--mode", "integral", "--regions", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["integral"]["tolerance"].get<double>(), 1e-8);
  r = run_cli({"verify", "--n", "3", "--k", "2", "--mode", "statistical", "--samples", "200000"});
  EXPECT_EQ(r.code, 0) << r.err;
  // The parabolic control must fail the statistical gate.
  r = run_cli({"verify", "--n", "4", "--k", "3", "--mode", "statistical", "--control", "--samples", "200000"});
  EXPECT_EQ(r.code, 1);
  const auto j = Json::parse(r.out);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["statistical"]["sampler"], "product");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "--n", "4"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "--n", "4", "--k", "3", "--mode", "vibes"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "--n", "2", "--k", "2"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "--n", "4", "--k", "3", "--control"}).code, 2);
  EXPECT_EQ(run_cli({"mesh", "--n", "6", "--k", "2"}).code, 2);
  EXPECT_EQ(run_cli({"volume", "--n", "4", "--k", "3", "--r", "-1"}).code, 2);
  EXPECT_EQ(run_cli({"mk-table", "--k-min", "5", "--k-max", "3"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, ScalingProfile) {
  const auto r = run_cli({"scaling", "--k", "2", "--samples", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], "x,f");
  EXPECT_EQ(rows[1], "0,0");
  EXPECT_EQ(rows[11], "1,1");
}

TEST(Cli, FilesAreByteReproducible) {
  TempDir dir;
  const auto a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_EQ(run_cli({"sample", "--n", "5", "--k", "3", "--count", "70000", "--seed", "9", "--out", a.string()}).code, 0);
  ASSERT_EQ(run_cli({"--threads", "3", "sample", "--n", "5", "--k", "3", "--count", "70000", "--seed", "9", "--out",
                     b.string()})
                .code,
            0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(lines(slurp(a)).size(), 70001u);
  EXPECT_EQ(lines(slurp(a))[0], "x1,x2,x3,x4,x5");

  const auto m1 = dir / "m1.obj", m2 = dir / "m2.obj";
  ASSERT_EQ(run_cli({"mesh", "--n", "4", "--k", "2", "--res", "12", "--out", m1.string()}).code, 0);
  ASSERT_EQ(run_cli({"mesh", "--n", "4", "--k", "2", "--res", "12", "--out", m2.string()}).code, 0);
  EXPECT_EQ(slurp(m1), slurp(m2));
  EXPECT_EQ(slurp(m1).find('\r'), std::string::npos);

  const auto j1 = run_cli({"verify", "--n", "5", "--k", "2", "--mode", "statistical", "--samples", "100000"});
  const auto j2 = run_cli(
      {"--threads", "4", "verify", "--n", "5", "--k", "2", "--mode", "statistical", "--samples", "100000"});
  EXPECT_EQ(j1.out, j2.out);
}

TEST(Cli, ConfigFileFillsMissingFlags) {
  TempDir dir;
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"n": 3, "k": 2, "count": 5, "seed": 4})";
  auto r = run_cli({"sample", "--config", cfg.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 6u);
  // Flags win.
  r = run_cli({"sample", "--config", cfg.string(), "--count", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 3u);
  EXPECT_EQ(lines(r.out)[1], lines(run_cli({"sample", "--n", "3", "--k", "2", "--count", "1", "--seed", "4"}).out)[1]);
  std::ofstream(dir / "flag.json") << R"({"n": 4, "k": 3, "enclosed": true, "samples": 0})";
  r = run_cli({"volume", "--config", (dir / "flag.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(Json::parse(r.out).contains("enclosed"));
  std::ofstream(dir / "bad.json") << R"({"n": 3, "k": 2, "colour": "blue"})";
  EXPECT_EQ(run_cli({"sample", "--config", (dir / "bad.json").string()}).code, 2);
  std::ofstream(dir / "broken.json") << "{";
  EXPECT_EQ(run_cli({"sample", "--config", (dir / "broken.json").string()}).code, 2);
  EXPECT_EQ(run_cli({"sample", "--config", (dir / "missing.json").string()}).code, 2);
}

TEST(Json, SeventeenDigitsAndStableLayout) {
  Json j;
  j["x"] = 0.1;
  j["n"] = 3;
  j["list"] = Json::array({1.0 / 3.0, true});
  j["s"] = "a\"b";
  std::ostringstream os;
  write_json(os, j, 0);
  EXPECT_EQ(os.str(), "{\"x\":0.10000000000000001,\"n\":3,\"list\":[0.33333333333333331,true],\"s\":\"a\\\"b\"}\n");
  EXPECT_EQ(Json::parse(os.str())["x"].get<double>(), 0.1);
}

}  // namespace
}  // namespace archimedes::cli
