#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fd-forge");
  std::ostringstream out, err;
  const int code = fdforge::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string shell(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  status = pclose(pipe);
  return out;
}

}  // namespace

TEST(Cli, DiscoverSessionOneTable) {
  const auto r = invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "2", "--s", "2", "--init-seed=-5,2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# k=2 s=2 truncation_error_order=4"), std::string::npos);
  EXPECT_NE(r.out.find("1.0000 0.1250 -0.7500 -0.6250 0.2500 0 "), std::string::npos) << r.out;
  EXPECT_NE(r.err.find("searches: 1"), std::string::npos);
  EXPECT_NE(r.err.find("convergent formulas: 1"), std::string::npos);
}

TEST(Cli, DiscoverRationalTable) {
  const auto r =
      invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "3", "--s", "3", "--init-seed", "1,110,-40", "--rational"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1 80/237 -182/237 -206/237 1/237 110/237 -40/237 0 -0.0000 446/465 196/79"), std::string::npos)
      << r.out;
}

TEST(Cli, DiscoverJsonAndCsv) {
  const auto j = invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "2", "--s", "2", "--init-seed=-5,2",
                         "--format", "json"});
  ASSERT_EQ(j.code, 0);
  const auto row = nlohmann::json::parse(j.out.substr(0, j.out.find('\n')));
  EXPECT_EQ(row.at("c").get<double>(), 2.25);
  const auto c = invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "2", "--s", "2", "--init-seed=-5,2",
                         "--format", "csv"});
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out.rfind("k,s,p1,", 0), 0u);
}

TEST(Cli, DiscoverUsageErrors) {
  EXPECT_EQ(invoke({"discover", "--runs", "0", "--restarts", "1", "--k", "2", "--s", "2"}).code, 2);
  EXPECT_EQ(invoke({"discover", "--restarts", "1", "--k", "2", "--s", "2"}).code, 2);
  EXPECT_EQ(invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "0", "--s", "2"}).code, 2);
  EXPECT_EQ(invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "9", "--s", "9"}).code, 2);
  EXPECT_EQ(invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "2", "--s", "2", "--init-seed", "1,2,3"}).code, 2);
  EXPECT_EQ(invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "2", "--s", "2", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
}

TEST(Cli, DiscoverWarnsForShortSeed) {
  const auto r = invoke({"discover", "--runs", "1", "--restarts", "1", "--k", "3", "--s", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, AnalyzePolynomials) {
  const auto euler = invoke({"analyze", "--poly", "1,0,-1"});
  EXPECT_EQ(euler.code, 0);
  EXPECT_NE(euler.out.find("verdict:          convergent"), std::string::npos) << euler.out;
  const auto doubled = invoke({"analyze", "--poly", "1,-2,1", "--json"});
  EXPECT_EQ(doubled.code, 0);
  EXPECT_FALSE(nlohmann::json::parse(doubled.out).at("convergent").get<bool>());
  const auto fractions = invoke({"analyze", "--poly", "1,1/8,-3/4,-5/8,1/4", "--json"});
  EXPECT_TRUE(nlohmann::json::parse(fractions.out).at("convergent").get<bool>());
}

TEST(Cli, AnalyzeSeed) {
  const auto r = invoke({"analyze", "--seed", "1,110,-40", "--k", "3", "--s", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("c (exact):        196/79"), std::string::npos) << r.out;
  const auto bad = invoke({"analyze", "--seed=-9,2", "--k", "2", "--s", "2"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("zero first entry"), std::string::npos) << bad.err;
}

TEST(Cli, AnalyzeMalformed) {
  EXPECT_EQ(invoke({"analyze", "--poly", "1,abc"}).code, 2);
  EXPECT_EQ(invoke({"analyze", "--poly", "0,1,2"}).code, 2);
  EXPECT_EQ(invoke({"analyze", "--poly", "5"}).code, 2);
  EXPECT_EQ(invoke({"analyze"}).code, 2);
  EXPECT_EQ(invoke({"analyze", "--seed", "1,2", "--k", "2", "--s", "3"}).code, 2);
}

TEST(Cli, ValidateKnown) {
  const auto r = invoke({"validate-known"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("6/6 pass"), std::string::npos);
  const auto j = invoke({"validate-known", "--json"});
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc.at("passed").get<int>(), 6);
  EXPECT_EQ(doc.at("formulas").size(), 6u);
  const auto corrupted = invoke({"validate-known", "--corrupt", "E"});
  EXPECT_EQ(corrupted.code, 1);
  EXPECT_NE(corrupted.out.find("5/6 pass"), std::string::npos);
  EXPECT_EQ(invoke({"validate-known", "--corrupt", "Q"}).code, 2);
}

TEST(Cli, OrderCheck) {
  const auto r = invoke({"order-check", "--label", "E", "--json"});
  EXPECT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc.at("fitted_slope").get<double>(), 4.0, 0.3);
  EXPECT_EQ(invoke({"order-check", "--label", "E", "--claimed", "6"}).code, 1);
  const auto seeded = invoke({"order-check", "--seed", "1,110,-40", "--k", "3", "--s", "3"});
  EXPECT_EQ(seeded.code, 0) << seeded.out;
  EXPECT_NE(seeded.out.find("pass"), std::string::npos);
  EXPECT_EQ(invoke({"order-check", "--label", "Z"}).code, 2);
  EXPECT_EQ(invoke({"order-check"}).code, 2);
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
  const std::vector<std::string> args{"discover", "--runs",     "6", "--restarts", "3",      "--k",
                                      "3",        "--s",        "3", "--rng-seed", "77",     "--format",
                                      "json"};
  setenv("FD_FORGE_THREADS", "1", 1);
  const auto one = invoke(args);
  setenv("FD_FORGE_THREADS", "3", 1);
  const auto three = invoke(args);
  unsetenv("FD_FORGE_THREADS");
  ASSERT_EQ(one.code, 0);
  EXPECT_FALSE(one.out.empty());
  EXPECT_EQ(one.out, three.out);
}

TEST(Cli, BinaryWritesOutputFile) {
  const auto dir = std::filesystem::temp_directory_path() / "fdforge_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "out.txt";
  int status = 0;
  const std::string cmd = std::string("'") + FD_FORGE_BINARY +
                          "' discover --runs 1 --restarts 1 --k 2 --s 2 --init-seed -5,2 --output '" + file.string() +
                          "' 2>/dev/null";
  shell(cmd, status);
  EXPECT_EQ(status, 0);
  EXPECT_NE(read_file(file).find("1.0000 0.1250"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, BinaryExitCodes) {
  int status = 0;
  shell(std::string("'") + FD_FORGE_BINARY + "' analyze --poly 1,x 2>/dev/null", status);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  const std::string help = shell(std::string("'") + FD_FORGE_BINARY + "' --help", status);
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_NE(help.find("discover"), std::string::npos);
}
