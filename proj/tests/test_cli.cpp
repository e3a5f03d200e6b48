#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "mdk/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("mdk_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the built binary through the shell.
Result run(const std::string& args, const std::string& env = "") {
  const fs::path o = scratch() / "stdout", e = scratch() / "stderr";
  const std::string cmd = env + " '" + std::string(MDK_CLI_PATH) + "' " + args + " >'" + o.string() + "' 2>'" +
                          e.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

const char* kP2 = "--triangle '[[1,0],[0,1],[-1,-1]]'";

}  // namespace

TEST(Cli, VerifyProjectivePlane) {
  const auto r = run(std::string("verify ") + kP2);
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["overall"].get<bool>());
  ASSERT_EQ(j["bullets"].size(), 6u);
  for (const auto& b : j["bullets"]) {
    EXPECT_TRUE(b["pass"].get<bool>());
    EXPECT_TRUE(b.contains("name"));
    EXPECT_TRUE(b.contains("detail"));
  }
}

TEST(Cli, OriginNotInteriorIsDomainError) {
  const auto r = run("critvals --triangle '[[1,0],[0,1],[1,1]]'");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("OriginNotInterior"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, NonCoprimeIsDomainError) {
  const auto r = run("critvals --triangle '[[2,0],[0,2],[-2,-2]]'");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NonCoprime"), std::string::npos);
}

TEST(Cli, MissingTriangleIsUsageError) {
  const auto r = run("normalize");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run(std::string("trace ") + kP2 + " --tol-step -1").code, 2);
  EXPECT_EQ(run("normalize --triangle '[[1,0],[0,1]]'").code, 2);
  EXPECT_EQ(run("normalize --triangle '[[1,0],[0,1],[-1,-1]'").code, 2);
  EXPECT_EQ(run(std::string("render ") + kP2 + " --stage nope").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, NormalizeAndStack) {
  auto r = run("normalize --triangle '[[3,0],[0,1],[-2,-2]]' --anchor 0");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["normal_form"]["a"], 3);
  EXPECT_EQ(j["normal_form"]["g"], 3);
  EXPECT_EQ(j["normal_form"]["h"], 2);
  EXPECT_EQ(j["K0"]["order"], 11);
  r = run(std::string("stack ") + kP2);
  ASSERT_EQ(r.code, 0);
  j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["weights"], nlohmann::json::parse("[1,1,1]"));
  EXPECT_TRUE(j["K2"].contains("invariant_factors"));
  EXPECT_TRUE(j["K2"].contains("generators"));
}

TEST(Cli, TriangleFromFile) {
  const fs::path f = scratch() / "tri.json";
  std::ofstream(f) << "[[1,0],[0,1],[-1,-2]]\n";
  const auto r = run("critvals --triangle '" + f.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["count"], 4);
  EXPECT_EQ(j["values"].size(), 4u);
  EXPECT_EQ(run("critvals --triangle /nonexistent/tri.json").code, 2);
}

TEST(Cli, DimerSchema) {
  const auto r = run(std::string("dimer ") + kP2);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["nodes"].size(), 6u);
  ASSERT_EQ(j["edges"].size(), 9u);
  for (const auto& n : j["nodes"]) {
    EXPECT_TRUE(n["id"].is_number_integer());
    EXPECT_TRUE(n["color"] == "white" || n["color"] == "black");
    EXPECT_EQ(n["pos"].size(), 2u);
  }
  for (const auto& e : j["edges"]) {
    EXPECT_TRUE(e["a"].is_number_integer());
    EXPECT_TRUE(e["b"].is_number_integer());
    EXPECT_EQ(e["offset"].size(), 2u);
  }
  EXPECT_EQ(j["perfect_matchings"], 6);
  EXPECT_EQ(j["internal_matchings"], 3);
}

TEST(Cli, TraceTrajectoriesAreComplexArrays) {
  const auto r = run("trace --triangle '[[3,0],[0,1],[-2,-2]]' --anchor 0");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["trace"]["trajectories"].size(), 11u);
  for (const auto& path : j["trace"]["trajectories"])
    for (const auto& z : path) ASSERT_EQ(z.size(), 2u);
  ASSERT_EQ(j["trace"]["collisions"].size(), 1u);
  const auto pt = j["trace"]["collisions"][0]["point"];
  EXPECT_GT(pt[0].get<double>(), 0);
  EXPECT_LT(std::abs(pt[1].get<double>()), 1e-9);
  EXPECT_LT(std::abs(run("trace --triangle '[[3,0],[0,1],[-2,-2]]' --anchor 0 --t-end 0.5,0.5").code), 1);
}

TEST(Cli, JsonIsByteIdenticalForFixedSeed) {
  const std::string args = std::string("coamoeba ") + kP2 + " --seed 99 --samples 300";
  const auto a = run(args), b = run(args), c = run(std::string("coamoeba ") + kP2 + " --seed 100 --samples 300");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_FALSE(j["samples"]["membership"].contains("Exterior"));
  // thread count does not leak into the output
  const std::string v = "verify --triangle '[[1,0],[0,1],[-2,-3]]'";
  EXPECT_EQ(run(v, "MDK_THREADS=1").out, run(v, "MDK_THREADS=3").out);
}

TEST(Cli, RenderTraceFigure) {
  const auto r = run("render --stage trace --triangle '[[3,0],[0,1],[-2,-2]]' --anchor 0");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count(r.out, "class=\"trajectory\""), 11u);
  EXPECT_EQ(count(r.out, "class=\"collision\""), 1u);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(r.out, m, std::regex("class=\"collision\"[^>]*data-x=\"([^\"]+)\" data-y=\"([^\"]+)\"")));
  EXPECT_GT(std::stod(m[1]), 0);
  EXPECT_LT(std::abs(std::stod(m[2])), 1e-9);
  // numbers carry at most 9 significant digits
  const std::regex number("[0-9]+(\\.[0-9]+)?");
  for (auto it = std::sregex_iterator(r.out.begin(), r.out.end(), number); it != std::sregex_iterator(); ++it) {
    std::string digits;
    for (char ch : it->str())
      if (ch != '.') digits += ch;
    const auto lead = digits.find_first_not_of('0');
    EXPECT_LE(lead == std::string::npos ? 0 : digits.size() - lead, 9u) << it->str();
  }
}

TEST(Cli, RenderCoamoebaAndDimer) {
  auto r = run(std::string("render --stage coamoeba ") + kP2);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count(r.out, "class=\"triangle\""), 6u);
  r = run(std::string("render --stage dimer ") + kP2);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count(r.out, "class=\"node "), 6u);
  EXPECT_GE(count(r.out, "class=\"edge matched\""), 3u);
  r = run(std::string("render --stage verify ") + kP2);
  ASSERT_EQ(r.code, 0);
  EXPECT_GE(count(r.out, "class=\"cycle\""), 3u);
}

TEST(Cli, OutDirectoryAndSvgFlag) {
  const fs::path d = scratch() / "out";
  const auto r = run(std::string("dimer ") + kP2 + " --svg --out '" + d.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(d / "dimer.json"), r.out);
  EXPECT_TRUE(fs::exists(d / "dimer.svg"));
}

TEST(Cli, InProcessMatchesBinary) {
  std::ostringstream out, err;
  const int code = mdk::cli::run_command({"mdk", "normalize", "--triangle", "[[1,0],[0,1],[-1,-1]]"}, out, err);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(out.str(), run(std::string("normalize ") + kP2).out);
}
