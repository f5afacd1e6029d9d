#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(HULLCERT_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(HULLCERT_DATA) + "/" + name; }

nlohmann::json without_timings(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  j.erase("timings");
  return j;
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("check " + data("t1.json")).code, 0);
  EXPECT_EQ(run("check " + data("t2.json")).code, 1);
  EXPECT_EQ(run("check " + data("trs.json")).code, 0);
  EXPECT_EQ(run("check --method sampled " + data("trs.json")).code, 2);
  EXPECT_EQ(run("check " + data("malformed.json")).code, 3);
  EXPECT_EQ(run("check " + data("missing.json")).code, 3);
  EXPECT_EQ(run("check --method two-constraint " + data("trs.json")).code, 3);
  EXPECT_EQ(run("check --method nope " + data("t1.json")).code, 3);
  EXPECT_EQ(run("decompose " + data("t2.json") + " --point " + data("t2_witness.json")).code, 1);
  EXPECT_EQ(run("decompose " + data("trs.json") + " --point " + data("trs_point.json")).code, 0);
}

TEST(Cli, VerdictJson) {
  const Result r = run("check " + data("t2.json"));
  const nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["status"], "NotExact");
  EXPECT_TRUE(j.contains("timings"));
  EXPECT_FALSE(j["evidence"]["witness"].is_null());
}

TEST(Cli, RelaxAndOracle) {
  const nlohmann::json relax = nlohmann::json::parse(run("relax " + data("trs.json")).out);
  EXPECT_NEAR(relax["opt_sdp"].get<double>(), -1.0, 1e-6);
  const Result o = run("oracle " + data("trs.json") + " --grid 41 --dirs 8 --global-min");
  ASSERT_EQ(o.code, 0);
  const nlohmann::json oj = nlohmann::json::parse(o.out);
  EXPECT_NEAR(oj["global_min"].get<double>(), -1.0, 1e-9);
  EXPECT_EQ(run("oracle " + data("infeasible.json") + " --grid 11").code, 3);
}

TEST(Cli, CsvHasHeaderAndRow) {
  const Result r = run("--csv check " + data("t1.json"));
  EXPECT_EQ(r.out.rfind("file,method,status,grade,reason\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
  EXPECT_NE(r.out.find(",Exact,"), std::string::npos);
}

TEST(Cli, DeterministicAcrossRunsAndThreads) {
  for (const std::string args : {"check " + data("t2.json"), "check --method sampled " + data("t1.json"),
                                 "oracle " + data("t1.json") + " --grid 41 --dirs 8",
                                 "check " + data("qmp.json")}) {
    const nlohmann::json a = without_timings(run(args).out);
    const nlohmann::json b = without_timings(run(args).out);
    const nlohmann::json c = without_timings(run("--threads 2 " + args).out);
    EXPECT_EQ(a, b) << args;
    EXPECT_EQ(a, c) << args;
  }
}
