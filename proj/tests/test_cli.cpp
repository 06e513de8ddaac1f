#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(SDEM_CLI_PATH) + " " + args + " 2>&1";
    Outcome r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string bench(const std::string& name) { return std::string(SDEM_BENCHMARK_DIR) + "/" + name + ".json"; }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(Cli, CheckProsolvable) {
    const Outcome r = run("check " + bench("ou-env"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(contains(r.out, "prosolvable: yes"));
    EXPECT_TRUE(contains(r.out, "partition: ({x1},{x2})"));
    EXPECT_TRUE(contains(r.out, "W = (1,3)"));
}

TEST(Cli, CheckRejectsNonlinearCycle) {
    const Outcome r = run("check " + bench("double-well"));
    EXPECT_EQ(r.code, 4);
    EXPECT_TRUE(contains(r.out, "prosolvable: no"));
    EXPECT_TRUE(contains(r.out, "x -> x"));
}

TEST(Cli, CheckWithPartition) {
    EXPECT_EQ(run("check " + bench("vehicles") + " --partition \"v1|p1,p2,v2\"").code, 0);
    EXPECT_EQ(run("check " + bench("ou-env") + " --partition \"x2|x1\"").code, 4);
}

TEST(Cli, MomentClosedFormText) {
    const Outcome r = run("moment " + bench("ou-env") + " --alpha 0,2 --times 0:1:0.5 --closed-form");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(contains(r.out, "closure size: 8"));
    EXPECT_TRUE(contains(r.out, "1/3 + (-11/8 - 1/4*t)*exp(-2*t) + 2/3*exp(-3*t) + (3/8 + t + 3/4*t^2)*exp(-4*t)"));
    EXPECT_TRUE(contains(r.out, "t,value\n0,0\n0.5,"));
}

TEST(Cli, MomentJson) {
    const Outcome r = run("--json moment " + bench("ou-env") + " --alpha 0,2 --times 0,50 --closed-form");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["closure_size"], 8);
    EXPECT_EQ(j["closed_form"]["scalar_kind"], "exact-rational");
    EXPECT_EQ(j["closed_form"]["terms"].size(), 4u);
    // the flag may also follow the subcommand
    const Outcome again = run("moment " + bench("ou-env") + " --alpha 0,2 --times 0,50 --closed-form --json");
    EXPECT_EQ(again.out, r.out);
}

TEST(Cli, MomentPolynomialTarget) {
    const Outcome r = run("moment " + bench("vehicles") + " --alpha \"p1 - p2\" --times 0 --closed-form");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(contains(r.out, "1/4 + 1/2*t + exp(-t) - 1/4*exp(-2*t)")) << r.out;
    EXPECT_TRUE(contains(r.out, "t,value\n0,1"));
}

TEST(Cli, MomentDivergenceExitsTwo) {
    const Outcome r = run("moment " + bench("double-well") + " --alpha 2");
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(contains(r.out, "x^2 -> x^4 -> x^6"));
}

TEST(Cli, ClosureRows) {
    const Outcome r = run("closure " + bench("ou-env") + " --alpha 0,2");
    EXPECT_EQ(r.code, 0) << r.out;
    const Outcome j = run("--json closure " + bench("ou-env") + " --alpha 0,2");
    EXPECT_EQ(nlohmann::json::parse(j.out)["indices"].size(), 8u);
    EXPECT_EQ(run("closure " + bench("double-well") + " --alpha 2 --max-degree 10").code, 2);
}

TEST(Cli, SimulateCsvIsReproducible) {
    const std::string args = "simulate " + bench("ou-env") + " --alpha 2,0 --times 0.5,1 --paths 2000 --dt 0.01 --seed 3";
    const Outcome a = run(args), b = run(args + " --workers 4");
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_TRUE(contains(a.out, "time,mean,std_error,paths\n"));
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, Table1AllMatch) {
    const Outcome r = run("table1");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_FALSE(contains(r.out, "MISMATCH"));
}

TEST(Cli, VerifyPassesAndMismatchExitsFour) {
    const Outcome ok = run("verify " + bench("ou-env") + " --alpha 0,2 --expect-size 8");
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_FALSE(contains(ok.out, "FAIL"));
    const Outcome bad = run("verify " + bench("ou-env") + " --alpha 0,2 --expect-size 9");
    EXPECT_EQ(bad.code, 4);
    EXPECT_TRUE(contains(bad.out, "FAIL closure-size"));
}

TEST(Cli, ModelErrorsExitThree) {
    const std::string path = testing::TempDir() + "sdem_bad_model.json";
    std::ofstream(path) << R"({"name": "bad", "variables": ["x"], "brownian_dim": 1, "drift": ["x +"], "diffusion": [["1"]],
                              "initial": {"kind": "point", "values": ["0"]}})";
    EXPECT_EQ(run("check " + path).code, 3);
    EXPECT_EQ(run("check /nonexistent/model.json").code, 3);
    EXPECT_EQ(run("moment " + bench("ou-env") + " --alpha 1,2,3").code, 3);
    EXPECT_EQ(run("moment " + bench("ou-env") + " --alpha 0,2 --times 1,0").code, 3);
}
