#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "qdetect/report_json.hpp"

using qdetect::Json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = qdetect::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, VerifyExitCodes) {
    EXPECT_EQ(run({"verify"}).code, 0);
    EXPECT_EQ(run({"verify", "--variant", "repaired"}).code, 0);
    EXPECT_EQ(run({"verify", "--variant", "literal"}).code, 1);
}

TEST(Cli, JsonIsDeterministic) {
    const auto a = run({"--format", "json", "verify", "--variant", "both"});
    const auto b = run({"--format", "json", "verify", "--variant", "both"});
    EXPECT_EQ(a.out, b.out);
    const auto j = Json::parse(a.out);
    EXPECT_EQ(j["schema"], "qdetect.report/v1");
    EXPECT_EQ(j["command"], "verify");
    EXPECT_EQ(j["exit_code"], 0);
}

TEST(Cli, AuditAndDump) {
    EXPECT_EQ(run({"audit", "--variant", "literal"}).code, 0);
    const auto text = run({"dump", "--variant", "literal"});
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("Psi[psi1⊗|7/2>] = -1/32"), std::string::npos);
}

TEST(Cli, DumpInputRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "qdetect_cli_dump.json";
    EXPECT_EQ(run({"--format", "json", "--output", path.string(), "dump", "--variant", "both"}).code, 0);
    std::ifstream in(path);
    const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto again = run({"--format", "json", "dump", "--input", path.string()});
    EXPECT_EQ(again.code, 0);
    EXPECT_EQ(Json::parse(again.out), Json::parse(written));
    std::filesystem::remove(path);
    EXPECT_EQ(run({"dump", "--input", "/nonexistent/qdetect.json"}).code, 2);
}

TEST(Cli, Solve) {
    EXPECT_EQ(run({"solve"}).code, 0);
    const auto lit = run({"--format", "json", "solve", "--psi", "literal"});
    EXPECT_EQ(lit.code, 1);
    EXPECT_TRUE(Json::parse(lit.out)["results"].contains("infeasible"));
    EXPECT_EQ(run({"solve", "--psi", "product", "--enumerate"}).code, 1);
    EXPECT_EQ(run({"solve", "--enumerate"}).code, 0);
}

TEST(Cli, Simulate) {
    const auto a = run({"--format", "json", "simulate", "--trials", "20000", "--shards", "1"});
    const auto b = run({"--format", "json", "simulate", "--trials", "20000", "--shards", "3"});
    EXPECT_EQ(a.code, 0);
    auto ja = Json::parse(a.out);
    auto jb = Json::parse(b.out);
    ja["config"].erase("shards");
    jb["config"].erase("shards");
    EXPECT_EQ(ja["results"], jb["results"]);
}

TEST(Cli, ToleranceHandling) {
    EXPECT_EQ(run({"--abs-tol", "1e-3", "verify"}).code, 0);
    EXPECT_EQ(run({"--abs-tol", "1e-3", "--warn-tol", "1e-4", "verify"}).code, 2);
    EXPECT_EQ(run({"--abs-tol", "-1", "verify"}).code, 2);
    ::setenv("QDETECT_ABS_TOL", "1e-3", 1);
    const auto env = run({"--format", "json", "verify"});
    ::unsetenv("QDETECT_ABS_TOL");
    EXPECT_EQ(env.code, 0);
    EXPECT_EQ(Json::parse(env.out)["config"]["tolerances"]["abs_tol"], 1e-3);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"verify", "--variant", "neither"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}
