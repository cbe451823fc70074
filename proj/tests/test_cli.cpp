#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "z3ts/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args)
{
    const std::string cmd = std::string(Z3TS_CLI_PATH) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p)
        return r;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0)
        r.out.append(buf.data(), n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("z3ts_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, HelpAndVersion)
{
    EXPECT_EQ(run("--help").code, 0);
    const CliRun v = run("--version");
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("z3ts"), std::string::npos);
}

TEST_F(Cli, ExitCodeContract)
{
    const std::string sys = path("h.json");
    EXPECT_EQ(run("build --family n1-harmonic --points 60 --box 6 --out " + sys).code, 0);
    EXPECT_EQ(run("verify " + sys).code, 0);

    const std::string pt = path("p.json");
    EXPECT_EQ(run("build --family n2-chain --points 60 --out " + pt).code, 0);
    EXPECT_EQ(run("verify " + pt + " --tol 1e-10").code, 1);

    EXPECT_EQ(run("build --family n4-tower --out " + path("x.json")).code, 2);
    EXPECT_EQ(run("build --family n1-harmonic --alpha -1 --out " + path("x.json")).code, 3);
    EXPECT_EQ(run("build --family n1-harmonic --points 3 --out " + path("x.json")).code, 3);
    EXPECT_EQ(run("build --family n1-harmonic --g1 tanh --out " + path("x.json")).code, 3);
    EXPECT_EQ(run("build --family n2-chain --g1 cosh --out " + path("x.json")).code, 3);
    EXPECT_FALSE(fs::exists(path("x.json")));
    EXPECT_EQ(run("verify").code, 3);
    EXPECT_EQ(run("frobnicate").code, 3);
    EXPECT_EQ(run("spectrum " + sys + " --count 0").code, 3);
    EXPECT_EQ(run("verify " + path("missing.json")).code, 4);
    EXPECT_EQ(run("build --family n1-harmonic --out /nonexistent/dir/h.json").code, 4);
}

TEST_F(Cli, BuildFromConfigOverridesGrid)
{
    const std::string a = path("a.json"), b = path("b.json"), c = path("c.json");
    ASSERT_EQ(run("build --family n2-chain --f2 1.5 --points 50 --out " + a).code, 0);
    ASSERT_EQ(run("build --config " + a + " --points 64 --out " + b).code, 0);
    ASSERT_EQ(run("build --family n2-chain --f2 1.5 --points 64 --out " + c).code, 0);
    const CliRun rb = run("invariants " + b), rc = run("invariants " + c);
    EXPECT_EQ(rb.out, rc.out);
    EXPECT_EQ(run("build --config " + a + " --family n1-harmonic --out " + b).code, 3);
}

TEST_F(Cli, OutputsAreSingleLineJson)
{
    const std::string sys = path("h.json");
    ASSERT_EQ(run("build --family n1-harmonic --points 60 --box 6 --out " + sys).code, 0);
    for (const std::string sub : {"verify ", "invariants ", "classify "}) {
        const CliRun r = run(sub + sys);
        ASSERT_FALSE(r.out.empty()) << sub;
        EXPECT_EQ(r.out.front(), '{') << sub;
        EXPECT_EQ(r.out.find('\n'), r.out.size() - 1) << sub;
    }
    const CliRun csv = run("spectrum " + sys + " --count 3");
    EXPECT_EQ(csv.out.substr(0, 24), "sector,index,eigenvalue\n");
    EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 10);
}

TEST_F(Cli, ReportWithoutTimingsIsReproducible)
{
    const std::string sys = path("p.json");
    ASSERT_EQ(run("build --family n2-chain --points 80 --out " + sys).code, 0);
    EXPECT_EQ(run("report " + sys + " --tol 1 --out " + path("r1.json")).code, 0);
    EXPECT_EQ(run("report " + sys + " --tol 1 --out " + path("r2.json")).code, 0);
    const CliRun a = run("report " + sys + " --tol 1"), b = run("report " + sys + " --tol 1");
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find("timings"), std::string::npos);
    EXPECT_NE(run("report " + sys + " --tol 1 --timings").out.find("timings"), std::string::npos);
}

TEST_F(Cli, SpectrumRowsAndZeroMode)
{
    const std::string sys = path("h.json");
    ASSERT_EQ(run("build --family n1-harmonic --alpha 1.0 --beta 0.0 --a0 0.0 --f 1.0 --g 1.0 --mass 0.5 --box 10 "
                  "--points 400 --out " + sys).code, 0);
    const CliRun r = run("spectrum " + sys + " --count 6");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 18);
    const std::string first = r.out.substr(r.out.find('\n') + 1, r.out.find('\n', r.out.find('\n') + 1) - r.out.find('\n') - 1);
    ASSERT_EQ(first.substr(0, 4), "1,0,");
    EXPECT_LE(std::abs(std::stod(first.substr(4))), 1e-3);
}

TEST_F(Cli, ChainPotentialAtOrigin)
{
    // odd n puts a node at x = 0
    const std::string sys = path("pt.json"), csv = path("v.csv");
    ASSERT_EQ(run("build --family n2-chain --g1 tanh --g2 constant:1.0 --f1 1 --f2 1 --a0 0 --mass 0.5 --box 10 "
                  "--points 801 --out " + sys).code, 0);
    ASSERT_EQ(run("spectrum " + sys + " --count 1 --potential-csv " + csv).code, 0);
    const std::string text = z3ts::io::read_text(csv);
    EXPECT_EQ(text.substr(0, 11), "x,V1,V2,V3\n");
    EXPECT_NE(text.find("\n0,-1,1,1\n"), std::string::npos);
}

TEST_F(Cli, VerifyWritesFullReportEvenWhenFailing)
{
    const std::string sys = path("pt.json"), rep = path("rep.json");
    ASSERT_EQ(run("build --family n2-chain --points 100 --out " + sys).code, 0);
    EXPECT_EQ(run("verify " + sys + " --tol 1e-10 --report " + rep).code, 1);
    const auto j = z3ts::io::json::parse(z3ts::io::read_text(rep));
    for (const char* k : {"a1", "a2", "a4", "a5", "a6", "6-1", "6", "7", "10", "11", "a1-K", "n2-factorization-mismatch"})
        EXPECT_TRUE(j["residuals"].contains(k)) << k;
    EXPECT_FALSE(j["pass"]["a1"].get<bool>());
    EXPECT_TRUE(j["pass"]["a6"].get<bool>());
    for (const char* k : {"spectrum", "clusters", "n0", "delta", "class_N", "tool_version", "grid"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["n0"], z3ts::io::json::parse("[1,0,0]"));
    EXPECT_EQ(j["delta"], z3ts::io::json::parse("[-1,-1,0]"));
}
