#include <filesystem>

#include <gtest/gtest.h>

#include "z3ts/error.hpp"
#include "z3ts/io.hpp"

using namespace z3ts;
using io::json;

namespace {

io::SystemFile file(const std::string& family, json params = json::object(), double L = 10.0, int n = 100)
{
    io::SystemFile f;
    f.family = family;
    f.parameters = std::move(params);
    f.box = L;
    f.points = n;
    return f;
}

template <class F>
ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no z3ts::Error thrown";
    return ErrorKind::InvalidArgument;
}

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("z3ts_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(SystemFile, CanonicalizeFillsDefaults)
{
    const io::SystemFile c = io::canonicalize(file("n1-harmonic"));
    EXPECT_EQ(c.parameters["alpha"], 1.0);
    EXPECT_EQ(c.parameters["a0"], 0.0);
    EXPECT_EQ(c.parameters["mass"], 0.5);
    const io::SystemFile p = io::canonicalize(file("n2-chain", {{"g2", "constant:1.0"}}));
    EXPECT_EQ(p.parameters["g1"], "tanh:1,1");
    EXPECT_EQ(p.parameters["g2"], "constant:1");
    EXPECT_EQ(io::canonicalize(p).parameters, p.parameters);
}

TEST(SystemFile, Rejections)
{
    EXPECT_EQ(kind_of([] { io::canonicalize(file("n3-chain")); }), ErrorKind::UnknownFamily);
    EXPECT_EQ(kind_of([] { io::canonicalize(file("n1-harmonic", {{"gamma", 1.0}})); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { io::canonicalize(file("n1-harmonic", {{"alpha", "one"}})); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { io::canonicalize(file("n2-chain", {{"g1", "cosh"}})); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { io::canonicalize(file("n1-general")); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { io::build_system(file("n1-harmonic", {{"alpha", -1.0}})); }), ErrorKind::InvalidFamily);
    EXPECT_EQ(kind_of([] { io::build_system(file("n1-harmonic", json::object(), 10.0, 4)); }), ErrorKind::InvalidGrid);
    EXPECT_EQ(kind_of([] { io::system_file_from_json(json{{"family", "n2-chain"}}); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { io::system_file_from_json(json{{"format_version", 9}, {"family", "x"}}); }),
              ErrorKind::InvalidArgument);
}

TEST(SystemFile, JsonRoundTrip)
{
    const io::SystemFile a = io::canonicalize(file("n2-chain", {{"f1", 1.25}}, 7.5, 81));
    const io::SystemFile b = io::system_file_from_json(io::to_json(a));
    EXPECT_EQ(io::to_json(a), io::to_json(b));
    EXPECT_EQ(b.box, 7.5);
    EXPECT_EQ(b.points, 81);
}

TEST(SystemFile, WriteAndReadBack)
{
    const auto path = scratch("sys.json").string();
    const io::SystemFile a = io::canonicalize(file("n1-harmonic", {{"beta", 0.1}}));
    io::write_system_file(path, a);
    const std::string first = io::read_text(path);
    io::write_system_file(path, io::read_system_file(path));
    EXPECT_EQ(io::read_text(path), first);
    EXPECT_EQ(io::to_json(io::read_system_file(path)), io::to_json(a));
    for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(path).parent_path()))
        EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos) << e.path();
}

TEST(SystemFile, IoErrors)
{
    EXPECT_EQ(kind_of([] { io::read_system_file("/nonexistent/dir/x.json"); }), ErrorKind::Io);
    EXPECT_EQ(kind_of([] { io::write_text_atomic("/nonexistent/dir/x.json", "{}"); }), ErrorKind::Io);
    const auto path = scratch("broken.json").string();
    io::write_text_atomic(path, "{ not json");
    EXPECT_EQ(kind_of([&] { io::read_system_file(path); }), ErrorKind::Io);
}

TEST(Build, ConditionSupsAreReported)
{
    const io::BuiltSystem b = io::build_system(io::canonicalize(file("n2-chain")));
    for (const char* k : {"g1-V1", "g1-V2", "g2-V2", "g2-V3", "g2-V3-literal"})
        ASSERT_TRUE(b.condition_sup.count(k)) << k;
    EXPECT_LE(b.condition_sup.at("g1-V1"), 1e-12);
    // with g2 constant the literal variant carries the g1' term
    EXPECT_GT(b.condition_sup.at("g2-V3-literal"), 0.5);
}

TEST(Output, SpectrumCsvFormat)
{
    Eigen::VectorXd a(3), b(2), c(1);
    a << 0.0, 0.1, 2.0;
    b << 1.0 / 3.0, 4.0;
    c << 5.0;
    const std::string s = io::spectrum_csv({a, b, c}, 2);
    EXPECT_EQ(s, "sector,index,eigenvalue\n1,0,0\n1,1,0.10000000000000001\n2,0,0.33333333333333331\n2,1,4\n3,0,5\n");
    EXPECT_THROW(io::spectrum_csv({a, b, c}, 0), Error);
}

TEST(Output, PotentialCsvHasZeroModeAtOrigin)
{
    const io::BuiltSystem b = io::build_system(io::canonicalize(file("n1-harmonic", json::object(), 10.0, 401)));
    const std::string s = io::potential_csv(b.system);
    EXPECT_EQ(s.substr(0, 11), "x,V1,V2,V3\n");
    EXPECT_NE(s.find("\n0,-1,-1,1\n"), std::string::npos);
}

TEST(Output, NonFiniteBecomesInvalid)
{
    bool invalid = false;
    EXPECT_EQ(io::number(1.5, invalid), 1.5);
    EXPECT_FALSE(invalid);
    EXPECT_EQ(io::number(std::nan(""), invalid), "invalid");
    EXPECT_TRUE(invalid);
    EXPECT_EQ(io::format17(INFINITY), "invalid");
}

TEST(Output, DumpsEndWithNewline)
{
    const json j{{"a", 1}};
    EXPECT_EQ(io::dump_line(j), "{\"a\":1}\n");
    EXPECT_EQ(io::dump_pretty(j).back(), '\n');
}

TEST(Build, RebuildIsBitIdentical)
{
    const auto path = scratch("rebuild.json").string();
    const io::SystemFile a = io::canonicalize(file("n2-chain", {{"f2", 0.75}}, 8.0, 64));
    io::write_system_file(path, a);
    const io::BuiltSystem x = io::build_system(a);
    const io::BuiltSystem y = io::build_system(io::read_system_file(path));
    for (int i = 0; i < 3; ++i) {
        EXPECT_TRUE(x.system.D[i].entries == y.system.D[i].entries);
        EXPECT_TRUE(x.system.H[i].matrix.entries == y.system.H[i].matrix.entries);
        EXPECT_TRUE(x.system.M[i].entries == y.system.M[i].entries);
        EXPECT_TRUE((*x.system.K)[i].entries == (*y.system.K)[i].entries);
    }
}
