#include "z3ts/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "z3ts/error.hpp"

namespace z3ts::io {

namespace {

const std::set<std::string> kFamilies = {"n1-harmonic", "n1-general", "n2-chain"};

void bad(const std::string& what) { fail(ErrorKind::InvalidArgument, what); }

double get_number(const json& params, const std::string& key, std::optional<double> fallback)
{
    if (!params.contains(key)) {
        if (!fallback)
            bad("missing parameter '" + key + "'");
        return *fallback;
    }
    const json& v = params.at(key);
    if (!v.is_number())
        bad("parameter '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        bad("parameter '" + key + "' must be finite");
    return d;
}

std::string get_function(const json& params, const std::string& key, std::optional<std::string> fallback)
{
    if (!params.contains(key)) {
        if (!fallback)
            bad("missing function parameter '" + key + "'");
        return parse_function(*fallback).spec();
    }
    const json& v = params.at(key);
    if (!v.is_string())
        bad("function parameter '" + key + "' must be a string like 'tanh' or 'constant:1.0'");
    return parse_function(v.get<std::string>()).spec();
}

std::array<double, 3> get_triple(const json& params, const std::string& key)
{
    if (!params.contains(key))
        bad("missing parameter '" + key + "'");
    const json& v = params.at(key);
    if (!v.is_array() || v.size() != 3)
        bad("parameter '" + key + "' must be an array of three numbers");
    std::array<double, 3> out{};
    for (size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
            bad("parameter '" + key + "' must hold finite numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

void reject_unknown(const json& params, const std::set<std::string>& allowed, const std::string& family)
{
    for (auto it = params.begin(); it != params.end(); ++it)
        if (!allowed.count(it.key()))
            bad("unknown parameter '" + it.key() + "' for family " + family);
}

double sup(const GridFunction& g) { return g.values.size() ? g.values.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

const char* tool_version() { return "z3ts 1.0.0"; }

std::string format17(double v)
{
    if (!std::isfinite(v))
        return "invalid";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const SystemFile& f)
{
    json j;
    j["format_version"] = f.format_version;
    j["family"] = f.family;
    j["parameters"] = f.parameters;
    j["grid"] = {{"L", f.box}, {"n", f.points}};
    return j;
}

SystemFile system_file_from_json(const json& j)
{
    if (!j.is_object())
        bad("system file must be a JSON object");
    SystemFile f;
    if (j.contains("format_version")) {
        if (!j["format_version"].is_number_integer())
            bad("format_version must be an integer");
        f.format_version = j["format_version"].get<int>();
    }
    if (f.format_version != kFormatVersion)
        bad("unsupported format_version " + std::to_string(f.format_version));
    if (!j.contains("family") || !j["family"].is_string())
        bad("system file needs a family name");
    f.family = j["family"].get<std::string>();
    if (j.contains("parameters")) {
        if (!j["parameters"].is_object())
            bad("parameters must be an object");
        f.parameters = j["parameters"];
    }
    if (!j.contains("grid") || !j["grid"].is_object())
        bad("system file needs a grid {L, n}");
    const json& g = j["grid"];
    if (!g.contains("L") || !g["L"].is_number() || !g.contains("n") || !g["n"].is_number_integer())
        bad("grid needs a number L and an integer n");
    f.box = g["L"].get<double>();
    f.points = g["n"].get<int>();
    return f;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        fail(ErrorKind::Io, "cannot read '" + path + "'");
    return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& text)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out)
            fail(ErrorKind::Io, "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move output into place at '" + path + "'");
    }
}

SystemFile read_system_file(const std::string& path)
{
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Io, "'" + path + "' is not valid JSON: " + e.what());
    }
    return system_file_from_json(j);
}

void write_system_file(const std::string& path, const SystemFile& f)
{
    write_text_atomic(path, dump_pretty(to_json(f)));
}

SystemFile canonicalize(const SystemFile& f)
{
    if (!kFamilies.count(f.family))
        fail(ErrorKind::UnknownFamily, "unknown family '" + f.family + "' (expected n1-harmonic, n1-general or n2-chain)");
    make_grid(f.box, f.points);
    const json& p = f.parameters;
    if (!p.is_object())
        bad("parameters must be an object");

    SystemFile out = f;
    json c = json::object();
    if (f.family == "n1-harmonic") {
        reject_unknown(p, {"alpha", "beta", "a0", "f", "g", "mass"}, f.family);
        c["alpha"] = get_number(p, "alpha", 1.0);
        c["beta"] = get_number(p, "beta", 0.0);
        c["a0"] = get_number(p, "a0", 0.0);
        c["f"] = get_number(p, "f", 1.0);
        c["g"] = get_number(p, "g", 1.0);
        c["mass"] = get_number(p, "mass", 0.5);
    } else if (f.family == "n2-chain") {
        reject_unknown(p, {"g1", "g2", "f1", "f2", "a0", "mass"}, f.family);
        c["g1"] = get_function(p, "g1", "tanh");
        c["g2"] = get_function(p, "g2", "constant:1");
        c["f1"] = get_number(p, "f1", 1.0);
        c["f2"] = get_number(p, "f2", 1.0);
        c["a0"] = get_number(p, "a0", 0.0);
        c["mass"] = get_number(p, "mass", 0.5);
    } else {
        reject_unknown(p, {"g", "f", "a0", "a1", "mass", "consistency_tol"}, f.family);
        if (!p.contains("g") || !p["g"].is_array() || p["g"].size() != 3)
            bad("parameter 'g' must be an array of three function specs");
        json gs = json::array();
        for (size_t i = 0; i < 3; ++i) {
            if (!p["g"][i].is_string())
                bad("parameter 'g' must hold function spec strings");
            gs.push_back(parse_function(p["g"][i].get<std::string>()).spec());
        }
        c["g"] = gs;
        c["f"] = get_triple(p, "f");
        c["a0"] = get_triple(p, "a0");
        c["a1"] = get_triple(p, "a1");
        c["mass"] = get_number(p, "mass", 0.5);
        c["consistency_tol"] = get_number(p, "consistency_tol", 1e-8);
    }
    out.parameters = std::move(c);
    return out;
}

BuiltSystem build_system(const SystemFile& raw)
{
    const SystemFile f = canonicalize(raw);
    const GridSpec grid = make_grid(f.box, f.points);
    const json& p = f.parameters;
    BuiltSystem b;

    if (f.family == "n1-harmonic") {
        N1HarmonicParams hp;
        hp.alpha = p["alpha"].get<double>();
        hp.beta = p["beta"].get<double>();
        hp.a0 = p["a0"].get<double>();
        hp.f = p["f"].get<double>();
        hp.g = p["g"].get<double>();
        hp.mass = p["mass"].get<double>();
        b.system = build_n1_harmonic(hp, grid);
        return b;
    }

    if (f.family == "n2-chain") {
        const AnalyticFunction g1 = parse_function(p["g1"].get<std::string>());
        const AnalyticFunction g2 = parse_function(p["g2"].get<std::string>());
        N2ChainParams cp;
        cp.mass = p["mass"].get<double>();
        cp.f1 = p["f1"].get<double>();
        cp.f2 = p["f2"].get<double>();
        cp.a0 = p["a0"].get<double>();
        cp.g1 = sample(grid, g1);
        cp.g2 = sample(grid, g2);
        cp.dg1 = sample_derivative(grid, g1);
        cp.dg2 = sample_derivative(grid, g2);
        N2ChainResult r = build_n2_chain(cp, grid);
        b.system = std::move(r.system);
        b.system.family.parameters["g1"] = g1.spec();
        b.system.family.parameters["g2"] = g2.spec();
        static const char* names[] = {"g1-V1", "g1-V2", "g2-V2", "g2-V3"};
        for (int i = 0; i < 4; ++i)
            b.condition_sup[names[i]] = sup(r.condition_residuals[i]);
        b.condition_sup["g2-V3-literal"] = sup(r.literal_fourth);
        return b;
    }

    N1Params np;
    np.mass = p["mass"].get<double>();
    np.consistency_tol = p["consistency_tol"].get<double>();
    const auto fs = p["f"].get<std::array<double, 3>>();
    const auto a0 = p["a0"].get<std::array<double, 3>>();
    const auto a1 = p["a1"].get<std::array<double, 3>>();
    for (int i = 0; i < 3; ++i) {
        const AnalyticFunction g = parse_function(p["g"][i].get<std::string>());
        np.f[i] = fs[i];
        np.a0[i] = a0[i];
        np.a1[i] = a1[i];
        np.g[i] = sample(grid, g);
        np.dg[i] = sample_derivative(grid, g);
    }
    N1GeneralResult r = build_n1_general(np, grid);
    b.system = std::move(r.system);
    for (int i = 0; i < 3; ++i) {
        b.system.family.parameters["g" + std::to_string(i + 1)] = p["g"][i].get<std::string>();
        const std::string s = "s" + std::to_string(i + 1);
        b.condition_sup[s + "-own"] = sup(r.condition_residuals[i].first);
        b.condition_sup[s + "-next"] = sup(r.condition_residuals[i].second);
    }
    return b;
}

json number(double v, bool& invalid)
{
    if (!std::isfinite(v)) {
        invalid = true;
        return "invalid";
    }
    return v;
}

json grid_json(const GridSpec& g)
{
    return {{"L", g.half_width}, {"n", g.points}, {"h", g.spacing}};
}

json residuals_json(const AlgebraReport& rep, bool& invalid)
{
    json r = json::object();
    for (const auto& [k, v] : rep.residuals)
        r[k] = number(v, invalid);
    return r;
}

json verify_json(const SystemFile& f, const BuiltSystem& b, const AlgebraReport& rep, const A5Redundancy& a5)
{
    bool invalid = false;
    json j;
    j["format_version"] = kFormatVersion;
    j["tool_version"] = tool_version();
    j["family"] = f.family;
    j["parameters"] = canonicalize(f).parameters;
    j["grid"] = grid_json(b.system.family.grid);
    j["tolerance"] = number(rep.tolerance, invalid);
    j["residuals"] = residuals_json(rep, invalid);
    j["pass"] = rep.pass;
    j["all_pass"] = rep.all_pass();
    j["a5_redundancy"] = {{"residual_a4", number(a5.residual_a4, invalid)},
                          {"residual_a5", number(a5.residual_a5, invalid)},
                          {"redundant", a5.redundant}};
    json cond = json::object();
    for (const auto& [k, v] : b.condition_sup)
        cond[k] = number(v, invalid);
    j["condition_residuals"] = cond;
    j["warnings"] = b.system.family.warnings;
    j["error"] = invalid;
    return j;
}

json invariants_json(const SpectralReport& rep)
{
    bool invalid = false;
    json j;
    j["n0"] = rep.n0;
    j["delta"] = rep.delta;
    j["uts"] = rep.uts_pattern_ok;
    j["boundary_modes"] = rep.boundary_modes;
    j["nonnegative"] = rep.nonnegative;
    j["eps0"] = number(rep.eps0, invalid);
    j["clusters"] = rep.clusters.size();
    j["error"] = invalid;
    return j;
}

json class_json(const ClassReport& rep)
{
    bool invalid = false;
    auto fit = [&](const ClassEvidence& e) {
        json o;
        o["operator"] = e.operator_name;
        o["sector"] = e.sector;
        o["N"] = e.fit.N ? json(*e.fit.N) : json(nullptr);
        json c = json::array();
        for (double v : e.fit.coefficients)
            c.push_back(number(v, invalid));
        o["coefficients"] = c;
        o["residual"] = number(e.fit.residual, invalid);
        json rd = json::array();
        for (double v : e.fit.residual_by_degree)
            rd.push_back(number(v, invalid));
        o["residual_by_degree"] = rd;
        o["fit_dim"] = e.fit.fit_dim;
        return o;
    };
    json j;
    j["N"] = rep.N ? json(*rep.N) : json(nullptr);
    const json primary = fit(rep.primary);
    j["operator"] = primary["operator"];
    j["coefficients"] = primary["coefficients"];
    j["residual"] = primary["residual"];
    j["primary_N"] = primary["N"];
    j["tolerance"] = number(rep.tolerance, invalid);
    j["window_fraction"] = number(rep.window_fraction, invalid);
    json fits = json::array();
    for (const auto& e : rep.fits)
        fits.push_back(fit(e));
    j["fits"] = fits;
    j["error"] = invalid;
    return j;
}

json spectral_json(const SpectralReport& rep, int lowest)
{
    bool invalid = false;
    json j;
    json counts = json::array(), low = json::array();
    for (const auto& e : rep.eigenvalues) {
        counts.push_back(e.size());
        json s = json::array();
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(lowest, e.size()); ++k)
            s.push_back(number(e[k], invalid));
        low.push_back(s);
    }
    j["dims"] = counts;
    j["lowest"] = low;
    j["eps0"] = number(rep.eps0, invalid);
    j["nonnegative"] = rep.nonnegative;

    std::map<std::string, int> patterns;
    json first = json::array();
    for (const auto& c : rep.clusters) {
        const auto& m = c.multiplicities;
        patterns[std::to_string(m[0]) + "," + std::to_string(m[1]) + "," + std::to_string(m[2])] += 1;
        if (static_cast<int>(first.size()) < lowest)
            first.push_back({{"energy", number(c.energy, invalid)}, {"multiplicities", m},
                             {"spread", number(c.spread(), invalid)}});
    }
    j["clusters"] = {{"count", rep.clusters.size()}, {"patterns", patterns}, {"lowest", first}};
    j["n0"] = rep.n0;
    j["boundary_modes"] = rep.boundary_modes;
    j["delta"] = rep.delta;
    j["uts_pattern_ok"] = rep.uts_pattern_ok;
    j["error"] = invalid;
    return j;
}

std::string spectrum_csv(const std::array<Eigen::VectorXd, 3>& eigs, int count)
{
    if (count <= 0)
        bad("count must be positive");
    std::string out = "sector,index,eigenvalue\n";
    for (int s = 0; s < 3; ++s)
        for (Eigen::Index k = 0; k < std::min<Eigen::Index>(count, eigs[s].size()); ++k)
            out += std::to_string(s + 1) + "," + std::to_string(k) + "," + format17(eigs[s][k]) + "\n";
    return out;
}

std::string potential_csv(const TSSystem& sys)
{
    const GridSpec& g = sys.family.grid;
    std::string out = "x,V1,V2,V3\n";
    for (int k = 0; k < g.points; ++k) {
        out += format17(g.node(k));
        for (int i = 0; i < 3; ++i)
            out += "," + (sys.potentials[i] ? format17(sys.potentials[i]->values[k]) : std::string("invalid"));
        out += "\n";
    }
    return out;
}

std::string dump_line(const json& j) { return j.dump() + "\n"; }
std::string dump_pretty(const json& j) { return j.dump(2) + "\n"; }

} // namespace z3ts::io
