// z3ts command-line front end.
//
// Exit codes: 0 pass, 1 verification failed, 2 unknown family,
// 3 invalid parameter, 4 I/O error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "z3ts/error.hpp"
#include "z3ts/io.hpp"

namespace {

using namespace z3ts;
using io::json;

enum Exit { kPass = 0, kFail = 1, kUnknownFamily = 2, kInvalid = 3, kIo = 4 };

struct BuildArgs {
    std::string family;
    std::string config;
    std::string out;
    std::optional<double> box;
    std::optional<int> points;
    std::optional<double> alpha, beta, a0, f, g, mass, f1, f2, f3;
    std::optional<std::string> g1, g2, g3;
    std::vector<double> a0s, a1s;
};

class Clock {
public:
    void lap(const std::string& name)
    {
        const auto now = std::chrono::steady_clock::now();
        laps_[name] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    json to_json() const { return laps_; }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::map<std::string, double> laps_;
};

void emit(const std::string& text, const std::string& path)
{
    if (path.empty())
        std::fputs(text.c_str(), stdout);
    else
        io::write_text_atomic(path, text);
}

int cmd_build(const BuildArgs& a)
{
    io::SystemFile sf;
    if (!a.config.empty()) {
        sf = io::read_system_file(a.config);
        if (!a.family.empty() && a.family != sf.family)
            fail(ErrorKind::InvalidArgument, "--family disagrees with the config file");
    } else {
        if (a.family.empty())
            fail(ErrorKind::InvalidArgument, "build needs --family or --config");
        sf.family = a.family;
        sf.box = 10.0;
        sf.points = 400;
    }
    if (a.box)
        sf.box = *a.box;
    if (a.points)
        sf.points = *a.points;

    // Family is checked before any parameter so an unknown name always maps to its own exit code.
    if (sf.family != "n1-harmonic" && sf.family != "n2-chain" && sf.family != "n1-general")
        fail(ErrorKind::UnknownFamily, "unknown family '" + sf.family + "'");

    json& p = sf.parameters;
    auto put = [&](const char* key, const auto& v) {
        if (v)
            p[key] = *v;
    };
    auto forbid = [&](const char* flag, bool given) {
        if (given)
            fail(ErrorKind::InvalidArgument, std::string("--") + flag + " does not apply to family " + sf.family);
    };
    if (sf.family == "n1-harmonic") {
        put("alpha", a.alpha);
        put("beta", a.beta);
        put("a0", a.a0);
        put("f", a.f);
        put("g", a.g);
        put("mass", a.mass);
        for (auto [flag, given] : {std::pair{"f1", !!a.f1}, {"f2", !!a.f2}, {"f3", !!a.f3}, {"g1", !!a.g1},
                                   {"g2", !!a.g2}, {"g3", !!a.g3}, {"a0-sectors", !a.a0s.empty()},
                                   {"a1-sectors", !a.a1s.empty()}})
            forbid(flag, given);
    } else if (sf.family == "n2-chain") {
        put("g1", a.g1);
        put("g2", a.g2);
        put("f1", a.f1);
        put("f2", a.f2);
        put("a0", a.a0);
        put("mass", a.mass);
        for (auto [flag, given] : {std::pair{"alpha", !!a.alpha}, {"beta", !!a.beta}, {"f", !!a.f}, {"g", !!a.g},
                                   {"f3", !!a.f3}, {"g3", !!a.g3}, {"a0-sectors", !a.a0s.empty()},
                                   {"a1-sectors", !a.a1s.empty()}})
            forbid(flag, given);
    } else {
        for (auto [flag, given] : {std::pair{"alpha", !!a.alpha}, {"beta", !!a.beta}, {"f", !!a.f}, {"g", !!a.g},
                                   {"a0", !!a.a0}})
            forbid(flag, given);
        if (a.f1 || a.f2 || a.f3) {
            if (!(a.f1 && a.f2 && a.f3))
                fail(ErrorKind::InvalidArgument, "n1-general needs all of --f1 --f2 --f3");
            p["f"] = {*a.f1, *a.f2, *a.f3};
        }
        if (a.g1 || a.g2 || a.g3) {
            if (!(a.g1 && a.g2 && a.g3))
                fail(ErrorKind::InvalidArgument, "n1-general needs all of --g1 --g2 --g3");
            p["g"] = {*a.g1, *a.g2, *a.g3};
        }
        if (!a.a0s.empty())
            p["a0"] = a.a0s;
        if (!a.a1s.empty())
            p["a1"] = a.a1s;
        put("mass", a.mass);
    }

    sf = io::canonicalize(sf);
    // Build once so invalid families are rejected before anything is written.
    io::build_system(sf);
    io::write_system_file(a.out, sf);
    return kPass;
}

// Full report: residuals, spectrum summary, clusters, invariants and class evidence.
json full_report(const io::SystemFile& sf, const io::BuiltSystem& b, const AlgebraReport& alg, const A5Redundancy& a5,
                 int max_degree, int lowest, Clock& clock)
{
    const SpectralReport spectral = analyze_spectrum(b.system, default_spectral_options(b.system));
    clock.lap("spectrum");
    const ClassReport cls = classify_system(b.system, ClassOptions{max_degree, std::nullopt, std::nullopt});
    clock.lap("classify");

    json j = io::verify_json(sf, b, alg, a5);
    const json sj = io::spectral_json(spectral, lowest);
    j["spectrum"] = {{"dims", sj["dims"]}, {"lowest", sj["lowest"]}, {"eps0", sj["eps0"]},
                     {"nonnegative", sj["nonnegative"]}};
    j["clusters"] = sj["clusters"];
    j["n0"] = sj["n0"];
    j["boundary_modes"] = sj["boundary_modes"];
    j["delta"] = sj["delta"];
    j["uts_pattern_ok"] = sj["uts_pattern_ok"];
    const json cj = io::class_json(cls);
    j["class_N"] = cj;
    j["error"] = j["error"].get<bool>() || sj["error"].get<bool>() || cj["error"].get<bool>();
    return j;
}

int cmd_verify(const std::string& path, double tol, const std::string& report)
{
    Clock clock;
    const io::SystemFile sf = io::read_system_file(path);
    const io::BuiltSystem b = io::build_system(sf);
    const AlgebraReport rep = verify_algebra(b.system, tol);
    const A5Redundancy a5 = check_a5_redundancy(b.system, tol);
    if (!report.empty())
        io::write_text_atomic(report, io::dump_pretty(full_report(sf, b, rep, a5, 4, 10, clock)));

    bool invalid = false;
    json summary;
    summary["all_pass"] = rep.all_pass();
    json failed = json::array();
    for (const auto& [k, ok] : rep.pass)
        if (!ok)
            failed.push_back(k);
    summary["failed"] = failed;
    summary["pass"] = rep.pass;
    summary["residuals"] = io::residuals_json(rep, invalid);
    summary["tolerance"] = tol;
    summary["error"] = invalid;
    std::fputs(io::dump_line(summary).c_str(), stdout);
    return rep.all_pass() ? kPass : kFail;
}

int cmd_spectrum(const std::string& path, int count, const std::string& csv, const std::string& pot)
{
    if (count <= 0)
        fail(ErrorKind::InvalidArgument, "--count must be positive");
    const io::BuiltSystem b = io::build_system(io::read_system_file(path));
    const auto es = eigendecompose_sectors(b.system, false);
    emit(io::spectrum_csv({es[0].values, es[1].values, es[2].values}, count), csv);
    if (!pot.empty())
        io::write_text_atomic(pot, io::potential_csv(b.system));
    return kPass;
}

int cmd_invariants(const std::string& path, std::optional<double> eps0)
{
    const io::BuiltSystem b = io::build_system(io::read_system_file(path));
    SpectralOptions opts = default_spectral_options(b.system);
    opts.eps0 = eps0;
    const SpectralReport rep = analyze_spectrum(b.system, opts);
    std::fputs(io::dump_line(io::invariants_json(rep)).c_str(), stdout);
    return kPass;
}

int cmd_classify(const std::string& path, int max_degree, std::optional<double> tol, std::optional<double> window)
{
    if (max_degree < 0)
        fail(ErrorKind::InvalidArgument, "--max-degree must be nonnegative");
    const io::BuiltSystem b = io::build_system(io::read_system_file(path));
    const ClassReport rep = classify_system(b.system, ClassOptions{max_degree, tol, window});
    std::fputs(io::dump_line(io::class_json(rep)).c_str(), stdout);
    return kPass;
}

int cmd_report(const std::string& path, const std::string& out, double tol, int max_degree, int lowest, bool timings)
{
    if (lowest <= 0)
        fail(ErrorKind::InvalidArgument, "--lowest must be positive");
    if (max_degree < 0)
        fail(ErrorKind::InvalidArgument, "--max-degree must be nonnegative");
    Clock clock;
    const io::SystemFile sf = io::read_system_file(path);
    const io::BuiltSystem b = io::build_system(sf);
    clock.lap("build");
    const AlgebraReport alg = verify_algebra(b.system, tol);
    const A5Redundancy a5 = check_a5_redundancy(b.system, tol);
    clock.lap("verify");
    json j = full_report(sf, b, alg, a5, max_degree, lowest, clock);
    if (timings)
        j["timings"] = clock.to_json();
    emit(io::dump_pretty(j), out);
    return alg.all_pass() ? kPass : kFail;
}

int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::UnknownFamily: return kUnknownFamily;
    case ErrorKind::Io: return kIo;
    default: return kInvalid;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Z3-graded topological symmetry workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::tool_version());

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "Write a system file for a family");
    build->add_option("--family", ba.family, "n1-harmonic, n1-general or n2-chain");
    build->add_option("--config", ba.config, "System file to start from");
    build->add_option("--out", ba.out, "Output system file")->required();
    build->add_option("--box", ba.box, "Half width L of the box [-L, L]");
    build->add_option("--points", ba.points, "Interior grid points");
    build->add_option("--alpha", ba.alpha);
    build->add_option("--beta", ba.beta);
    build->add_option("--a0", ba.a0);
    build->add_option("--f", ba.f);
    build->add_option("--g", ba.g);
    build->add_option("--mass", ba.mass);
    build->add_option("--f1", ba.f1);
    build->add_option("--f2", ba.f2);
    build->add_option("--f3", ba.f3);
    build->add_option("--g1", ba.g1, "Function spec, e.g. tanh or constant:1.0");
    build->add_option("--g2", ba.g2);
    build->add_option("--g3", ba.g3);
    build->add_option("--a0-sectors", ba.a0s, "a0 per sector (n1-general)")->delimiter(',')->expected(3);
    build->add_option("--a1-sectors", ba.a1s, "a1 per sector (n1-general)")->delimiter(',')->expected(3);

    std::string sys_path, report_path, csv_path, pot_path, out_path;
    double tol = 1e-10;
    int count = 10, max_degree = 4, lowest = 10;
    std::optional<double> eps0, class_tol, window;
    bool timings = false;

    auto* verify = app.add_subcommand("verify", "Check the algebra relations");
    verify->add_option("system", sys_path)->required();
    verify->add_option("--tol", tol, "Pass threshold for every residual");
    verify->add_option("--report", report_path, "Write the full report here");

    auto* spectrum = app.add_subcommand("spectrum", "Export the lowest eigenvalues of each sector");
    spectrum->add_option("system", sys_path)->required();
    spectrum->add_option("--count", count, "Eigenvalues per sector");
    spectrum->add_option("--csv", csv_path, "Output CSV (stdout if omitted)");
    spectrum->add_option("--potential-csv", pot_path, "Also write x,V1,V2,V3");

    auto* invariants = app.add_subcommand("invariants", "Zero modes, invariants and the degeneracy pattern");
    invariants->add_option("system", sys_path)->required();
    invariants->add_option("--eps0", eps0, "Zero-mode threshold");

    auto* classify = app.add_subcommand("classify", "Estimate the class integer N");
    classify->add_option("system", sys_path)->required();
    classify->add_option("--max-degree", max_degree);
    classify->add_option("--tol", class_tol, "Fit residual threshold");
    classify->add_option("--window", window, "Fraction of the lowest levels to fit on");

    auto* report = app.add_subcommand("report", "Full report: residuals, spectrum, invariants, class");
    report->add_option("system", sys_path)->required();
    report->add_option("--out", out_path, "Output JSON (stdout if omitted)");
    report->add_option("--tol", tol);
    report->add_option("--max-degree", max_degree);
    report->add_option("--lowest", lowest, "Levels and clusters listed per sector");
    report->add_flag("--timings", timings, "Include wall-clock timings (output no longer reproducible)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kInvalid;
    }

    try {
        kernels::configure_threads_from_env();
        if (*build)
            return cmd_build(ba);
        if (*verify)
            return cmd_verify(sys_path, tol, report_path);
        if (*spectrum)
            return cmd_spectrum(sys_path, count, csv_path, pot_path);
        if (*invariants)
            return cmd_invariants(sys_path, eps0);
        if (*classify)
            return cmd_classify(sys_path, max_degree, class_tol, window);
        if (*report)
            return cmd_report(sys_path, out_path, tol, max_degree, lowest, timings);
    } catch (const Error& e) {
        std::cerr << "z3ts: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "z3ts: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
