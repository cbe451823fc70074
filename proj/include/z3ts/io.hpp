#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "z3ts/families.hpp"
#include "z3ts/spectral.hpp"

namespace z3ts::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;
const char* tool_version();

/// Persisted description of a system: family, parameters and grid. Matrices are
/// always rebuilt from it.
struct SystemFile {
    int format_version = kFormatVersion;
    std::string family;
    json parameters = json::object();
    double box = 0.0;
    int points = 0;
};

json to_json(const SystemFile& f);
SystemFile system_file_from_json(const json& j);

std::string read_text(const std::string& path);
/// Writes to a temporary file in the same directory, then renames it into place.
void write_text_atomic(const std::string& path, const std::string& text);

SystemFile read_system_file(const std::string& path);
void write_system_file(const std::string& path, const SystemFile& f);

/// Fills in defaults and canonical function specs; throws on unknown family or bad values.
SystemFile canonicalize(const SystemFile& f);

struct BuiltSystem {
    TSSystem system;
    /// sup-norms of the family's pointwise defining conditions
    std::map<std::string, double> condition_sup;
};

BuiltSystem build_system(const SystemFile& f);

/// NaN/Inf become the string "invalid" and set `invalid`.
json number(double v, bool& invalid);

json residuals_json(const AlgebraReport& rep, bool& invalid);
json verify_json(const SystemFile& f, const BuiltSystem& b, const AlgebraReport& rep, const A5Redundancy& a5);
json invariants_json(const SpectralReport& rep);
json class_json(const ClassReport& rep);
json spectral_json(const SpectralReport& rep, int lowest);
json grid_json(const GridSpec& g);

/// `sector,index,eigenvalue` rows for the lowest `count` eigenvalues per sector.
std::string spectrum_csv(const std::array<Eigen::VectorXd, 3>& eigs, int count);
/// `x,V1,V2,V3` at the nodes.
std::string potential_csv(const TSSystem& sys);

/// Compact single-line dump with a trailing newline.
std::string dump_line(const json& j);
std::string dump_pretty(const json& j);

std::string format17(double v);

} // namespace z3ts::io
