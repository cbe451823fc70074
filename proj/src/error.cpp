#include "z3ts/error.hpp"

namespace z3ts {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::InvalidMass: return "invalid-mass";
    case ErrorKind::InvalidScale: return "invalid-scale";
    case ErrorKind::UnsupportedInput: return "unsupported-input";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::IncompleteSystem: return "incomplete-system";
    case ErrorKind::InvalidFamily: return "invalid-family";
    case ErrorKind::UnderdeterminedPotential: return "underdetermined-potential";
    case ErrorKind::InconsistentFamily: return "inconsistent-family";
    case ErrorKind::Asymmetry: return "asymmetry";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::UnknownFamily: return "unknown-family";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

} // namespace z3ts
