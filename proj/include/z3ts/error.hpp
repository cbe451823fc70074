#pragma once

#include <stdexcept>
#include <string>

namespace z3ts {

enum class ErrorKind {
    InvalidGrid,
    GridMismatch,
    InvalidMass,
    InvalidScale,
    UnsupportedInput,
    DimensionMismatch,
    IncompleteSystem,
    InvalidFamily,
    UnderdeterminedPotential,
    InconsistentFamily,
    Asymmetry,
    InvalidArgument,
    UnknownFamily,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

} // namespace z3ts
