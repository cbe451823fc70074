#pragma once

#include <string>
#include <vector>

namespace z3ts {

/// Named closed-form functions with exact derivatives.
///   constant:c             c
///   linear:a,b             a + b x
///   tanh[:a[,b]]           a tanh(b x)             (a = b = 1 by default)
///   sech-squared[:a[,b]]   a sech^2(b x)
///   polynomial:c0,c1,...   sum c_k x^k
struct AnalyticFunction {
    enum class Kind { Constant, Linear, Tanh, SechSquared, Polynomial };

    Kind kind = Kind::Constant;
    std::vector<double> params;

    double value(double x) const;
    double derivative(double x) const;
    bool is_constant() const;
    /// Canonical text form; parse_function(spec()) reproduces the function exactly.
    std::string spec() const;
};

AnalyticFunction parse_function(const std::string& text);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

} // namespace z3ts
