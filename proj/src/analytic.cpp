#include "z3ts/analytic.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "z3ts/error.hpp"

namespace z3ts {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

double parse_number(const std::string& s, const std::string& whole)
{
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && *b == '+')
        ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        fail(ErrorKind::InvalidArgument, "bad number '" + s + "' in function spec '" + whole + "'");
    return v;
}

struct KindName {
    AnalyticFunction::Kind kind;
    const char* name;
};

constexpr KindName kNames[] = {
    {AnalyticFunction::Kind::Constant, "constant"},
    {AnalyticFunction::Kind::Linear, "linear"},
    {AnalyticFunction::Kind::Tanh, "tanh"},
    {AnalyticFunction::Kind::SechSquared, "sech-squared"},
    {AnalyticFunction::Kind::Polynomial, "polynomial"},
};

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double AnalyticFunction::value(double x) const
{
    const auto& p = params;
    switch (kind) {
    case Kind::Constant: return p[0];
    case Kind::Linear: return p[0] + p[1] * x;
    case Kind::Tanh: return p[0] * std::tanh(p[1] * x);
    case Kind::SechSquared: {
        const double s = sech(p[1] * x);
        return p[0] * s * s;
    }
    case Kind::Polynomial: {
        double acc = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it)
            acc = acc * x + *it;
        return acc;
    }
    }
    return 0.0;
}

double AnalyticFunction::derivative(double x) const
{
    const auto& p = params;
    switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Linear: return p[1];
    case Kind::Tanh: {
        const double s = sech(p[1] * x);
        return p[0] * p[1] * s * s;
    }
    case Kind::SechSquared: {
        const double s = sech(p[1] * x);
        return -2.0 * p[0] * p[1] * s * s * std::tanh(p[1] * x);
    }
    case Kind::Polynomial: {
        double acc = 0.0;
        for (size_t k = p.size() - 1; k >= 1; --k)
            acc = acc * x + static_cast<double>(k) * p[k];
        return acc;
    }
    }
    return 0.0;
}

bool AnalyticFunction::is_constant() const
{
    switch (kind) {
    case Kind::Constant: return true;
    case Kind::Linear: return params[1] == 0.0;
    case Kind::Tanh:
    case Kind::SechSquared: return params[0] == 0.0 || params[1] == 0.0;
    case Kind::Polynomial:
        for (size_t k = 1; k < params.size(); ++k)
            if (params[k] != 0.0)
                return false;
        return true;
    }
    return false;
}

std::string AnalyticFunction::spec() const
{
    std::string out;
    for (const auto& kn : kNames)
        if (kn.kind == kind)
            out = kn.name;
    out += ':';
    for (size_t k = 0; k < params.size(); ++k) {
        if (k)
            out += ',';
        out += format_double(params[k]);
    }
    return out;
}

AnalyticFunction parse_function(const std::string& text)
{
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        const std::string rest = text.substr(colon + 1);
        size_t start = 0;
        while (true) {
            const auto comma = rest.find(',', start);
            args.push_back(parse_number(rest.substr(start, comma - start), text));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
    }

    AnalyticFunction fn;
    bool known = false;
    for (const auto& kn : kNames)
        if (name == kn.name) {
            fn.kind = kn.kind;
            known = true;
        }
    if (!known)
        fail(ErrorKind::InvalidArgument, "unknown function '" + name + "' (expected constant, linear, tanh, "
                                         "sech-squared or polynomial)");

    auto need = [&](size_t lo, size_t hi) {
        if (args.size() < lo || args.size() > hi)
            fail(ErrorKind::InvalidArgument, "wrong number of parameters in '" + text + "'");
    };
    switch (fn.kind) {
    case AnalyticFunction::Kind::Constant: need(1, 1); break;
    case AnalyticFunction::Kind::Linear: need(2, 2); break;
    case AnalyticFunction::Kind::Tanh:
    case AnalyticFunction::Kind::SechSquared:
        need(0, 2);
        if (args.empty())
            args.push_back(1.0);
        if (args.size() == 1)
            args.push_back(1.0);
        break;
    case AnalyticFunction::Kind::Polynomial: need(1, 64); break;
    }
    fn.params = std::move(args);
    return fn;
}

} // namespace z3ts
