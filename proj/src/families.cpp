#include "z3ts/families.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "z3ts/error.hpp"

namespace z3ts {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        fail(ErrorKind::InvalidFamily, what);
}

bool finite_all(std::initializer_list<double> vs)
{
    for (double v : vs)
        if (!std::isfinite(v))
            return false;
    return true;
}

void check_on_grid(const GridFunction& fn, const GridSpec& grid, const std::string& name)
{
    if (!(fn.grid == grid))
        fail(ErrorKind::GridMismatch, name + " is sampled on a different grid");
}

GridFunction from_values(const GridSpec& grid, Eigen::VectorXd v)
{
    return make_function(grid, std::move(v));
}

std::string num(double v) { return format_double(v); }

} // namespace

GridFunction sample(const GridSpec& grid, const AnalyticFunction& fn)
{
    return GridFunction::sample(grid, [&](double x) { return fn.value(x); });
}

GridFunction sample_derivative(const GridSpec& grid, const AnalyticFunction& fn)
{
    return GridFunction::sample(grid, [&](double x) { return fn.derivative(x); });
}

GridFunction stencil_derivative(const GridFunction& g)
{
    const int n = g.grid.points;
    const double h = g.grid.spacing;
    const auto& v = g.values;
    Eigen::VectorXd d(n);
    for (int k = 1; k + 1 < n; ++k)
        d[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    return GridFunction{g.grid, std::move(d)};
}

TSSystem build_n1_harmonic(const N1HarmonicParams& p, const GridSpec& grid)
{
    require(finite_all({p.alpha, p.beta, p.a0, p.f, p.g, p.mass}), "harmonic parameters must be finite");
    require(p.alpha > 0.0, "alpha must be positive for a normalizable zero mode, got " + num(p.alpha));
    require(p.a0 <= 0.0, "a0 must be nonpositive for a nonnegative spectrum, got " + num(p.a0));
    require(p.f != 0.0, "f must be nonzero");
    require(p.g != 0.0, "g must be nonzero");
    require(p.mass > 0.0, "mass must be positive, got " + num(p.mass));

    const double m = p.mass, f = p.f, g = p.g, a0 = p.a0;
    const GridFunction w = GridFunction::sample(grid, [&](double x) { return -f * (p.alpha * x + p.beta); });
    const FirstOrderOperator D = build_first_order(f, w, Stencil::Widen);
    const Space cells = cell_space(grid);

    const double scale_ = 1.0 / (2.0 * m * f * f);
    TSSystem sys;
    sys.D[0] = scale(identity_operator(cells), g);
    sys.D[1] = adjoint(D.matrix);
    sys.D[2] = D.matrix;
    sys.H[0] = factorized_hamiltonian(D, FactorOrder::DDdag, scale_, -a0, m);
    sys.H[1] = sys.H[0];
    sys.H[2] = factorized_hamiltonian(D, FactorOrder::DdagD, scale_, -a0, m);

    const double c = 2.0 * m * f * f;
    std::array<OperatorMatrix, 3> K;
    for (int i = 0; i < 3; ++i) {
        sys.M[i] = poly_in_H({-g * g - 2.0 * c * a0, -2.0 * c}, sys.H[i]);
        K[i] = poly_in_H({c * g * a0, c * g}, sys.H[i]);
    }
    sys.K = std::move(K);

    auto pot = [&](double sign) {
        return GridFunction::sample(grid, [&, sign](double x) {
            const double u = p.alpha * x + p.beta;
            return (u * u + sign * p.alpha) / (2.0 * m) - a0;
        });
    };
    sys.potentials = {pot(-1.0), pot(-1.0), pot(1.0)};

    sys.family.name = "n1-harmonic";
    sys.family.grid = grid;
    sys.family.residual_class = false;
    sys.family.parameters = {{"alpha", num(p.alpha)}, {"beta", num(p.beta)}, {"a0", num(a0)},
                             {"f", num(f)},           {"g", num(g)},         {"mass", num(m)}};
    return sys;
}

N1GeneralResult build_n1_general(const N1Params& p, const GridSpec& grid)
{
    require(std::isfinite(p.mass) && p.mass > 0.0, "mass must be positive");
    require(std::isfinite(p.consistency_tol) && p.consistency_tol >= 0.0, "consistency tolerance must be nonnegative");
    const double m = p.mass;

    std::array<GridFunction, 3> dg;
    std::vector<std::string> warnings;
    bool all_order_zero = true;
    for (int i = 0; i < 3; ++i) {
        const std::string tag = std::to_string(i + 1);
        check_on_grid(p.g[i], grid, "g" + tag);
        require(finite_all({p.f[i], p.a0[i], p.a1[i]}), "sector " + tag + " coefficients must be finite");
        require(std::abs(p.f[i] * p.f[i] - p.a1[i] / (2.0 * m)) <= 1e-12,
                "f" + tag + "^2 must equal a1/(2m) for sector " + tag);
        if (p.dg[i]) {
            check_on_grid(*p.dg[i], grid, "g" + tag + "'");
            dg[i] = *p.dg[i];
        } else {
            dg[i] = stencil_derivative(p.g[i]);
        }
        if (p.f[i] != 0.0)
            all_order_zero = false;
    }

    // own[i]: V_i from sector i; next[i]: V_{i+1} from sector i.
    std::array<std::optional<Eigen::VectorXd>, 3> own, next;
    for (int i = 0; i < 3; ++i) {
        const auto& g = p.g[i].values;
        const Eigen::ArrayXd g2 = g.array().square();
        const Eigen::ArrayXd fdg = p.f[i] * dg[i].values.array();
        if (p.a1[i] != 0.0) {
            own[i] = ((g2 - fdg - p.a0[i]) / p.a1[i]).matrix();
            next[i] = ((g2 + fdg - p.a0[i]) / p.a1[i]).matrix();
            continue;
        }
        const double spread = g.maxCoeff() - g.minCoeff();
        if (spread > 1e-14 * std::max(1.0, g.cwiseAbs().maxCoeff()))
            fail(ErrorKind::UnderdeterminedPotential,
                 "sector " + std::to_string(i + 1) + " has a1 = 0 and a nonconstant g; its potential is not determined");
        const double gap = (g2 - p.a0[i]).abs().maxCoeff();
        if (gap > p.consistency_tol * std::max(1.0, std::abs(p.a0[i])))
            fail(ErrorKind::InconsistentFamily,
                 "sector " + std::to_string(i + 1) + " is order zero but a0 differs from g^2");
    }

    std::array<GridFunction, 3> V;
    for (int i = 0; i < 3; ++i) {
        const int prev = (i + 2) % 3;
        const auto& a = own[i];
        const auto& b = next[prev];
        if (a && b) {
            const double scale_ = std::max(1.0, a->cwiseAbs().maxCoeff());
            const double gap = (*a - *b).cwiseAbs().maxCoeff();
            if (gap > p.consistency_tol * scale_)
                fail(ErrorKind::InconsistentFamily,
                     "V" + std::to_string(i + 1) + " from sector " + std::to_string(i + 1) + " and from sector " +
                         std::to_string(prev + 1) + " differ by " + num(gap));
            V[i] = from_values(grid, *a);
        } else if (a) {
            V[i] = from_values(grid, *a);
        } else if (b) {
            V[i] = from_values(grid, *b);
        } else if (all_order_zero) {
            V[i] = GridFunction::constant(grid, 0.0);
        } else {
            fail(ErrorKind::UnderdeterminedPotential, "no sector determines V" + std::to_string(i + 1));
        }
    }
    if (all_order_zero)
        warnings.push_back("trivial family: all D_i are order zero (class N=0); potentials set to zero");

    N1GeneralResult out;
    TSSystem& sys = out.system;
    const double s0 = p.a0[0] + p.a0[1] + p.a0[2];
    const double s1 = p.a1[0] + p.a1[1] + p.a1[2];
    for (int i = 0; i < 3; ++i) {
        sys.D[i] = build_first_order(p.f[i], p.g[i], Stencil::Forward).matrix;
        sys.H[i] = hamiltonian_from_potential(m, V[i]);
        sys.M[i] = poly_in_H({-s0, -s1}, sys.H[i]);
        sys.potentials[i] = V[i];
    }
    for (int i = 0; i < 3; ++i) {
        const int nx = (i + 1) % 3;
        const auto& g = p.g[i].values.array();
        const Eigen::ArrayXd fdg = p.f[i] * dg[i].values.array();
        Eigen::VectorXd r26 = (p.a0[i] + p.a1[i] * V[i].values.array() - (g.square() - fdg)).matrix();
        Eigen::VectorXd r27 = (p.a0[i] + p.a1[i] * V[nx].values.array() - (g.square() + fdg)).matrix();
        out.condition_residuals[i] = {GridFunction{grid, std::move(r26)}, GridFunction{grid, std::move(r27)}};
    }

    sys.family.name = "n1-general";
    sys.family.grid = grid;
    sys.family.residual_class = true;
    sys.family.warnings = std::move(warnings);
    sys.family.parameters["mass"] = num(m);
    for (int i = 0; i < 3; ++i) {
        const std::string t = std::to_string(i + 1);
        sys.family.parameters["f" + t] = num(p.f[i]);
        sys.family.parameters["a0_" + t] = num(p.a0[i]);
        sys.family.parameters["a1_" + t] = num(p.a1[i]);
    }
    return out;
}

N2Conditions condition_residuals_n2(const N2ChainParams& p, const GridFunction& V1, const GridFunction& V2,
                                    const GridFunction& V3)
{
    const GridSpec& grid = p.g1.grid;
    check_on_grid(p.g2, grid, "g2");
    check_on_grid(V1, grid, "V1");
    check_on_grid(V2, grid, "V2");
    check_on_grid(V3, grid, "V3");
    const GridFunction dg1 = p.dg1 ? *p.dg1 : stencil_derivative(p.g1);
    const GridFunction dg2 = p.dg2 ? *p.dg2 : stencil_derivative(p.g2);
    check_on_grid(dg1, grid, "g1'");
    check_on_grid(dg2, grid, "g2'");

    const double m = p.mass;
    const double c1 = 2.0 * m * p.f1 * p.f1;
    const double c2 = 2.0 * m * p.f2 * p.f2;
    const Eigen::ArrayXd g1 = p.g1.values.array(), g2 = p.g2.values.array();
    const Eigen::ArrayXd d1 = dg1.values.array(), d2 = dg2.values.array();

    auto gf = [&](Eigen::ArrayXd a) { return GridFunction{grid, a.matrix()}; };
    N2Conditions out{{gf(g1.square() - p.f1 * d1 - c1 * V1.values.array() - p.a0),
                      gf(g1.square() + p.f1 * d1 - c1 * V2.values.array() - p.a0),
                      gf(g2.square() - p.f2 * d2 - c2 * V2.values.array()),
                      gf(g2.square() + p.f2 * d2 - c2 * V3.values.array())},
                     gf(g2.square() + p.f2 * d1 - c2 * V3.values.array())};
    return out;
}

N2ChainResult build_n2_chain(const N2ChainParams& p, const GridSpec& grid)
{
    require(finite_all({p.mass, p.f1, p.f2, p.a0}), "chain parameters must be finite");
    require(p.mass > 0.0, "mass must be positive, got " + num(p.mass));
    require(p.f1 != 0.0, "f1 must be nonzero");
    require(p.f2 != 0.0, "f2 must be nonzero");
    check_on_grid(p.g1, grid, "g1");
    check_on_grid(p.g2, grid, "g2");

    const double m = p.mass, f1 = p.f1, f2 = p.f2, a0 = p.a0;
    const double c1 = 2.0 * m * f1 * f1;
    const double c2 = 2.0 * m * f2 * f2;

    const FirstOrderOperator D1 = build_first_order(f1, p.g1, Stencil::Narrow);
    const FirstOrderOperator D2 = build_first_order(f2, p.g2, Stencil::Widen);

    N2ChainResult out;
    TSSystem& sys = out.system;
    sys.D[0] = D1.matrix;
    sys.D[1] = D2.matrix;
    sys.D[2] = adjoint(compose(D2.matrix, D1.matrix));
    sys.H[0] = factorized_hamiltonian(D1, FactorOrder::DdagD, 1.0 / c1, -a0 / c1, m);
    sys.H[1] = factorized_hamiltonian(D1, FactorOrder::DDdag, 1.0 / c1, -a0 / c1, m);
    sys.H[2] = factorized_hamiltonian(D2, FactorOrder::DDdag, 1.0 / c2, 0.0, m);

    std::array<OperatorMatrix, 3> K;
    for (int i = 0; i < 3; ++i) {
        sys.M[i] = poly_in_H({-a0, -2.0 * m * (f1 * f1 + f2 * f2 * (1.0 + a0)), -c1 * c2}, sys.H[i]);
        K[i] = poly_in_H({0.0, c2 * a0, c1 * c2}, sys.H[i]);
    }
    sys.K = std::move(K);

    const GridFunction dg1 = p.dg1 ? *p.dg1 : stencil_derivative(p.g1);
    const GridFunction dg2 = p.dg2 ? *p.dg2 : stencil_derivative(p.g2);
    const Eigen::ArrayXd g1 = p.g1.values.array(), g2 = p.g2.values.array();
    const Eigen::ArrayXd d1 = dg1.values.array(), d2 = dg2.values.array();
    const GridFunction V1{grid, ((g1.square() - f1 * d1 - a0) / c1).matrix()};
    const GridFunction V2{grid, ((g1.square() + f1 * d1 - a0) / c1).matrix()};
    const GridFunction V3{grid, ((g2.square() + f2 * d2) / c2).matrix()};
    sys.potentials = {V1, V2, V3};

    N2Conditions cond = condition_residuals_n2(p, V1, V2, V3);
    out.condition_residuals = std::move(cond.residuals);
    out.literal_fourth = std::move(cond.literal_fourth);

    const Eigen::MatrixXd h2_alt = (D2.matrix.entries.transpose() * D2.matrix.entries) / c2;
    const Eigen::MatrixXd& h2 = sys.H[1].matrix.entries;
    out.factorization_mismatch = (h2 - h2_alt).norm() / std::max({h2.norm(), h2_alt.norm(), 1.0});

    sys.family.name = "n2-chain";
    sys.family.grid = grid;
    sys.family.residual_class = true;
    sys.family.diagnostics["n2-factorization-mismatch"] = out.factorization_mismatch;
    if (a0 > 0.0)
        sys.family.warnings.push_back("a0 > 0: sector 1 spectrum is not bounded below by zero");
    sys.family.parameters = {{"mass", num(m)}, {"f1", num(f1)}, {"f2", num(f2)}, {"a0", num(a0)}};
    return out;
}

} // namespace z3ts
