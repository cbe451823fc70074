#include "z3ts/schrodinger.hpp"

#include <cmath>
#include <string>

#include "z3ts/error.hpp"

namespace z3ts {

const char* to_string(Stencil s)
{
    switch (s) {
    case Stencil::Forward: return "forward";
    case Stencil::Backward: return "backward";
    case Stencil::Widen: return "widen";
    case Stencil::Narrow: return "narrow";
    }
    return "unknown";
}

FirstOrderOperator build_first_order(double f, const GridFunction& g, Stencil stencil)
{
    if (!std::isfinite(f))
        fail(ErrorKind::InvalidArgument, "leading coefficient must be finite");
    const GridSpec& grid = g.grid;
    const int n = grid.points;
    const double ih = 1.0 / grid.spacing;
    FirstOrderOperator d{f, g, stencil, {}};
    Eigen::MatrixXd m;
    switch (stencil) {
    case Stencil::Forward:
        m = f * forward_difference(grid).entries;
        m.diagonal() += g.values;
        d.matrix = make_operator(node_space(grid), node_space(grid), std::move(m));
        break;
    case Stencil::Backward:
        m = f * backward_difference(grid).entries;
        m.diagonal() += g.values;
        d.matrix = make_operator(node_space(grid), node_space(grid), std::move(m));
        break;
    case Stencil::Widen:
        m = Eigen::MatrixXd::Zero(n + 1, n);
        for (int j = 0; j <= n; ++j) {
            if (j < n)
                m(j, j) = f * ih;
            if (j > 0)
                m(j, j - 1) = -f * ih + g.values[j - 1];
        }
        d.matrix = make_operator(cell_space(grid), node_space(grid), std::move(m));
        break;
    case Stencil::Narrow:
        m = Eigen::MatrixXd::Zero(n, n + 1);
        for (int k = 0; k < n; ++k) {
            m(k, k) = -f * ih;
            m(k, k + 1) = f * ih + g.values[k];
        }
        d.matrix = make_operator(node_space(grid), cell_space(grid), std::move(m));
        break;
    }
    return d;
}

FirstOrderOperator build_first_order(const GridSpec& grid, double f, const GridFunction& g, Stencil stencil)
{
    if (!(g.grid == grid))
        fail(ErrorKind::GridMismatch, "coefficient function sampled on a different grid");
    return build_first_order(f, g, stencil);
}

FirstOrderOperator adjoint(const FirstOrderOperator& d)
{
    static constexpr Stencil pair[] = {Stencil::Backward, Stencil::Forward, Stencil::Narrow, Stencil::Widen};
    return build_first_order(-d.f, d.g, pair[static_cast<int>(d.stencil)]);
}

OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b)
{
    if (!(a.cols.grid == b.rows.grid))
        fail(ErrorKind::GridMismatch, "composing operators on different grids");
    if (!(a.cols == b.rows))
        fail(ErrorKind::DimensionMismatch, std::string("composing ") + to_string(a.cols.layout) + " input with " +
                                               to_string(b.rows.layout) + " output");
    OperatorMatrix out{a.rows, b.cols, {}};
    out.entries.noalias() = a.entries * b.entries;
    return out;
}

OperatorMatrix adjoint(const OperatorMatrix& a)
{
    return OperatorMatrix{a.cols, a.rows, a.entries.transpose()};
}

OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b, double beta)
{
    if (!(a.rows.grid == b.rows.grid))
        fail(ErrorKind::GridMismatch, "adding operators on different grids");
    if (!(a.rows == b.rows) || !(a.cols == b.cols))
        fail(ErrorKind::DimensionMismatch, "adding operators between different spaces");
    return OperatorMatrix{a.rows, a.cols, a.entries + beta * b.entries};
}

OperatorMatrix scale(const OperatorMatrix& a, double s)
{
    return OperatorMatrix{a.rows, a.cols, s * a.entries};
}

SectorHamiltonian hamiltonian_from_potential(double mass, const GridFunction& V)
{
    if (!(mass > 0.0) || !std::isfinite(mass))
        fail(ErrorKind::InvalidMass, "mass must be positive, got " + std::to_string(mass));
    OperatorMatrix lap = dirichlet_laplacian(V.grid);
    Eigen::MatrixXd m = (1.0 / (2.0 * mass)) * lap.entries;
    m.diagonal() += V.values;
    SectorHamiltonian h;
    h.mass = mass;
    h.potential = V;
    h.matrix = OperatorMatrix{lap.rows, lap.cols, std::move(m)};
    return h;
}

SectorHamiltonian factorized_hamiltonian(const OperatorMatrix& D, FactorOrder order, double scale_, double shift,
                                         double mass)
{
    if (!(scale_ > 0.0) || !std::isfinite(scale_))
        fail(ErrorKind::InvalidScale, "scale must be positive, got " + std::to_string(scale_));
    if (!std::isfinite(shift))
        fail(ErrorKind::InvalidArgument, "shift must be finite");
    OperatorMatrix prod = order == FactorOrder::DdagD ? compose(adjoint(D), D) : compose(D, adjoint(D));
    Eigen::MatrixXd m = scale_ * prod.entries;
    m = (0.5 * (m + m.transpose())).eval();
    m.diagonal().array() += shift;
    SectorHamiltonian h;
    h.mass = mass;
    h.matrix = OperatorMatrix{prod.rows, prod.cols, std::move(m)};
    h.lower_bound = shift;
    return h;
}

SectorHamiltonian factorized_hamiltonian(const FirstOrderOperator& D, FactorOrder order, double scale_, double shift,
                                         double mass)
{
    return factorized_hamiltonian(D.matrix, order, scale_, shift, mass);
}

OperatorMatrix poly_in_H(const std::vector<double>& coeffs, const OperatorMatrix& H)
{
    if (coeffs.empty())
        fail(ErrorKind::InvalidArgument, "polynomial needs at least one coefficient");
    if (!H.square())
        fail(ErrorKind::DimensionMismatch, "polynomial of a non-square operator");
    const Eigen::Index n = H.entries.rows();
    Eigen::MatrixXd out = coeffs[0] * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (size_t k = 1; k < coeffs.size(); ++k) {
        power = (power * H.entries).eval();
        if (coeffs[k] != 0.0)
            out += coeffs[k] * power;
    }
    return OperatorMatrix{H.rows, H.cols, std::move(out)};
}

OperatorMatrix poly_in_H(const std::vector<double>& coeffs, const SectorHamiltonian& H)
{
    return poly_in_H(coeffs, H.matrix);
}

RootResidual first_order_root_residual(const SectorHamiltonian& H, double f, double g, double a, double b, double c)
{
    if (!H.potential)
        fail(ErrorKind::UnsupportedInput, "root residual needs a Hamiltonian built from a potential");
    const GridFunction& V = *H.potential;
    Eigen::VectorXd r = (-V.values.array() + (a * g * g + b * g + c)).matrix();
    RootResidual out{GridFunction{V.grid, std::move(r)}, std::abs(a * f * f + 1.0), std::abs(2.0 * a * f * g + b * f)};
    return out;
}

double asymmetry(const Eigen::MatrixXd& a)
{
    if (a.rows() != a.cols())
        return INFINITY;
    const double scale_ = a.cwiseAbs().maxCoeff();
    if (scale_ == 0.0)
        return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale_;
}

} // namespace z3ts
