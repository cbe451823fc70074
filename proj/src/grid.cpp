#include "z3ts/grid.hpp"

#include <cmath>
#include <string>

#include "z3ts/error.hpp"

namespace z3ts {

GridSpec make_grid(double half_width, int points)
{
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        fail(ErrorKind::InvalidGrid, "half width must be positive, got " + std::to_string(half_width));
    if (points < 8)
        fail(ErrorKind::InvalidGrid, "need at least 8 grid points, got " + std::to_string(points));
    GridSpec g;
    g.half_width = half_width;
    g.points = points;
    g.spacing = 2.0 * half_width / (points + 1);
    return g;
}

Eigen::VectorXd Space::coords() const
{
    Eigen::VectorXd x(dim());
    for (int i = 0; i < dim(); ++i)
        x[i] = coord(i);
    return x;
}

Space node_space(const GridSpec& grid) { return Space{grid, Layout::Nodes}; }
Space cell_space(const GridSpec& grid) { return Space{grid, Layout::Cells}; }

const char* to_string(Layout layout)
{
    return layout == Layout::Nodes ? "nodes" : "cells";
}

GridFunction GridFunction::sample(const GridSpec& grid, const std::function<double(double)>& fn)
{
    Eigen::VectorXd v(grid.points);
    for (int k = 0; k < grid.points; ++k)
        v[k] = fn(grid.node(k));
    return make_function(grid, std::move(v));
}

GridFunction GridFunction::constant(const GridSpec& grid, double c)
{
    return make_function(grid, Eigen::VectorXd::Constant(grid.points, c));
}

GridFunction make_function(const GridSpec& grid, Eigen::VectorXd values)
{
    if (values.size() != grid.points)
        fail(ErrorKind::GridMismatch, "function has " + std::to_string(values.size()) +
                                          " samples for a grid of " + std::to_string(grid.points));
    if (!values.allFinite())
        fail(ErrorKind::InvalidArgument, "function samples must be finite");
    return GridFunction{grid, std::move(values)};
}

OperatorMatrix make_operator(const Space& rows, const Space& cols, Eigen::MatrixXd entries)
{
    if (!(rows.grid == cols.grid))
        fail(ErrorKind::GridMismatch, "row and column spaces live on different grids");
    if (entries.rows() != rows.dim() || entries.cols() != cols.dim())
        fail(ErrorKind::DimensionMismatch, "matrix is " + std::to_string(entries.rows()) + "x" +
                                               std::to_string(entries.cols()) + ", spaces need " +
                                               std::to_string(rows.dim()) + "x" + std::to_string(cols.dim()));
    if (!entries.allFinite())
        fail(ErrorKind::InvalidArgument, "operator entries must be finite");
    return OperatorMatrix{rows, cols, std::move(entries)};
}

OperatorMatrix identity_operator(const Space& space)
{
    return OperatorMatrix{space, space, Eigen::MatrixXd::Identity(space.dim(), space.dim())};
}

OperatorMatrix zero_operator(const Space& rows, const Space& cols)
{
    return OperatorMatrix{rows, cols, Eigen::MatrixXd::Zero(rows.dim(), cols.dim())};
}

OperatorMatrix forward_difference(const GridSpec& grid)
{
    const int n = grid.points;
    const double ih = 1.0 / grid.spacing;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        P(k, k) = -ih;
        if (k + 1 < n)
            P(k, k + 1) = ih;
    }
    return OperatorMatrix{node_space(grid), node_space(grid), std::move(P)};
}

OperatorMatrix backward_difference(const GridSpec& grid)
{
    const int n = grid.points;
    const double ih = 1.0 / grid.spacing;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        B(k, k) = ih;
        if (k > 0)
            B(k, k - 1) = -ih;
    }
    return OperatorMatrix{node_space(grid), node_space(grid), std::move(B)};
}

OperatorMatrix staggered_difference(const GridSpec& grid)
{
    const int n = grid.points;
    const double ih = 1.0 / grid.spacing;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + 1, n);
    for (int j = 0; j <= n; ++j) {
        if (j < n)
            G(j, j) = ih;
        if (j > 0)
            G(j, j - 1) = -ih;
    }
    return OperatorMatrix{cell_space(grid), node_space(grid), std::move(G)};
}

OperatorMatrix dirichlet_laplacian(const GridSpec& grid)
{
    const int n = grid.points;
    const double ih2 = 1.0 / (grid.spacing * grid.spacing);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        A(k, k) = 2.0 * ih2;
        if (k > 0)
            A(k, k - 1) = -ih2;
        if (k + 1 < n)
            A(k, k + 1) = -ih2;
    }
    return OperatorMatrix{node_space(grid), node_space(grid), std::move(A)};
}

OperatorMatrix multiplication_operator(const GridFunction& f)
{
    Eigen::MatrixXd m = f.values.asDiagonal();
    return OperatorMatrix{node_space(f.grid), node_space(f.grid), std::move(m)};
}

} // namespace z3ts
