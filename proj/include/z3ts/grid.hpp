#pragma once

#include <functional>

#include <Eigen/Dense>

namespace z3ts {

/// Uniform grid of `points` interior nodes on [-L, L]; wavefunctions vanish at +-L.
struct GridSpec {
    double half_width = 0.0;
    int points = 0;
    double spacing = 0.0;

    /// x_k = -L + (k+1) h, k = 0..n-1
    double node(int k) const { return -half_width + (k + 1) * spacing; }
    /// midpoints y_j = -L + (j+1/2) h, j = 0..n
    double cell(int j) const { return -half_width + (j + 0.5) * spacing; }

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(double half_width, int points);

// Sector functions live either on the n nodes or on the n+1 cell midpoints
// between them (the two outermost cells touch the walls).
enum class Layout { Nodes, Cells };

struct Space {
    GridSpec grid;
    Layout layout = Layout::Nodes;

    int dim() const { return layout == Layout::Nodes ? grid.points : grid.points + 1; }
    double coord(int i) const { return layout == Layout::Nodes ? grid.node(i) : grid.cell(i); }
    Eigen::VectorXd coords() const;

    bool operator==(const Space&) const = default;
};

Space node_space(const GridSpec& grid);
Space cell_space(const GridSpec& grid);
const char* to_string(Layout layout);

/// Real samples at the grid nodes.
struct GridFunction {
    GridSpec grid;
    Eigen::VectorXd values;

    static GridFunction sample(const GridSpec& grid, const std::function<double(double)>& fn);
    static GridFunction constant(const GridSpec& grid, double c);
};

GridFunction make_function(const GridSpec& grid, Eigen::VectorXd values);

/// Dense real matrix mapping functions on `cols` to functions on `rows`.
struct OperatorMatrix {
    Space rows;
    Space cols;
    Eigen::MatrixXd entries;

    bool square() const { return rows == cols; }
};

OperatorMatrix make_operator(const Space& rows, const Space& cols, Eigen::MatrixXd entries);
OperatorMatrix identity_operator(const Space& space);
OperatorMatrix zero_operator(const Space& rows, const Space& cols);

/// P[k][k] = -1/h, P[k][k+1] = 1/h on the nodes.
OperatorMatrix forward_difference(const GridSpec& grid);
/// B[k][k] = 1/h, B[k][k-1] = -1/h on the nodes; transpose(P) == -B.
OperatorMatrix backward_difference(const GridSpec& grid);
/// G: nodes -> cells, (G psi)_j = (psi_j - psi_{j-1}) / h with zeros at the walls.
/// G^T G is the Dirichlet three-point Laplacian on the nodes.
OperatorMatrix staggered_difference(const GridSpec& grid);
OperatorMatrix dirichlet_laplacian(const GridSpec& grid);

OperatorMatrix multiplication_operator(const GridFunction& f);

} // namespace z3ts
