#pragma once

#include <optional>
#include <vector>

#include "z3ts/grid.hpp"

namespace z3ts {

// Stencils for D = f d/dx + g.
//   Forward:  nodes -> nodes, f P + diag(g)
//   Backward: nodes -> nodes, f B + diag(g); adjoint of Forward(-f, g)
//   Widen:    nodes -> cells, f (psi_j - psi_{j-1})/h + g(x_{j-1}) psi_{j-1}
//   Narrow:   cells -> nodes, f (phi_{k+1} - phi_k)/h + g(x_k) phi_{k+1}; adjoint of Widen(-f, g)
enum class Stencil { Forward, Backward, Widen, Narrow };

const char* to_string(Stencil s);

struct FirstOrderOperator {
    double f = 0.0;
    GridFunction g;
    Stencil stencil = Stencil::Forward;
    OperatorMatrix matrix;
};

FirstOrderOperator build_first_order(double f, const GridFunction& g, Stencil stencil = Stencil::Forward);
/// Same, but checks that g lives on `grid`.
FirstOrderOperator build_first_order(const GridSpec& grid, double f, const GridFunction& g,
                                     Stencil stencil = Stencil::Forward);
/// The transpose, expressed again as a first-order operator on the paired stencil.
FirstOrderOperator adjoint(const FirstOrderOperator& d);

OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix adjoint(const OperatorMatrix& a);
OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b, double beta = 1.0);
OperatorMatrix scale(const OperatorMatrix& a, double s);

struct SectorHamiltonian {
    double mass = 0.5;
    std::optional<GridFunction> potential;
    OperatorMatrix matrix;
    /// Declared spectral lower bound for factorized Hamiltonians.
    std::optional<double> lower_bound;
};

/// -(1/2m) d^2/dx^2 + V with the Dirichlet three-point Laplacian.
SectorHamiltonian hamiltonian_from_potential(double mass, const GridFunction& V);

enum class FactorOrder { DdagD, DDdag };

/// scale * (D^T D or D D^T) + shift * I, symmetrized.
SectorHamiltonian factorized_hamiltonian(const OperatorMatrix& D, FactorOrder order, double scale, double shift,
                                         double mass = 0.5);
SectorHamiltonian factorized_hamiltonian(const FirstOrderOperator& D, FactorOrder order, double scale, double shift,
                                         double mass = 0.5);

/// sum_n c_n H^n by iterated multiplication.
OperatorMatrix poly_in_H(const std::vector<double>& coeffs, const OperatorMatrix& H);
OperatorMatrix poly_in_H(const std::vector<double>& coeffs, const SectorHamiltonian& H);

struct RootResidual {
    /// a g^2 + b g + c - V(x)
    GridFunction residual;
    /// |a f^2 + 1|
    double leading = 0.0;
    /// |2 a f g + b f|
    double cross = 0.0;
};

/// Residuals of the conditions a constant first-order root of H would have to meet.
RootResidual first_order_root_residual(const SectorHamiltonian& H, double f, double g, double a, double b, double c);

/// max |A - A^T| / max(max |A|, tiny)
double asymmetry(const Eigen::MatrixXd& a);

} // namespace z3ts
