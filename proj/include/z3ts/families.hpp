#pragma once

#include <array>
#include <optional>

#include "z3ts/algebra.hpp"
#include "z3ts/analytic.hpp"

namespace z3ts {

struct N1HarmonicParams {
    double alpha = 1.0;
    double beta = 0.0;
    double a0 = 0.0;
    double f = 1.0;
    double g = 1.0;
    double mass = 0.5;
};

/// Harmonic N=1 system with D = f (d/dx - alpha x - beta).
/// Sectors 1 and 2 live on the cells, sector 3 on the nodes; D maps nodes to
/// cells, so D D^T has an exact one-dimensional kernel.
TSSystem build_n1_harmonic(const N1HarmonicParams& p, const GridSpec& grid);

struct N1Params {
    double mass = 0.5;
    std::array<double, 3> f{};
    std::array<GridFunction, 3> g;
    /// Analytic g_i'; the grid stencil is used where absent.
    std::array<std::optional<GridFunction>, 3> dg;
    std::array<double, 3> a0{};
    std::array<double, 3> a1{};
    /// Pointwise agreement required between the two determinations of each V_i,
    /// relative to max(1, max |V_i|).
    double consistency_tol = 1e-8;
};

struct N1GeneralResult {
    TSSystem system;
    /// Per sector: residual of a0 + a1 V_i = g^2 - f g' and of a0 + a1 V_{i+1} = g^2 + f g'.
    std::array<std::pair<GridFunction, GridFunction>, 3> condition_residuals;
};

/// General N=1 solution on the node layout with D_i = f_i P + g_i and H_i
/// assembled from the recovered potentials.
N1GeneralResult build_n1_general(const N1Params& p, const GridSpec& grid);

struct N2ChainParams {
    double mass = 0.5;
    double f1 = 1.0;
    double f2 = 1.0;
    double a0 = 0.0;
    GridFunction g1;
    GridFunction g2;
    std::optional<GridFunction> dg1;
    std::optional<GridFunction> dg2;
};

struct N2ChainResult {
    TSSystem system;
    /// The four pointwise conditions on (g1, g2, V1, V2, V3).
    std::array<GridFunction, 4> condition_residuals;
    /// Fourth condition with g1' in place of g2'.
    GridFunction literal_fourth;
    /// ||H2 - D2^T D2 / (2 m f2^2)||_F relative to the larger of the two norms (and 1)
    double factorization_mismatch = 0.0;
};

/// N=2 chain with D3 = (D2 D1)^T. Sector 1 on cells, sector 2 on nodes,
/// sector 3 on cells.
N2ChainResult build_n2_chain(const N2ChainParams& p, const GridSpec& grid);

struct N2Conditions {
    std::array<GridFunction, 4> residuals;
    GridFunction literal_fourth;
};

N2Conditions condition_residuals_n2(const N2ChainParams& p, const GridFunction& V1, const GridFunction& V2,
                                    const GridFunction& V3);

/// Second-order central differences, one-sided at the ends.
GridFunction stencil_derivative(const GridFunction& g);

GridFunction sample(const GridSpec& grid, const AnalyticFunction& fn);
GridFunction sample_derivative(const GridSpec& grid, const AnalyticFunction& fn);

} // namespace z3ts
