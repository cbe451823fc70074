#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "z3ts/kernels.hpp"
#include "z3ts/schrodinger.hpp"

namespace z3ts {

struct FamilyInfo {
    std::string name;
    /// Canonical textual parameter values, for reporting.
    std::map<std::string, std::string> parameters;
    GridSpec grid;
    /// True when sector relations hold only up to discretization error.
    bool residual_class = false;
    /// Extra family-level residuals merged into the algebra report.
    std::map<std::string, double> diagnostics;
    std::vector<std::string> warnings;
};

/// The three sectors, the cyclic intertwiners D[i]: sector i -> sector i+1 (mod 3),
/// sector Hamiltonians, the unhalved M_i, and optionally the K blocks.
struct TSSystem {
    std::array<OperatorMatrix, 3> D;
    std::array<SectorHamiltonian, 3> H;
    std::array<OperatorMatrix, 3> M;
    std::optional<std::array<OperatorMatrix, 3>> K;
    std::complex<double> q = std::polar(1.0, 2.0 * 3.14159265358979323846 / 3.0);
    FamilyInfo family;
    /// Sector potentials on the nodes, where the family defines them.
    std::array<std::optional<GridFunction>, 3> potentials;

    std::array<Space, 3> sectors() const { return {H[0].matrix.rows, H[1].matrix.rows, H[2].matrix.rows}; }
    std::array<int, 3> dims() const { return {H[0].matrix.rows.dim(), H[1].matrix.rows.dim(), H[2].matrix.rows.dim()}; }
};

std::complex<double> grading_phase();

/// Structural checks: conforming spaces, no absent or identically zero D_i.
void validate_system(const TSSystem& sys);

struct BlockOperator {
    kernels::BlockGrid blocks;
    std::array<int, 3> dims{};

    /// block (i, j) maps sector j into sector i, 0-based
    const std::optional<kernels::SplitMatrix>& block(int i, int j) const { return blocks[static_cast<size_t>(3 * i + j)]; }
    std::optional<kernels::SplitMatrix>& block(int i, int j) { return blocks[static_cast<size_t>(3 * i + j)]; }

    Eigen::MatrixXcd dense() const;
};

BlockOperator block_diagonal(const std::array<Eigen::MatrixXd, 3>& diag);
BlockOperator multiply(const BlockOperator& a, const BlockOperator& b, kernels::Exec exec = kernels::default_exec());
BlockOperator add_scaled(const BlockOperator& a, const BlockOperator& b, std::complex<double> s);
BlockOperator scaled(const BlockOperator& a, std::complex<double> s);
BlockOperator adjoint(const BlockOperator& a);
double frobenius_norm(const BlockOperator& a);

/// Q with blocks (2,1) = D1, (3,2) = D2, (1,3) = D3 (1-based block indices).
BlockOperator assemble_supercharge(const TSSystem& sys);
BlockOperator assemble_hamiltonian(const TSSystem& sys);
/// diag(M_1, M_2, M_3) / 2
BlockOperator assemble_central(const TSSystem& sys);
/// diag(K_i) if present, else the block diagonal of Q^3.
BlockOperator assemble_k(const TSSystem& sys);

/// diag(I, q I, q^2 I)
BlockOperator grading_operator(const std::array<int, 3>& dims, std::complex<double> q = grading_phase());

/// A B - q B A
BlockOperator q_commutator(const BlockOperator& a, const BlockOperator& b, std::complex<double> q);

/// Q1 = (Q + Q^dag)/sqrt2, Q2 = -i (Q - Q^dag)/sqrt2
std::pair<BlockOperator, BlockOperator> hermitian_components(const BlockOperator& q);

/// Relative error of a Hermiticity check, ||A - A^dag|| / max(||A||, 1).
double hermiticity_defect(const BlockOperator& a);

/// sqrt(sum ||L - R||^2) / max(||L||, ||R||, 1) over paired blocks.
double relative_residual(const std::vector<std::pair<const Eigen::MatrixXd*, const Eigen::MatrixXd*>>& pairs);
double relative_residual(const BlockOperator& lhs, const BlockOperator& rhs);

struct AlgebraReport {
    std::map<std::string, double> residuals;
    std::map<std::string, bool> pass;
    double tolerance = 0.0;

    bool all_pass() const;
};

/// Relation keys in report order.
const std::vector<std::string>& relation_keys();

AlgebraReport verify_algebra(const TSSystem& sys, double tol);

struct A5Redundancy {
    double residual_a4 = 0.0;
    double residual_a5 = 0.0;
    bool redundant = false;
};

A5Redundancy check_a5_redundancy(const TSSystem& sys, double tol);

} // namespace z3ts
