#pragma once

#include <array>
#include <optional>
#include <vector>

#include "z3ts/algebra.hpp"

namespace z3ts {

struct Eigensystem {
    Eigen::VectorXd values;
    /// Orthonormal eigenvectors as columns; empty when not requested.
    Eigen::MatrixXd vectors;
};

/// Symmetric eigendecomposition, ascending. Rejects inputs asymmetric beyond 1e-10 relative.
Eigensystem eigendecompose(const OperatorMatrix& H, bool vectors = true);
Eigensystem eigendecompose(const SectorHamiltonian& H, bool vectors = true);
std::array<Eigensystem, 3> eigendecompose_sectors(const TSSystem& sys, bool vectors = true,
                                                   kernels::Exec exec = kernels::default_exec());

struct DegeneracyCluster {
    double energy = 0.0;
    /// per sector: (index, eigenvalue)
    std::array<std::vector<std::pair<int, double>>, 3> members;
    std::array<int, 3> multiplicities{};

    double spread() const;
};

/// Greedy lowest-first merge of the union of sector eigenvalues. A value joins the
/// nearest cluster within tol_rel * max(|E|, floor) that has no member from its own
/// sector (ties go to the lower-energy cluster); otherwise it opens a cluster.
/// With max_levels = K > 0 only the lowest 2K levels of each sector are merged and
/// only clusters at or below the lowest sector's K-th level are returned.
/// `indices` optionally gives the original index of each value.
std::vector<DegeneracyCluster> cluster_degeneracies(const std::array<std::vector<double>, 3>& eigs, double tol_rel,
                                                    double floor = 1.0, int max_levels = 0,
                                                    const std::array<std::vector<int>, 3>* indices = nullptr);

struct ZeroModeCount {
    int count = 0;
    /// eigenvalues below -eps0 present
    bool negative = false;
};

ZeroModeCount count_zero_modes(const Eigen::VectorXd& eigs, double eps0);

struct WallFilter {
    /// width of each wall layer as a fraction of the box width 2L
    double layer_fraction = 0.1;
    /// modes with more weight than this in the layers are boundary modes
    double max_weight = 0.5;
};

struct FilteredZeroModes {
    int count = 0;
    int boundary = 0;
    bool negative = false;
    std::vector<int> zero_indices;
    std::vector<int> boundary_indices;
};

/// Fraction of |v|^2 in the two wall layers of `space`.
double wall_weight(const Eigen::VectorXd& v, const Space& space, const WallFilter& wall);

/// Zero-mode count that sets aside wall-localized kernel vectors.
FilteredZeroModes count_zero_modes(const Eigensystem& es, const Space& space, double eps0, const WallFilter& wall);

/// (Delta_12, Delta_13, Delta_23), Delta_ij = m_i n_j - m_j n_i
std::array<int, 3> topological_invariants(const std::array<int, 3>& n0, const std::array<int, 3>& mult = {1, 1, 1});
int delta(const std::array<int, 3>& n0, const std::array<int, 3>& mult, int i, int j);

bool verify_uts_type(const std::vector<DegeneracyCluster>& clusters, double eps0);

struct ClassFit {
    /// smallest qualifying degree; empty if none up to max_degree
    std::optional<int> N;
    /// coefficients of the selected fit (or of the best fit when N is empty)
    std::vector<double> coefficients;
    double residual = 0.0;
    std::vector<double> residual_by_degree;
    std::vector<std::vector<double>> coefficients_by_degree;
    /// dimension of the subspace the fit was taken on
    int fit_dim = 0;
};

/// Least-squares fit of A against I, H, ..., H^d in the Frobenius pairing.
/// window_fraction < 1 restricts both operators to the span of the lowest
/// eigenvectors of H before fitting.
ClassFit estimate_class_N(const OperatorMatrix& A, const OperatorMatrix& H, int max_degree, double tol,
                          double window_fraction = 1.0);

struct SpectralOptions {
    std::optional<double> eps0;
    double cluster_tol = 1e-8;
    double cluster_floor = 1.0;
    int max_levels = 0;
    bool filter_walls = true;
    WallFilter wall;
    std::array<int, 3> multiplicity{1, 1, 1};
};

/// Exact families: 1e-8 relative over the whole spectrum. Residual-class
/// families: 10 h over the lowest 5% of levels.
SpectralOptions default_spectral_options(const TSSystem& sys);

struct SpectralReport {
    std::array<Eigen::VectorXd, 3> eigenvalues;
    std::vector<DegeneracyCluster> clusters;
    std::array<int, 3> n0{};
    std::array<int, 3> boundary_modes{};
    std::array<int, 3> delta{};
    bool uts_pattern_ok = false;
    bool nonnegative = true;
    double eps0 = 0.0;
};

/// Default eps0 = max(1e-6 * lambda_max, 1e-8) over all sectors.
double default_eps0(const std::array<Eigen::VectorXd, 3>& eigs);

SpectralReport analyze_spectrum(const TSSystem& sys, const SpectralOptions& opts);
SpectralReport analyze_spectrum(const TSSystem& sys, const SpectralOptions& opts,
                                const std::array<Eigensystem, 3>& es);

struct ClassEvidence {
    std::string operator_name;
    int sector = 0;
    ClassFit fit;
};

struct ClassReport {
    std::optional<int> N;
    /// D3^T D3 against H3
    ClassEvidence primary;
    std::vector<ClassEvidence> fits;
    double tolerance = 0.0;
    double window_fraction = 1.0;
};

struct ClassOptions {
    int max_degree = 4;
    std::optional<double> tol;
    std::optional<double> window_fraction;
};

/// Fits D_i^T D_i, D_{i-1} D_{i-1}^T and M_i against H_i in every sector. N is the
/// largest selected degree, empty if any operator fails to fit.
ClassReport classify_system(const TSSystem& sys, const ClassOptions& opts);

} // namespace z3ts
