#include "z3ts/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "z3ts/analytic.hpp"
#include "z3ts/error.hpp"

namespace z3ts {

Eigensystem eigendecompose(const OperatorMatrix& H, bool vectors)
{
    if (!H.square())
        fail(ErrorKind::DimensionMismatch, "eigendecomposition of a non-square operator");
    if (asymmetry(H.entries) > 1e-10)
        fail(ErrorKind::Asymmetry, "operator is not symmetric (relative defect " + format_double(asymmetry(H.entries)) + ")");
    auto out = kernels::eigensolve_batch({&H.entries}, vectors, kernels::Exec::Serial);
    return Eigensystem{std::move(out[0].values), std::move(out[0].vectors)};
}

Eigensystem eigendecompose(const SectorHamiltonian& H, bool vectors)
{
    return eigendecompose(H.matrix, vectors);
}

std::array<Eigensystem, 3> eigendecompose_sectors(const TSSystem& sys, bool vectors, kernels::Exec exec)
{
    std::vector<const Eigen::MatrixXd*> mats;
    for (int i = 0; i < 3; ++i) {
        const auto& m = sys.H[i].matrix;
        if (!m.square())
            fail(ErrorKind::DimensionMismatch, "sector Hamiltonian is not square");
        if (asymmetry(m.entries) > 1e-10)
            fail(ErrorKind::Asymmetry, "sector " + std::to_string(i + 1) + " Hamiltonian is not symmetric");
        mats.push_back(&m.entries);
    }
    auto pairs = kernels::eigensolve_batch(mats, vectors, exec);
    std::array<Eigensystem, 3> out;
    for (int i = 0; i < 3; ++i)
        out[i] = Eigensystem{std::move(pairs[i].values), std::move(pairs[i].vectors)};
    return out;
}

double DegeneracyCluster::spread() const
{
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& sector : members)
        for (const auto& [idx, v] : sector) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    return hi >= lo ? hi - lo : 0.0;
}

std::vector<DegeneracyCluster> cluster_degeneracies(const std::array<std::vector<double>, 3>& eigs, double tol_rel,
                                                    double floor, int max_levels,
                                                    const std::array<std::vector<int>, 3>* indices)
{
    if (!(tol_rel >= 0.0) || !(floor >= 0.0))
        fail(ErrorKind::InvalidArgument, "clustering tolerance and floor must be nonnegative");
    if (max_levels < 0)
        fail(ErrorKind::InvalidArgument, "max_levels must be nonnegative");

    std::vector<std::tuple<double, int, int>> items;
    double cutoff = INFINITY;
    for (int s = 0; s < 3; ++s) {
        const auto& e = eigs[s];
        if (!std::is_sorted(e.begin(), e.end()))
            fail(ErrorKind::InvalidArgument, "sector eigenvalues must be ascending");
        if (indices && (*indices)[s].size() != e.size())
            fail(ErrorKind::DimensionMismatch, "index list does not match eigenvalue list");
        size_t take = e.size();
        if (max_levels > 0) {
            take = std::min(e.size(), static_cast<size_t>(2 * max_levels));
            if (!e.empty())
                cutoff = std::min(cutoff, e[std::min(e.size(), static_cast<size_t>(max_levels)) - 1]);
        }
        for (size_t k = 0; k < take; ++k)
            items.emplace_back(e[k], s, indices ? (*indices)[s][k] : static_cast<int>(k));
    }
    std::sort(items.begin(), items.end());

    struct Acc {
        DegeneracyCluster c;
        double sum = 0.0;
        double lowest = INFINITY;
        int count = 0;
    };
    std::vector<Acc> acc;
    for (const auto& [v, s, idx] : items) {
        const double window = tol_rel * std::max(std::abs(v), floor);
        Acc* best = nullptr;
        for (auto& a : acc) {
            if (a.c.multiplicities[s] > 0)
                continue;
            const double d = std::abs(v - a.c.energy);
            if (d > window)
                continue;
            if (!best || d < std::abs(v - best->c.energy) ||
                (d == std::abs(v - best->c.energy) && a.c.energy < best->c.energy))
                best = &a;
        }
        if (!best) {
            acc.emplace_back();
            best = &acc.back();
        }
        best->c.members[s].emplace_back(idx, v);
        best->c.multiplicities[s] += 1;
        best->sum += v;
        best->lowest = std::min(best->lowest, v);
        best->count += 1;
        best->c.energy = best->sum / best->count;
    }

    // A cluster belongs to the window when its lowest member does; judging by the
    // mean would drop a level whose partner in another sector sits just above the cut.
    std::vector<DegeneracyCluster> out;
    for (auto& a : acc)
        if (max_levels == 0 || a.lowest <= cutoff)
            out.push_back(std::move(a.c));
    std::stable_sort(out.begin(), out.end(),
                     [](const DegeneracyCluster& a, const DegeneracyCluster& b) { return a.energy < b.energy; });
    return out;
}

ZeroModeCount count_zero_modes(const Eigen::VectorXd& eigs, double eps0)
{
    ZeroModeCount out;
    for (Eigen::Index k = 0; k < eigs.size(); ++k) {
        if (std::abs(eigs[k]) <= eps0)
            ++out.count;
        else if (eigs[k] < -eps0)
            out.negative = true;
    }
    return out;
}

double wall_weight(const Eigen::VectorXd& v, const Space& space, const WallFilter& wall)
{
    if (v.size() != space.dim())
        fail(ErrorKind::DimensionMismatch, "vector does not match its space");
    const double L = space.grid.half_width;
    const double inner = L * (1.0 - 2.0 * wall.layer_fraction);
    double total = 0.0, outer = 0.0;
    for (int i = 0; i < space.dim(); ++i) {
        const double w = v[i] * v[i];
        total += w;
        if (std::abs(space.coord(i)) > inner)
            outer += w;
    }
    return total > 0.0 ? outer / total : 0.0;
}

FilteredZeroModes count_zero_modes(const Eigensystem& es, const Space& space, double eps0, const WallFilter& wall)
{
    if (es.vectors.cols() != es.values.size())
        fail(ErrorKind::UnsupportedInput, "wall filtering needs eigenvectors");
    FilteredZeroModes out;
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
        const double lam = es.values[k];
        if (lam < -eps0)
            out.negative = true;
        if (std::abs(lam) > eps0)
            continue;
        if (wall_weight(es.vectors.col(k), space, wall) > wall.max_weight) {
            ++out.boundary;
            out.boundary_indices.push_back(static_cast<int>(k));
        } else {
            ++out.count;
            out.zero_indices.push_back(static_cast<int>(k));
        }
    }
    return out;
}

int delta(const std::array<int, 3>& n0, const std::array<int, 3>& mult, int i, int j)
{
    return mult[i] * n0[j] - mult[j] * n0[i];
}

std::array<int, 3> topological_invariants(const std::array<int, 3>& n0, const std::array<int, 3>& mult)
{
    for (int i = 0; i < 3; ++i)
        if (n0[i] < 0 || mult[i] < 0)
            fail(ErrorKind::InvalidArgument, "zero-mode counts and multiplicities must be nonnegative");
    return {delta(n0, mult, 0, 1), delta(n0, mult, 0, 2), delta(n0, mult, 1, 2)};
}

bool verify_uts_type(const std::vector<DegeneracyCluster>& clusters, double eps0)
{
    for (const auto& c : clusters)
        if (c.energy > eps0 && c.multiplicities != std::array<int, 3>{1, 1, 1})
            return false;
    return true;
}

ClassFit estimate_class_N(const OperatorMatrix& A, const OperatorMatrix& H, int max_degree, double tol,
                          double window_fraction)
{
    if (max_degree < 0)
        fail(ErrorKind::InvalidArgument, "max_degree must be nonnegative");
    if (!(tol >= 0.0))
        fail(ErrorKind::InvalidArgument, "tolerance must be nonnegative");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        fail(ErrorKind::InvalidArgument, "window fraction must lie in (0, 1]");
    if (!H.square() || !A.square() || !(A.rows == H.rows))
        fail(ErrorKind::DimensionMismatch, "class fit needs two square operators on one sector");
    if (asymmetry(A.entries) > 1e-8 || asymmetry(H.entries) > 1e-8)
        fail(ErrorKind::Asymmetry, "class fit needs symmetric operators");

    Eigen::MatrixXd a, h;
    if (window_fraction < 1.0) {
        const Eigensystem es = eigendecompose(H, true);
        const Eigen::Index n = es.values.size();
        const Eigen::Index m = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(window_fraction * n)));
        const Eigen::MatrixXd W = es.vectors.leftCols(m);
        a = W.transpose() * A.entries * W;
        a = (0.5 * (a + a.transpose())).eval();
        h = es.values.head(m).asDiagonal();
    } else {
        a = A.entries;
        h = H.entries;
    }

    const Eigen::Index dim = a.rows();
    const Eigen::Index nn = dim * dim;
    Eigen::MatrixXd X(nn, max_degree + 1);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(dim, dim);
    for (int d = 0; d <= max_degree; ++d) {
        if (d > 0)
            power = (power * h).eval();
        X.col(d) = Eigen::Map<const Eigen::VectorXd>(power.data(), nn);
    }
    const Eigen::Map<const Eigen::VectorXd> y(a.data(), nn);
    const double ynorm = y.norm();

    ClassFit out;
    out.fit_dim = static_cast<int>(dim);
    for (int d = 0; d <= max_degree; ++d) {
        Eigen::MatrixXd Xd = X.leftCols(d + 1);
        Eigen::VectorXd scl(d + 1);
        for (int k = 0; k <= d; ++k) {
            const double s = Xd.col(k).norm();
            scl[k] = s > 0.0 ? s : 1.0;
            Xd.col(k) /= scl[k];
        }
        Eigen::VectorXd c = Xd.colPivHouseholderQr().solve(y);
        const double r = (Xd * c - y).norm() / (ynorm > 0.0 ? ynorm : 1.0);
        c = c.cwiseQuotient(scl);
        out.residual_by_degree.push_back(r);
        out.coefficients_by_degree.emplace_back(c.data(), c.data() + c.size());
    }

    for (int d = 0; d <= max_degree; ++d)
        if (out.residual_by_degree[d] <= tol) {
            out.N = d;
            break;
        }
    int pick = 0;
    if (out.N) {
        pick = *out.N;
    } else {
        for (int d = 1; d <= max_degree; ++d)
            if (out.residual_by_degree[d] < out.residual_by_degree[pick])
                pick = d;
    }
    out.coefficients = out.coefficients_by_degree[pick];
    out.residual = out.residual_by_degree[pick];
    return out;
}

SpectralOptions default_spectral_options(const TSSystem& sys)
{
    SpectralOptions o;
    if (sys.family.residual_class) {
        const auto d = sys.dims();
        const int dmin = std::min({d[0], d[1], d[2]});
        o.cluster_tol = 10.0 * sys.family.grid.spacing;
        o.cluster_floor = 1.0;
        o.max_levels = std::max(1, static_cast<int>(std::ceil(0.05 * dmin)));
    }
    return o;
}

double default_eps0(const std::array<Eigen::VectorXd, 3>& eigs)
{
    double lmax = 0.0;
    for (const auto& e : eigs)
        if (e.size())
            lmax = std::max(lmax, e.cwiseAbs().maxCoeff());
    return std::max(1e-6 * lmax, 1e-8);
}

SpectralReport analyze_spectrum(const TSSystem& sys, const SpectralOptions& opts)
{
    return analyze_spectrum(sys, opts, eigendecompose_sectors(sys, opts.filter_walls));
}

SpectralReport analyze_spectrum(const TSSystem& sys, const SpectralOptions& opts, const std::array<Eigensystem, 3>& es)
{
    SpectralReport rep;
    for (int i = 0; i < 3; ++i)
        rep.eigenvalues[i] = es[i].values;
    rep.eps0 = opts.eps0 ? *opts.eps0 : default_eps0(rep.eigenvalues);
    if (!(rep.eps0 >= 0.0))
        fail(ErrorKind::InvalidArgument, "eps0 must be nonnegative");

    const auto spaces = sys.sectors();
    std::array<std::vector<double>, 3> lists;
    std::array<std::vector<int>, 3> idx;
    for (int i = 0; i < 3; ++i) {
        std::vector<int> drop;
        if (opts.filter_walls) {
            const FilteredZeroModes z = count_zero_modes(es[i], spaces[i], rep.eps0, opts.wall);
            rep.n0[i] = z.count;
            rep.boundary_modes[i] = z.boundary;
            rep.nonnegative = rep.nonnegative && !z.negative;
            drop = z.boundary_indices;
        } else {
            const ZeroModeCount z = count_zero_modes(es[i].values, rep.eps0);
            rep.n0[i] = z.count;
            rep.nonnegative = rep.nonnegative && !z.negative;
        }
        for (Eigen::Index k = 0; k < es[i].values.size(); ++k) {
            if (std::find(drop.begin(), drop.end(), static_cast<int>(k)) != drop.end())
                continue;
            lists[i].push_back(es[i].values[k]);
            idx[i].push_back(static_cast<int>(k));
        }
    }
    rep.clusters = cluster_degeneracies(lists, opts.cluster_tol, opts.cluster_floor, opts.max_levels, &idx);
    rep.delta = topological_invariants(rep.n0, opts.multiplicity);
    rep.uts_pattern_ok = verify_uts_type(rep.clusters, rep.eps0);
    return rep;
}

ClassReport classify_system(const TSSystem& sys, const ClassOptions& opts)
{
    validate_system(sys);
    ClassReport rep;
    const bool rc = sys.family.residual_class;
    rep.tolerance = opts.tol ? *opts.tol : (rc ? 2.0 * sys.family.grid.spacing : 1e-8);
    rep.window_fraction = opts.window_fraction ? *opts.window_fraction : (rc ? 0.05 : 1.0);

    bool all_fit = true;
    int top = 0;
    for (int i = 0; i < 3; ++i) {
        const int p = (i + 2) % 3;
        const std::string si = std::to_string(i + 1), sp = std::to_string(p + 1);
        const OperatorMatrix& H = sys.H[i].matrix;
        const std::pair<std::string, OperatorMatrix> ops[] = {
            {"D" + si + "^T D" + si, compose(adjoint(sys.D[i]), sys.D[i])},
            {"D" + sp + " D" + sp + "^T", compose(sys.D[p], adjoint(sys.D[p]))},
            {"M" + si, sys.M[i]},
        };
        for (const auto& [name, A] : ops) {
            OperatorMatrix As = A;
            As.entries = (0.5 * (A.entries + A.entries.transpose())).eval();
            ClassEvidence ev{name, i + 1, estimate_class_N(As, H, opts.max_degree, rep.tolerance, rep.window_fraction)};
            if (ev.fit.N)
                top = std::max(top, *ev.fit.N);
            else
                all_fit = false;
            if (i == 2 && name == "D3^T D3")
                rep.primary = ev;
            rep.fits.push_back(std::move(ev));
        }
    }
    if (all_fit)
        rep.N = top;
    return rep;
}

} // namespace z3ts
