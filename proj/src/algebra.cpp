#include "z3ts/algebra.hpp"

#include <cmath>
#include <string>

#include "z3ts/error.hpp"

namespace z3ts {

using kernels::SplitMatrix;

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

int nxt(int i) { return (i + 1) % 3; }
int prv(int i) { return (i + 2) % 3; }

SplitMatrix real_block(const Eigen::MatrixXd& m) { return SplitMatrix{m, std::nullopt}; }

bool absent(const OperatorMatrix& m) { return m.entries.size() == 0; }

// Runs the three per-sector evaluations side by side.
template <class Fn>
void for_each_sector(Fn fn)
{
    if (kernels::default_exec() == kernels::Exec::Serial) {
        for (int i = 0; i < 3; ++i)
            fn(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (int i = 0; i < 3; ++i)
        fn(i);
}

struct Pair {
    Eigen::MatrixXd lhs;
    Eigen::MatrixXd rhs;
};

double residual_of(const std::vector<Pair>& pairs)
{
    std::vector<std::pair<const Eigen::MatrixXd*, const Eigen::MatrixXd*>> refs;
    for (const auto& p : pairs)
        refs.emplace_back(&p.lhs, &p.rhs);
    return relative_residual(refs);
}

} // namespace

std::complex<double> grading_phase()
{
    return std::polar(1.0, 2.0 * 3.14159265358979323846 / 3.0);
}

void validate_system(const TSSystem& sys)
{
    const auto sp = sys.sectors();
    for (int i = 0; i < 3; ++i) {
        const std::string tag = "sector " + std::to_string(i + 1);
        if (absent(sys.H[i].matrix) || !sys.H[i].matrix.square())
            fail(ErrorKind::IncompleteSystem, tag + " Hamiltonian missing or not square");
        if (absent(sys.D[i]))
            fail(ErrorKind::IncompleteSystem, "D" + std::to_string(i + 1) + " missing");
        if (absent(sys.M[i]))
            fail(ErrorKind::IncompleteSystem, "M" + std::to_string(i + 1) + " missing");
    }
    for (int i = 0; i < 3; ++i) {
        const std::string dn = "D" + std::to_string(i + 1);
        if (!(sys.D[i].cols == sp[i]) || !(sys.D[i].rows == sp[nxt(i)]))
            fail(ErrorKind::DimensionMismatch, dn + " does not map sector " + std::to_string(i + 1) + " to sector " +
                                                   std::to_string(nxt(i) + 1));
        if (sys.D[i].entries.cwiseAbs().maxCoeff() == 0.0)
            fail(ErrorKind::IncompleteSystem, dn + " vanishes identically; all intertwiners must be nonzero");
        if (!(sys.M[i].rows == sp[i]) || !(sys.M[i].cols == sp[i]))
            fail(ErrorKind::DimensionMismatch, "M" + std::to_string(i + 1) + " does not act on its sector");
        if (sys.K && (!((*sys.K)[i].rows == sp[i]) || !((*sys.K)[i].cols == sp[i])))
            fail(ErrorKind::DimensionMismatch, "K" + std::to_string(i + 1) + " does not act on its sector");
    }
}

Eigen::MatrixXcd BlockOperator::dense() const
{
    const int total = dims[0] + dims[1] + dims[2];
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(total, total);
    int r0 = 0;
    for (int i = 0; i < 3; ++i) {
        int c0 = 0;
        for (int j = 0; j < 3; ++j) {
            if (const auto& b = block(i, j))
                out.block(r0, c0, dims[i], dims[j]) = b->dense();
            c0 += dims[j];
        }
        r0 += dims[i];
    }
    return out;
}

BlockOperator block_diagonal(const std::array<Eigen::MatrixXd, 3>& diag)
{
    BlockOperator out;
    for (int i = 0; i < 3; ++i) {
        out.dims[i] = static_cast<int>(diag[i].rows());
        out.block(i, i) = real_block(diag[i]);
    }
    return out;
}

BlockOperator multiply(const BlockOperator& a, const BlockOperator& b, kernels::Exec exec)
{
    if (a.dims != b.dims)
        fail(ErrorKind::DimensionMismatch, "block operators over different sector dimensions");
    return BlockOperator{kernels::block_multiply(a.blocks, b.blocks, a.dims, exec), a.dims};
}

BlockOperator add_scaled(const BlockOperator& a, const BlockOperator& b, std::complex<double> s)
{
    if (a.dims != b.dims)
        fail(ErrorKind::DimensionMismatch, "block operators over different sector dimensions");
    BlockOperator out{{}, a.dims};
    for (size_t k = 0; k < 9; ++k) {
        const auto& x = a.blocks[k];
        const auto& y = b.blocks[k];
        if (x && y)
            out.blocks[k] = kernels::add_scaled(*x, *y, s);
        else if (x)
            out.blocks[k] = *x;
        else if (y)
            out.blocks[k] = kernels::scaled(*y, s);
    }
    return out;
}

BlockOperator scaled(const BlockOperator& a, std::complex<double> s)
{
    BlockOperator out{{}, a.dims};
    for (size_t k = 0; k < 9; ++k)
        if (a.blocks[k])
            out.blocks[k] = kernels::scaled(*a.blocks[k], s);
    return out;
}

BlockOperator adjoint(const BlockOperator& a)
{
    BlockOperator out{{}, a.dims};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (const auto& b = a.block(i, j))
                out.block(j, i) = kernels::adjoint(*b);
    return out;
}

double frobenius_norm(const BlockOperator& a)
{
    double s = 0.0;
    for (const auto& b : a.blocks)
        if (b)
            s += kernels::frobenius_sq(*b, kernels::default_exec());
    return std::sqrt(s);
}

BlockOperator assemble_supercharge(const TSSystem& sys)
{
    const auto sp = sys.sectors();
    BlockOperator q{{}, sys.dims()};
    for (int i = 0; i < 3; ++i) {
        if (!(sys.D[i].cols == sp[i]) || !(sys.D[i].rows == sp[nxt(i)]))
            fail(ErrorKind::DimensionMismatch, "D" + std::to_string(i + 1) + " does not conform to the sectors");
        q.block(nxt(i), i) = real_block(sys.D[i].entries);
    }
    return q;
}

BlockOperator assemble_hamiltonian(const TSSystem& sys)
{
    return block_diagonal({sys.H[0].matrix.entries, sys.H[1].matrix.entries, sys.H[2].matrix.entries});
}

BlockOperator assemble_central(const TSSystem& sys)
{
    return block_diagonal({0.5 * sys.M[0].entries, 0.5 * sys.M[1].entries, 0.5 * sys.M[2].entries});
}

BlockOperator assemble_k(const TSSystem& sys)
{
    if (sys.K)
        return block_diagonal({(*sys.K)[0].entries, (*sys.K)[1].entries, (*sys.K)[2].entries});
    // diagonal blocks of Q^3: D3 D2 D1, D1 D3 D2, D2 D1 D3
    std::array<Eigen::MatrixXd, 3> diag;
    for (int i = 0; i < 3; ++i) {
        const auto& a = sys.D[prv(i)].entries;
        const auto& b = sys.D[nxt(i)].entries;
        const auto& c = sys.D[i].entries;
        diag[i] = a * (b * c);
    }
    return block_diagonal(diag);
}

BlockOperator grading_operator(const std::array<int, 3>& dims, std::complex<double> q)
{
    BlockOperator out{{}, dims};
    std::complex<double> phase = 1.0;
    for (int i = 0; i < 3; ++i) {
        Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dims[i], dims[i]);
        out.block(i, i) = kernels::scaled(real_block(id), phase);
        phase *= q;
    }
    return out;
}

BlockOperator q_commutator(const BlockOperator& a, const BlockOperator& b, std::complex<double> q)
{
    return add_scaled(multiply(a, b), multiply(b, a), -q);
}

std::pair<BlockOperator, BlockOperator> hermitian_components(const BlockOperator& q)
{
    const BlockOperator qd = adjoint(q);
    BlockOperator q1 = scaled(add_scaled(q, qd, 1.0), 1.0 / kSqrt2);
    BlockOperator q2 = scaled(add_scaled(q, qd, -1.0), std::complex<double>(0.0, -1.0 / kSqrt2));
    return {std::move(q1), std::move(q2)};
}

double hermiticity_defect(const BlockOperator& a)
{
    return relative_residual(a, adjoint(a));
}

double relative_residual(const std::vector<std::pair<const Eigen::MatrixXd*, const Eigen::MatrixXd*>>& pairs)
{
    const auto exec = kernels::default_exec();
    double num = 0.0, l2 = 0.0, r2 = 0.0;
    for (const auto& [l, r] : pairs) {
        num += kernels::frobenius_diff_sq(*l, *r, exec);
        l2 += kernels::frobenius_dot(*l, *l, exec);
        r2 += kernels::frobenius_dot(*r, *r, exec);
    }
    return std::sqrt(num) / std::max({std::sqrt(l2), std::sqrt(r2), 1.0});
}

double relative_residual(const BlockOperator& lhs, const BlockOperator& rhs)
{
    if (lhs.dims != rhs.dims)
        fail(ErrorKind::DimensionMismatch, "residual between different block layouts");
    const auto exec = kernels::default_exec();
    double num = 0.0, l2 = 0.0, r2 = 0.0;
    for (size_t k = 0; k < 9; ++k) {
        const auto& l = lhs.blocks[k];
        const auto& r = rhs.blocks[k];
        if (l)
            l2 += kernels::frobenius_sq(*l, exec);
        if (r)
            r2 += kernels::frobenius_sq(*r, exec);
        if (l && r)
            num += kernels::frobenius_diff_sq(*l, *r, exec);
        else if (l)
            num += kernels::frobenius_sq(*l, exec);
        else if (r)
            num += kernels::frobenius_sq(*r, exec);
    }
    return std::sqrt(num) / std::max({std::sqrt(l2), std::sqrt(r2), 1.0});
}

bool AlgebraReport::all_pass() const
{
    for (const auto& [k, ok] : pass)
        if (!ok)
            return false;
    return true;
}

const std::vector<std::string>& relation_keys()
{
    static const std::vector<std::string> keys = {"a1", "a2", "a4", "a5", "a6", "6-1", "6", "7", "10", "11"};
    return keys;
}

namespace {

// a4 and a5 side by side; both need Q, M and K.
std::pair<double, double> cubic_residuals(const TSSystem& sys)
{
    const BlockOperator q = assemble_supercharge(sys);
    const BlockOperator m = assemble_central(sys);
    const BlockOperator k = assemble_k(sys);
    const BlockOperator kd = adjoint(k);
    const BlockOperator qd = adjoint(q);

    // Q1 = (Q + Q^dag)/sqrt2. Q2 = -i A with A = (Q - Q^dag)/sqrt2 real, so
    // Q2^3 = i A^3 and M Q2 = -i M A; multiplying by i is exact.
    const BlockOperator q1 = scaled(add_scaled(q, qd, 1.0), 1.0 / kSqrt2);
    const BlockOperator a = scaled(add_scaled(q, qd, -1.0), 1.0 / kSqrt2);

    const BlockOperator q1c = multiply(multiply(q1, q1), q1);
    const BlockOperator rhs4 =
        add_scaled(scaled(add_scaled(k, kd, 1.0), 1.0 / (2.0 * kSqrt2)), multiply(m, q1), -1.0);

    const std::complex<double> I(0.0, 1.0);
    const BlockOperator q2c = scaled(multiply(multiply(a, a), a), I);
    const BlockOperator rhs5 =
        add_scaled(scaled(add_scaled(k, kd, -1.0), I / (2.0 * kSqrt2)), multiply(m, a), I);

    return {relative_residual(q1c, rhs4), relative_residual(q2c, rhs5)};
}

} // namespace

AlgebraReport verify_algebra(const TSSystem& sys, double tol)
{
    if (!(tol >= 0.0) || !std::isfinite(tol))
        fail(ErrorKind::InvalidArgument, "tolerance must be a nonnegative number");
    validate_system(sys);

    AlgebraReport rep;
    rep.tolerance = tol;
    auto& res = rep.residuals;

    const BlockOperator q = assemble_supercharge(sys);
    const BlockOperator h = assemble_hamiltonian(sys);
    res["a1"] = relative_residual(multiply(q, h), multiply(h, q));

    const BlockOperator q3 = multiply(multiply(q, q), q);
    res["a2"] = relative_residual(q3, assemble_k(sys));

    const auto [r4, r5] = cubic_residuals(sys);
    res["a4"] = r4;
    res["a5"] = r5;

    const std::complex<double> qp = sys.q;
    const BlockOperator tau = grading_operator(sys.dims(), qp);
    res["a6"] = relative_residual(multiply(tau, q), scaled(multiply(q, tau), qp));

    const auto& D = sys.D;
    auto H = [&](int i) -> const Eigen::MatrixXd& { return sys.H[i].matrix.entries; };
    auto M = [&](int i) -> const Eigen::MatrixXd& { return sys.M[i].entries; };

    std::array<std::vector<Pair>, 3> p61, p6, p7, p10, p11;
    for_each_sector([&](int i) {
        const Eigen::MatrixXd& d = D[i].entries;
        const Eigen::MatrixXd& dn = D[nxt(i)].entries;
        const Eigen::MatrixXd& dp = D[prv(i)].entries;
        p61[i].push_back({H(nxt(i)) * d, d * H(i)});
        p6[i].push_back({M(nxt(i)) * d, d * M(i)});

        const Eigen::MatrixXd dtd = d.transpose() * d;
        const Eigen::MatrixXd ddt = d * d.transpose();
        const Eigen::MatrixXd dpdpt = dp * dp.transpose();
        const Eigen::MatrixXd dntdn = dn.transpose() * dn;
        p7[i].push_back({d * M(i), -(d * (dtd + dpdpt) + dntdn * d)});
        p10[i].push_back({dntdn * ddt, ddt * dntdn});
        p11[i].push_back({M(nxt(i)) * ddt, ddt * M(nxt(i))});
        p11[i].push_back({M(i) * dtd, dtd * M(i)});
    });
    auto flat = [](std::array<std::vector<Pair>, 3>& parts) {
        std::vector<Pair> all;
        for (auto& v : parts)
            for (auto& p : v)
                all.push_back(std::move(p));
        return all;
    };
    res["6-1"] = residual_of(flat(p61));
    res["6"] = residual_of(flat(p6));
    res["7"] = residual_of(flat(p7));
    res["10"] = residual_of(flat(p10));
    res["11"] = residual_of(flat(p11));

    if (sys.K) {
        const BlockOperator k = assemble_k(sys);
        res["a1-K"] = relative_residual(multiply(k, h), multiply(h, k));
    }
    for (const auto& [key, value] : sys.family.diagnostics)
        res[key] = value;

    for (const auto& [key, value] : res)
        rep.pass[key] = std::isfinite(value) && value <= tol;
    return rep;
}

A5Redundancy check_a5_redundancy(const TSSystem& sys, double tol)
{
    if (!(tol >= 0.0) || !std::isfinite(tol))
        fail(ErrorKind::InvalidArgument, "tolerance must be a nonnegative number");
    validate_system(sys);
    const auto [r4, r5] = cubic_residuals(sys);
    return A5Redundancy{r4, r5, r5 <= 10.0 * r4 + tol};
}

} // namespace z3ts
