#include "z3ts/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "z3ts/error.hpp"

namespace z3ts::kernels {

namespace {

#ifdef _OPENMP
Exec g_default = Exec::Parallel;
#else
Exec g_default = Exec::Serial;
#endif

// Column partial sums are combined serially so the result does not depend
// on the thread count.
template <class ColFn>
double column_sum(Eigen::Index cols, Exec exec, ColFn fn)
{
    if (exec == Exec::Serial || cols < 2) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < cols; ++j)
            s += fn(j);
        return s;
    }
    std::vector<double> part(static_cast<size_t>(cols));
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j)
        part[static_cast<size_t>(j)] = fn(j);
    double s = 0.0;
    for (double p : part)
        s += p;
    return s;
}

} // namespace

Exec default_exec() { return g_default; }
void set_default_exec(Exec exec) { g_default = exec; }

int configure_threads_from_env()
{
#ifdef _OPENMP
    if (const char* env = std::getenv("Z3TS_NUM_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1)
            fail(ErrorKind::InvalidArgument, std::string("Z3TS_NUM_THREADS must be a positive integer, got '") + env + "'");
        omp_set_num_threads(static_cast<int>(n));
    }
#endif
    return max_threads();
}

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Eigen::MatrixXcd SplitMatrix::dense() const
{
    Eigen::MatrixXcd out(re.rows(), re.cols());
    out.real() = re;
    if (im)
        out.imag() = *im;
    else
        out.imag().setZero();
    return out;
}

SplitMatrix multiply(const SplitMatrix& a, const SplitMatrix& b)
{
    if (a.cols() != b.rows())
        fail(ErrorKind::DimensionMismatch, "block product " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                               " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    SplitMatrix out;
    out.re.noalias() = a.re * b.re;
    if (a.im && b.im)
        out.re.noalias() -= (*a.im) * (*b.im);
    if (a.im || b.im) {
        Eigen::MatrixXd im = Eigen::MatrixXd::Zero(a.rows(), b.cols());
        if (b.im)
            im.noalias() += a.re * (*b.im);
        if (a.im)
            im.noalias() += (*a.im) * b.re;
        out.im = std::move(im);
    }
    return out;
}

SplitMatrix scaled(const SplitMatrix& a, std::complex<double> s)
{
    SplitMatrix out;
    out.re = s.real() * a.re;
    if (a.im)
        out.re -= s.imag() * (*a.im);
    if (s.imag() != 0.0 || a.im) {
        Eigen::MatrixXd im = s.imag() * a.re;
        if (a.im)
            im += s.real() * (*a.im);
        out.im = std::move(im);
    }
    return out;
}

SplitMatrix add_scaled(const SplitMatrix& a, const SplitMatrix& b, std::complex<double> s)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorKind::DimensionMismatch, "block sum of mismatched shapes");
    SplitMatrix sb = scaled(b, s);
    SplitMatrix out;
    out.re = a.re + sb.re;
    if (a.im && sb.im)
        out.im = *a.im + *sb.im;
    else if (a.im)
        out.im = *a.im;
    else if (sb.im)
        out.im = *sb.im;
    return out;
}

SplitMatrix adjoint(const SplitMatrix& a)
{
    SplitMatrix out;
    out.re = a.re.transpose();
    if (a.im)
        out.im = Eigen::MatrixXd(-a.im->transpose());
    return out;
}

double frobenius_sq(const SplitMatrix& a, Exec exec)
{
    double s = frobenius_dot(a.re, a.re, exec);
    if (a.im)
        s += frobenius_dot(*a.im, *a.im, exec);
    return s;
}

double frobenius_diff_sq(const SplitMatrix& a, const SplitMatrix& b, Exec exec)
{
    double s = frobenius_diff_sq(a.re, b.re, exec);
    if (a.im && b.im)
        s += frobenius_diff_sq(*a.im, *b.im, exec);
    else if (a.im)
        s += frobenius_dot(*a.im, *a.im, exec);
    else if (b.im)
        s += frobenius_dot(*b.im, *b.im, exec);
    return s;
}

BlockGrid block_multiply(const BlockGrid& a, const BlockGrid& b, const std::array<int, 3>& dims, Exec exec)
{
    BlockGrid out;
    auto task = [&](int idx) {
        const int i = idx / 3, j = idx % 3;
        std::optional<SplitMatrix> acc;
        for (int k = 0; k < 3; ++k) {
            const auto& x = a[static_cast<size_t>(i * 3 + k)];
            const auto& y = b[static_cast<size_t>(k * 3 + j)];
            if (!x || !y)
                continue;
            if (x->rows() != dims[static_cast<size_t>(i)] || y->cols() != dims[static_cast<size_t>(j)] ||
                x->cols() != dims[static_cast<size_t>(k)])
                fail(ErrorKind::DimensionMismatch, "block does not conform to sector dimensions");
            SplitMatrix p = multiply(*x, *y);
            acc = acc ? add_scaled(*acc, p, 1.0) : std::move(p);
        }
        out[static_cast<size_t>(idx)] = std::move(acc);
    };
    if (exec == Exec::Serial) {
        for (int idx = 0; idx < 9; ++idx)
            task(idx);
        return out;
    }
    // Exceptions must not escape the parallel region.
    std::array<std::string, 9> errors;
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < 9; ++idx) {
        try {
            task(idx);
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(idx)] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty())
            fail(ErrorKind::DimensionMismatch, e);
    return out;
}

double frobenius_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Exec exec)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorKind::DimensionMismatch, "frobenius pairing of mismatched shapes");
    return column_sum(a.cols(), exec, [&](Eigen::Index j) { return a.col(j).dot(b.col(j)); });
}

double frobenius_diff_sq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Exec exec)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorKind::DimensionMismatch, "frobenius difference of mismatched shapes");
    return column_sum(a.cols(), exec, [&](Eigen::Index j) { return (a.col(j) - b.col(j)).squaredNorm(); });
}

void axpy(double alpha, const Eigen::MatrixXd& x, Eigen::MatrixXd& y, Exec exec)
{
    if (x.rows() != y.rows() || x.cols() != y.cols())
        fail(ErrorKind::DimensionMismatch, "axpy of mismatched shapes");
    const Eigen::Index cols = x.cols();
    if (exec == Exec::Serial) {
        for (Eigen::Index j = 0; j < cols; ++j)
            y.col(j) += alpha * x.col(j);
        return;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j)
        y.col(j) += alpha * x.col(j);
}

std::vector<EigenPairs> eigensolve_batch(const std::vector<const Eigen::MatrixXd*>& mats, bool vectors, Exec exec)
{
    std::vector<EigenPairs> out(mats.size());
    const int count = static_cast<int>(mats.size());
    auto task = [&](int i) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            *mats[static_cast<size_t>(i)], vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("symmetric eigensolver did not converge");
        out[static_cast<size_t>(i)].values = es.eigenvalues();
        if (vectors)
            out[static_cast<size_t>(i)].vectors = es.eigenvectors();
    };
    if (exec == Exec::Serial) {
        for (int i = 0; i < count; ++i)
            task(i);
        return out;
    }
    std::vector<std::string> errors(mats.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            task(i);
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(i)] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw std::runtime_error(e);
    return out;
}

} // namespace z3ts::kernels
