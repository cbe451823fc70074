#pragma once

// Dense kernels with a serial reference and an OpenMP version of each.
// The serial path is what the tests compare against; the benchmark target
// times both.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace z3ts::kernels {

enum class Exec { Serial, Parallel };

/// Default policy for library calls. Parallel when built with OpenMP.
Exec default_exec();
void set_default_exec(Exec exec);

/// Applies Z3TS_NUM_THREADS if set. Returns the thread count in effect.
int configure_threads_from_env();
int max_threads();

/// Complex matrix kept as separate real and imaginary parts so real operands
/// stay on the real GEMM path.
struct SplitMatrix {
    Eigen::MatrixXd re;
    std::optional<Eigen::MatrixXd> im;

    Eigen::Index rows() const { return re.rows(); }
    Eigen::Index cols() const { return re.cols(); }
    bool is_real() const { return !im.has_value(); }
    Eigen::MatrixXcd dense() const;
};

SplitMatrix multiply(const SplitMatrix& a, const SplitMatrix& b);
/// a + s * b for a complex scalar s
SplitMatrix add_scaled(const SplitMatrix& a, const SplitMatrix& b, std::complex<double> s);
SplitMatrix scaled(const SplitMatrix& a, std::complex<double> s);
SplitMatrix adjoint(const SplitMatrix& a);
double frobenius_sq(const SplitMatrix& a, Exec exec);
double frobenius_diff_sq(const SplitMatrix& a, const SplitMatrix& b, Exec exec);

/// 3x3 block layout, row-major, absent blocks are zero.
using BlockGrid = std::array<std::optional<SplitMatrix>, 9>;

/// Block product; each output block is an independent task on the parallel path.
BlockGrid block_multiply(const BlockGrid& a, const BlockGrid& b, const std::array<int, 3>& dims, Exec exec);

double frobenius_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Exec exec);
double frobenius_diff_sq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Exec exec);
/// y += alpha * x
void axpy(double alpha, const Eigen::MatrixXd& x, Eigen::MatrixXd& y, Exec exec);

struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Symmetric eigensolves of independent matrices, one task per matrix.
std::vector<EigenPairs> eigensolve_batch(const std::vector<const Eigen::MatrixXd*>& mats, bool vectors, Exec exec);

} // namespace z3ts::kernels
