// Serial reference vs OpenMP kernels on the shapes the library actually uses.

#include <random>

#include <benchmark/benchmark.h>

#include "z3ts/families.hpp"
#include "z3ts/kernels.hpp"
#include "z3ts/spectral.hpp"

using namespace z3ts;
using kernels::Exec;

namespace {

Eigen::MatrixXd random_matrix(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            m(i, j) = u(rng);
    return m;
}

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void args(benchmark::internal::Benchmark* b)
{
    for (int n : {200, 400, 800})
        for (int par : {0, 1})
            b->Args({n, par});
    b->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
}

void BM_FrobeniusDiff(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const Eigen::MatrixXd a = random_matrix(n, 1), b = random_matrix(n, 2);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::frobenius_diff_sq(a, b, exec_of(st)));
}
BENCHMARK(BM_FrobeniusDiff)->Apply(args);

void BM_Axpy(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const Eigen::MatrixXd x = random_matrix(n, 3);
    Eigen::MatrixXd y = random_matrix(n, 4);
    for (auto _ : st) {
        kernels::axpy(1e-3, x, y, exec_of(st));
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_Axpy)->Apply(args);

void BM_BlockMultiply(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const TSSystem sys = build_n1_harmonic({}, make_grid(10.0, n));
    const BlockOperator q = assemble_supercharge(sys);
    const BlockOperator h = assemble_hamiltonian(sys);
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::block_multiply(q.blocks, h.blocks, q.dims, exec_of(st)));
}
BENCHMARK(BM_BlockMultiply)->Apply(args);

void BM_SectorEigensolve(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const TSSystem sys = build_n1_harmonic({}, make_grid(10.0, n));
    const std::vector<const Eigen::MatrixXd*> mats{&sys.H[0].matrix.entries, &sys.H[1].matrix.entries,
                                                   &sys.H[2].matrix.entries};
    for (auto _ : st)
        benchmark::DoNotOptimize(kernels::eigensolve_batch(mats, true, exec_of(st)));
}
BENCHMARK(BM_SectorEigensolve)->Apply(args);

void BM_VerifyAlgebra(benchmark::State& st)
{
    const int n = static_cast<int>(st.range(0));
    const TSSystem sys = build_n1_harmonic({}, make_grid(10.0, n));
    kernels::set_default_exec(exec_of(st));
    for (auto _ : st)
        benchmark::DoNotOptimize(verify_algebra(sys, 1e-10));
    kernels::set_default_exec(Exec::Parallel);
}
BENCHMARK(BM_VerifyAlgebra)->Args({400, 0})->Args({400, 1})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
