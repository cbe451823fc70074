#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "z3ts/error.hpp"
#include "z3ts/families.hpp"
#include "z3ts/spectral.hpp"

using namespace z3ts;

namespace {

OperatorMatrix square_op(const Eigen::MatrixXd& m)
{
    // small abstract space; make_grid would refuse fewer than 8 points
    const int n = static_cast<int>(m.rows());
    const GridSpec g{1.0, n, 2.0 / (n + 1)};
    return make_operator(node_space(g), node_space(g), m);
}

Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = u(rng);
    return 0.5 * (a + a.transpose());
}

} // namespace

TEST(Clustering, MatchesOneLevelPerSector)
{
    const std::array<std::vector<double>, 3> eigs{{{0.0, 2.0, 4.0}, {2.0 + 1e-12, 4.0}, {2.0, 4.0 - 1e-12, 6.0}}};
    const auto cs = cluster_degeneracies(eigs, 1e-8);
    ASSERT_EQ(cs.size(), 4u);
    EXPECT_EQ(cs[0].multiplicities, (std::array<int, 3>{1, 0, 0}));
    EXPECT_EQ(cs[1].multiplicities, (std::array<int, 3>{1, 1, 1}));
    EXPECT_EQ(cs[2].multiplicities, (std::array<int, 3>{1, 1, 1}));
    EXPECT_EQ(cs[3].multiplicities, (std::array<int, 3>{0, 0, 1}));
    EXPECT_NEAR(cs[1].energy, 2.0, 1e-12);
    EXPECT_LE(cs[1].spread(), 1e-12 + 1e-15);
}

TEST(Clustering, SameSectorNeverMerges)
{
    // two sector-1 levels inside one window stay apart
    const std::array<std::vector<double>, 3> eigs{{{1.0, 1.0 + 1e-10}, {}, {1.0}}};
    const auto cs = cluster_degeneracies(eigs, 1e-8);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].multiplicities, (std::array<int, 3>{1, 0, 1}));
    EXPECT_EQ(cs[1].multiplicities, (std::array<int, 3>{1, 0, 0}));
}

TEST(Clustering, JoinsNearestCluster)
{
    // 1.25 sees open clusters at 1.0 and 1.2 inside its window; the closer one wins
    const std::array<std::vector<double>, 3> eigs{{{1.0, 1.2}, {}, {1.25}}};
    const auto cs = cluster_degeneracies(eigs, 0.5);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].multiplicities, (std::array<int, 3>{1, 0, 0}));
    EXPECT_EQ(cs[1].multiplicities, (std::array<int, 3>{1, 0, 1}));
    EXPECT_DOUBLE_EQ(cs[1].energy, 0.5 * (1.2 + 1.25));
}

TEST(Clustering, WindowKeepsPartnersAtTheCut)
{
    // Sector 2 is shifted so its 2nd level sits above sector 1's 2nd; the window
    // still pairs it because 2K levels are grouped before cutting.
    const std::array<std::vector<double>, 3> eigs{{{1.0, 2.0, 3.0, 4.0}, {1.01, 2.01, 3.01, 4.01}, {1.0, 2.0, 3.0, 4.0}}};
    const auto cs = cluster_degeneracies(eigs, 0.05, 1.0, 2);
    ASSERT_EQ(cs.size(), 2u);
    for (const auto& c : cs)
        EXPECT_EQ(c.multiplicities, (std::array<int, 3>{1, 1, 1}));
}

TEST(Clustering, RejectsUnsortedInput)
{
    const std::array<std::vector<double>, 3> eigs{{{2.0, 1.0}, {}, {}}};
    EXPECT_THROW(cluster_degeneracies(eigs, 1e-8), Error);
    EXPECT_THROW(cluster_degeneracies({}, -1.0), Error);
}

TEST(Invariants, DeltaDefinition)
{
    EXPECT_EQ(topological_invariants({1, 1, 0}), (std::array<int, 3>{0, -1, -1}));
    EXPECT_EQ(topological_invariants({1, 0, 0}), (std::array<int, 3>{-1, -1, 0}));
    EXPECT_EQ(topological_invariants({2, 1, 3}, {1, 2, 1}), (std::array<int, 3>{1 * 1 - 2 * 2, 1 * 3 - 1 * 2, 2 * 3 - 1 * 1}));
    EXPECT_THROW(topological_invariants({-1, 0, 0}), Error);
}

TEST(Invariants, ZeroModeCounting)
{
    Eigen::VectorXd e(5);
    e << -1e-9, 1e-7, 0.5, 1.0, 2.0;
    EXPECT_EQ(count_zero_modes(e, 1e-6).count, 2);
    EXPECT_FALSE(count_zero_modes(e, 1e-6).negative);
    e[0] = -0.1;
    EXPECT_TRUE(count_zero_modes(e, 1e-6).negative);
}

TEST(Invariants, WallWeight)
{
    const GridSpec g = make_grid(10.0, 99);
    const Space s = node_space(g);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(99);
    v[0] = 1.0;
    EXPECT_DOUBLE_EQ(wall_weight(v, s, {}), 1.0);
    v.setZero();
    v[49] = 1.0;
    EXPECT_DOUBLE_EQ(wall_weight(v, s, {}), 0.0);
    v.setOnes();
    // |x| > 8 holds for 2 * 9 of the 99 nodes (x = +-8.2 ... +-9.8)
    EXPECT_NEAR(wall_weight(v, s, {}), 18.0 / 99.0, 1e-12);
}

TEST(Uts, PatternCheck)
{
    DegeneracyCluster zero, full, part;
    zero.energy = 0.0;
    zero.multiplicities = {1, 1, 0};
    full.energy = 2.0;
    full.multiplicities = {1, 1, 1};
    part.energy = 3.0;
    part.multiplicities = {1, 0, 1};
    EXPECT_TRUE(verify_uts_type({zero, full}, 1e-6));
    EXPECT_FALSE(verify_uts_type({zero, full, part}, 1e-6));
}

TEST(ClassFit, RecoversRandomPolynomials)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd H = random_symmetric(6, rng);
        const int deg = trial % 4;
        std::vector<double> c(deg + 1);
        for (auto& x : c)
            x = u(rng);
        c.back() = c.back() >= 0 ? c.back() + 0.5 : c.back() - 0.5;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6), P = Eigen::MatrixXd::Identity(6, 6);
        for (int d = 0; d <= deg; ++d) {
            A += c[d] * P;
            P = (P * H).eval();
        }
        const ClassFit fit = estimate_class_N(square_op(A), square_op(H), 4, 1e-10);
        ASSERT_TRUE(fit.N) << trial;
        EXPECT_EQ(*fit.N, deg) << trial;
        ASSERT_EQ(fit.coefficients.size(), c.size());
        for (int d = 0; d <= deg; ++d)
            EXPECT_NEAR(fit.coefficients[d], c[d], 1e-8) << trial << " degree " << d;
    }
}

TEST(ClassFit, ConstantOperatorIsClassZero)
{
    std::mt19937 rng(11);
    const Eigen::MatrixXd H = random_symmetric(6, rng);
    const ClassFit fit = estimate_class_N(square_op(3.0 * Eigen::MatrixXd::Identity(6, 6)), square_op(H), 4, 1e-10);
    ASSERT_TRUE(fit.N);
    EXPECT_EQ(*fit.N, 0);
    EXPECT_NEAR(fit.coefficients[0], 3.0, 1e-10);
}

TEST(ClassFit, NoFitBelowToleranceReturnsNothing)
{
    std::mt19937 rng(12);
    const Eigen::MatrixXd H = random_symmetric(6, rng), A = random_symmetric(6, rng);
    const ClassFit fit = estimate_class_N(square_op(A), square_op(H), 2, 1e-10);
    EXPECT_FALSE(fit.N);
    EXPECT_EQ(fit.residual_by_degree.size(), 3u);
    // residual never grows when more powers are allowed
    for (size_t d = 1; d < fit.residual_by_degree.size(); ++d)
        EXPECT_LE(fit.residual_by_degree[d], fit.residual_by_degree[d - 1] + 1e-14);
}

TEST(ClassFit, RejectsNonSymmetric)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
    A(0, 1) = 1.0;
    EXPECT_THROW(estimate_class_N(square_op(A), square_op(Eigen::MatrixXd::Identity(6, 6)), 2, 1e-8), Error);
}

TEST(Spectrum, HarmonicReport)
{
    const TSSystem sys = build_n1_harmonic({}, make_grid(10.0, 200));
    const SpectralReport rep = analyze_spectrum(sys, default_spectral_options(sys));
    EXPECT_EQ(rep.n0, (std::array<int, 3>{1, 1, 0}));
    EXPECT_EQ(rep.delta, (std::array<int, 3>{0, -1, -1}));
    EXPECT_TRUE(rep.uts_pattern_ok);
    EXPECT_TRUE(rep.nonnegative);
    const ClassReport cls = classify_system(sys, {});
    ASSERT_TRUE(cls.N);
    EXPECT_EQ(*cls.N, 1);
    EXPECT_EQ(cls.primary.operator_name, "D3^T D3");
}

TEST(Spectrum, ChainReportFiltersTheWallMode)
{
    const GridSpec g = make_grid(10.0, 200);
    N2ChainParams p;
    p.g1 = GridFunction::sample(g, [](double x) { return std::tanh(x); });
    p.g2 = GridFunction::constant(g, 1.0);
    const TSSystem sys = build_n2_chain(p, g).system;
    const SpectralReport rep = analyze_spectrum(sys, default_spectral_options(sys));
    EXPECT_EQ(rep.n0, (std::array<int, 3>{1, 0, 0}));
    EXPECT_EQ(rep.boundary_modes, (std::array<int, 3>{0, 0, 1}));
    EXPECT_EQ(rep.delta[0], -1);
    EXPECT_TRUE(rep.uts_pattern_ok);

    SpectralOptions raw = default_spectral_options(sys);
    raw.filter_walls = false;
    EXPECT_EQ(analyze_spectrum(sys, raw).n0[2], 1);
}

TEST(Clustering, ConservesEveryLevelWithoutWindow)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_real_distribution<double> tol(1e-6, 0.3);
    for (int trial = 0; trial < 30; ++trial) {
        std::array<std::vector<double>, 3> eigs;
        size_t total = 0;
        for (auto& e : eigs) {
            e.resize(5 + trial % 7);
            for (auto& x : e)
                x = u(rng);
            std::sort(e.begin(), e.end());
            total += e.size();
        }
        const auto cs = cluster_degeneracies(eigs, tol(rng));
        size_t seen = 0;
        for (const auto& c : cs)
            for (int s = 0; s < 3; ++s) {
                EXPECT_LE(c.multiplicities[s], 1);
                seen += c.members[s].size();
            }
        EXPECT_EQ(seen, total) << trial;
        for (size_t k = 1; k < cs.size(); ++k)
            EXPECT_LE(cs[k - 1].energy, cs[k].energy);
    }
}
