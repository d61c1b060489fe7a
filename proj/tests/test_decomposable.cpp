#include "urnedge/decomposable.hpp"
#include "urnedge/error.hpp"

#include "support/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace urnedge;

TEST(Center, ChiSquareSmallExample) {
    const std::vector<double> p{0.5, 0.5};
    const CenteredStat c = center(calibrate(Family::Poisson, p, 2), Kernel::power(2), 1e-16);
    // n (1 + n P2) with P2 = 1/2
    EXPECT_NEAR(c.Lambda, 4.0, 1e-10);
}

TEST(Center, DeterministicSampleSum) {
    // omega = 1, deterministic increments y_m: gamma = mean(y), sigma^2 = pq sum (y - ybar)^2
    const std::vector<double> y{1.0, 4.0, 2.0, 7.0, 3.0};
    std::vector<DiscreteLaw> laws;
    for (double v : y)
        laws.push_back({{v}, {1.0}});
    const std::vector<double> omega(5, 1.0);
    const CenteredStat c = center(calibrate(Family::Binomial, omega, 2), Kernel::compound(laws));
    const double ybar = 17.0 / 5.0, p = 0.4;
    double ss = 0.0;
    for (double v : y)
        ss += (v - ybar) * (v - ybar);
    EXPECT_NEAR(c.gamma, ybar, 1e-12);
    EXPECT_NEAR(c.sigma2, p * (1 - p) * ss, 1e-12);
}

TEST(Center, AffineKernelIsDegenerate) {
    std::vector<std::vector<double>> tables(3);
    for (int m = 0; m < 3; ++m)
        for (int x = 0; x <= 60; ++x)
            tables[m].push_back(2.5 * x + m);
    const std::vector<double> p{0.2, 0.3, 0.5};
    try {
        center(calibrate(Family::Poisson, p, 6), Kernel::tables(tables));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateStatistic);
    }
}

TEST(Center, ShortTableIsRejected) {
    const std::vector<double> p{0.5, 0.5};
    try {
        center(calibrate(Family::Poisson, p, 4), Kernel::tables({{0, 1, 4, 9}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SupportTooShort);
    }
}

TEST(JointAlpha, Standardization) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 12; ++i) {
        const auto model = fixtures::random_model(rng, i);
        const CenteredStat c = center(model.gum, model.kernel);
        EXPECT_NEAR(joint_alpha(c, 2, 0), 1.0, 1e-10);
        EXPECT_NEAR(joint_alpha(c, 0, 2), 1.0, 1e-9);
        EXPECT_NEAR(joint_alpha(c, 1, 1), 0.0, 1e-8);
        EXPECT_THROW(joint_alpha(c, 4, 3), Error);
    }
}

TEST(JointAlpha, SampleSumHasNoAlpha12) {
    std::mt19937_64 rng(17);
    const std::vector<double> omega{2, 3, 1, 4};
    std::vector<DiscreteLaw> laws;
    for (int m = 0; m < 4; ++m)
        laws.push_back(fixtures::random_law(rng, 3));
    const CenteredStat c = center(calibrate(Family::Binomial, omega, 5), Kernel::compound(laws));
    EXPECT_NEAR(joint_alpha(c, 1, 2), 0.0, 1e-12);
}

TEST(Orthogonality, ResidualsVanish) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 16; ++i) {
        const auto model = fixtures::random_model(rng, i);
        const CenteredStat c = center(model.gum, model.kernel);
        const Orthogonality o = check_orthogonality(c);
        const double scale = 1e-9 * c.sigma() * std::max(1.0, c.B());
        EXPECT_LE(std::abs(o.residual_mean), scale);
        EXPECT_LE(std::abs(o.residual_cov), scale);
    }
    const std::vector<double> p(10, 0.1);
    const CenteredStat chi = center(calibrate(Family::Poisson, p, 20), Kernel::power(2), 1e-16);
    const Orthogonality o = check_orthogonality(chi);
    EXPECT_LE(std::abs(o.residual_mean), 1e-10);
    EXPECT_LE(std::abs(o.residual_cov), 1e-10);
}

TEST(Orthogonality, DetectsCorruptedTable) {
    const std::vector<double> p(10, 0.1);
    CenteredStat c = center(calibrate(Family::Poisson, p, 20), Kernel::power(2));
    c.cells[0].g_mean.array() += 1.0;
    EXPECT_NEAR(check_orthogonality(c).residual_mean, 1.0, 1e-9);
}

TEST(Center, SigmaIsResidualVariance) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 8; ++i) {
        const auto model = fixtures::random_model(rng, i);
        const CenteredStat c = center(model.gum, model.kernel, 1e-16);
        // sum Var f - B^2 gamma^2, from the conditional laws
        double var_f = 0.0;
        for (const CellStat& cell : c.cells) {
            double second = 0.0;
            for (Eigen::Index x = 0; x < cell.pmf.size(); ++x) {
                const double fx = cell.g_mean(x) + cell.mean_f + c.gamma * (x - cell.mean);
                second += cell.pmf(x) * (cell.g_cmom(x, 2) + fx * fx);
            }
            var_f += second - cell.mean_f * cell.mean_f;
        }
        EXPECT_NEAR(c.sigma2, var_f - c.gum.B2 * c.gamma * c.gamma, 1e-9 * c.sigma2);
    }
}

TEST(Center, AffineInvariance) {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const GumSpec g = calibrate(Family::Poisson, p, 9);
    std::vector<std::vector<double>> base(4), shifted(4);
    const double a = 1.75;
    for (int m = 0; m < 4; ++m)
        for (int x = 0; x <= 60; ++x) {
            base[m].push_back(x * x);
            shifted[m].push_back(x * x + a * x + 0.5 * m);
        }
    const CenteredStat c0 = center(g, Kernel::tables(base));
    const CenteredStat c1 = center(g, Kernel::tables(shifted));
    EXPECT_NEAR(c1.gamma, c0.gamma + a, 1e-10);
    EXPECT_NEAR(c1.Lambda, c0.Lambda + 3.0 + a * g.A, 1e-9);
    EXPECT_NEAR(c1.sigma2, c0.sigma2, 1e-9 * c0.sigma2);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j)
            EXPECT_NEAR(joint_alpha(c1, i, j), joint_alpha(c0, i, j), 1e-9);
}

// Chi-square residual variance against 2 n^2 P2 + 4 n^3 (P3 - P2^2).
TEST(Center, ChiSquareVarianceClosedForm) {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        const int N = std::uniform_int_distribution<int>(2, 15)(rng);
        const int n = std::uniform_int_distribution<int>(1, 4 * N)(rng);
        const auto p = fixtures::random_probs(rng, N);
        double P2 = 0.0, P3 = 0.0;
        for (double v : p) {
            P2 += v * v;
            P3 += v * v * v;
        }
        const double expected = 2.0 * n * n * P2 + 4.0 * std::pow(n, 3) * (P3 - P2 * P2);
        const CenteredStat c = center(calibrate(Family::Poisson, p, n), Kernel::power(2), 1e-16);
        EXPECT_NEAR(c.sigma2, expected, 1e-9 * expected);
    }
}

namespace {

// E f^i xi~^j for a compound kernel by enumerating every increment path.
double enumerate_joint(const CellLaw& cell, const DiscreteLaw& law, double shift_f, double gamma, int i, int j) {
    double acc = 0.0;
    const int top = static_cast<int>(cell.shape);
    for (int x = 0; x <= top; ++x) {
        std::map<double, double> sums{{0.0, 1.0}};
        for (int r = 0; r < x; ++r) {
            std::map<double, double> next;
            for (const auto& [v, p] : sums)
                for (std::size_t s = 0; s < law.support.size(); ++s)
                    next[v + law.support[s]] += p * law.probs[s];
            sums = next;
        }
        const double xt = x - cell.mean();
        for (const auto& [v, p] : sums)
            acc += cell.pmf(x) * p * std::pow(v - shift_f - gamma * xt, i) * std::pow(xt, j);
    }
    return acc;
}

} // namespace

TEST(Center, CompoundMatchesEnumeration) {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        const int N = 4;
        std::vector<double> omega(N);
        for (double& w : omega)
            w = std::uniform_int_distribution<int>(1, 3)(rng);
        std::vector<DiscreteLaw> laws;
        for (int m = 0; m < N; ++m)
            laws.push_back(fixtures::random_law(rng, std::uniform_int_distribution<int>(1, 3)(rng)));
        const GumSpec g = calibrate(Family::Binomial, omega, 3);
        const CenteredStat c = center(g, Kernel::compound(laws));
        double lambda = 0.0;
        for (int m = 0; m < N; ++m) {
            const double ef = enumerate_joint(g.cells[m], laws[m], 0.0, 0.0, 1, 0);
            lambda += ef;
            EXPECT_NEAR(c.cells[m].mean_f, ef, 1e-10);
            for (int i = 0; i <= 4; ++i)
                for (int j = 0; i + j <= 6; ++j)
                    EXPECT_NEAR(c.cells[m].joint(i, j), enumerate_joint(g.cells[m], laws[m], ef, c.gamma, i, j),
                                1e-10 * std::max(1.0, std::abs(c.cells[m].joint(i, j))));
        }
        EXPECT_NEAR(c.Lambda, lambda, 1e-10);
    }
}

TEST(DiscreteLaw, CumulantsAndValidation) {
    const DiscreteLaw law{{0.0, 1.0}, {0.5, 0.5}};
    const Eigen::VectorXd k = law.cumulants(4);
    EXPECT_NEAR(k(1), 0.5, 1e-15);
    EXPECT_NEAR(k(2), 0.25, 1e-15);
    EXPECT_NEAR(k(3), 0.0, 1e-15);
    EXPECT_NEAR(k(4), -0.125, 1e-15);
    EXPECT_THROW(validate_law({{0.0, 1.0}, {0.5, 0.6}}), Error);
    EXPECT_THROW(validate_law({{0.0, 1.0}, {1.2, -0.2}}), Error);
}
