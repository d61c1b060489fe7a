#include "urnedge/catalog.hpp"
#include "urnedge/diagnostics.hpp"
#include "urnedge/error.hpp"

#include "support/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace urnedge;

namespace {

constexpr double kTail = 1e-20;
constexpr double kTol = 1e-9;

CenteredStat dixon_engine(const DixonParams& d) {
    const std::vector<double> shapes(d.N, static_cast<double>(d.k));
    return center(calibrate(Family::NegBinomial, shapes, d.n), Kernel::power(2), kTail);
}

} // namespace

TEST(ChiSq, EqualProbabilities) {
    const int N = 8, n = 20;
    const ChiSqParams c = chisq_closed_form(n, std::vector<double>(N, 1.0 / N));
    EXPECT_NEAR(c.Lambda, n * (1.0 + double(n) / N), 1e-12);
    EXPECT_NEAR(c.sigma2, 2.0 * n * n / N, 1e-10);
    EXPECT_NEAR(c.P[2], 1.0 / N, 1e-15);
    EXPECT_NEAR(c.P[6], std::pow(N, -5.0), 1e-18);
    EXPECT_FALSE(c.degenerate);
    // sigma_hat^2 = 2 lambda^2, so the per-N alpha_12 is sqrt(2) / N
    EXPECT_NEAR(c.alpha12, std::sqrt(2.0) / N, 1e-14);
    EXPECT_TRUE(chisq_closed_form(5, {1.0}).degenerate);
}

TEST(ChiSq, RenormalizesAndRejectsZeros) {
    const ChiSqParams a = chisq_closed_form(10, {1.0, 3.0});
    const ChiSqParams b = chisq_closed_form(10, {0.25, 0.75});
    EXPECT_NEAR(a.sigma2, b.sigma2, 1e-12);
    EXPECT_THROW(chisq_closed_form(10, {0.5, 0.0, 0.5}), Error);
}

// Lyapunov ordering of the power sums: P_l^l <= P_{l+1}^{l-1}, equality at equal p.
TEST(ChiSq, PowerSumOrdering) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const int N = std::uniform_int_distribution<int>(2, 20)(rng);
        const ChiSqParams c = chisq_closed_form(10, fixtures::random_probs(rng, N));
        for (int l = 2; l <= 5; ++l)
            EXPECT_LE(l * std::log(c.P[l]), (l - 1) * std::log(c.P[l + 1]) + 1e-12);
    }
    const ChiSqParams eq = chisq_closed_form(10, std::vector<double>(7, 1.0 / 7));
    for (int l = 2; l <= 5; ++l)
        EXPECT_NEAR(l * std::log(eq.P[l]), (l - 1) * std::log(eq.P[l + 1]), 1e-10);
}

TEST(ChiSq, RandomSweepAgainstEngine) {
    std::mt19937_64 rng(100);
    int flagged_rows = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int N = std::uniform_int_distribution<int>(2, 15)(rng);
        const int n = std::uniform_int_distribution<int>(1, 3 * N)(rng);
        const auto p = fixtures::random_probs(rng, N);
        const CenteredStat c = center(calibrate(Family::Poisson, p, n), Kernel::power(2), kTail);
        const DiffReport r = cross_check(chisq_closed_form(n, p).fields(), c, kTol, false);
        EXPECT_TRUE(r.ok()) << "N " << N << " n " << n;
        for (const DiffRow& row : r.rows)
            if (!row.field.suspected_typo)
                EXPECT_LE(row.rel_diff, kTol) << row.field.label;
        flagged_rows += r.flagged_count();
    }
    EXPECT_EQ(flagged_rows, 50 * 6);
}

TEST(SampleSum, DeterministicValues) {
    const std::vector<double> y{1.0, 4.0, 2.0, 7.0, 3.0};
    std::vector<std::array<double, 4>> raw;
    for (double v : y)
        raw.push_back({v, v * v, v * v * v, v * v * v * v});
    const SampleSumParams s = samplesum_closed_form(std::vector<double>(5, 1.0), raw, 2);
    const double ybar = 3.4;
    double ss = 0.0;
    for (double v : y)
        ss += (v - ybar) * (v - ybar);
    EXPECT_NEAR(s.gamma, ybar, 1e-14);
    EXPECT_NEAR(s.sigma2, 0.4 * 0.6 * ss, 1e-12);
    EXPECT_EQ(s.alpha12, 0.0);
    EXPECT_THROW(samplesum_closed_form(std::vector<double>(5, 1.0), raw, 6), Error);
}

TEST(SampleSum, SymmetricIncrementsHaveNoSkew) {
    const DiscreteLaw sym{{-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3}};
    const std::vector<std::array<double, 4>> raw(6, raw_moments(sym));
    const SampleSumParams s = samplesum_closed_form(std::vector<double>(6, 1.0), raw, 3);
    EXPECT_NEAR(s.alpha30, 0.0, 1e-15);
    EXPECT_NEAR(s.alpha30_derived, 0.0, 1e-15);
}

TEST(SampleSum, RandomSweepAgainstEngine) {
    std::mt19937_64 rng(200);
    for (int rep = 0; rep < 50; ++rep) {
        const int N = std::uniform_int_distribution<int>(2, 8)(rng);
        std::vector<double> omega(N);
        double total = 0.0;
        for (double& w : omega)
            total += (w = std::uniform_int_distribution<int>(1, 5)(rng));
        const int n = std::uniform_int_distribution<int>(1, static_cast<int>(total) - 1)(rng);
        std::vector<DiscreteLaw> laws;
        std::vector<std::array<double, 4>> raw;
        for (int m = 0; m < N; ++m) {
            laws.push_back(fixtures::random_law(rng, std::uniform_int_distribution<int>(1, 3)(rng)));
            raw.push_back(raw_moments(laws.back()));
        }
        const GumSpec g = calibrate(Family::Binomial, omega, n);
        CenteredStat c;
        try {
            c = center(g, Kernel::compound(laws), kTail);
        } catch (const Error& e) {
            ASSERT_EQ(e.code(), ErrorCode::DegenerateStatistic);
            continue;
        }
        const SampleSumParams s = samplesum_closed_form(omega, raw, n);
        const DiffReport r = cross_check(s.fields(), c, kTol, false);
        EXPECT_TRUE(r.ok()) << "rep " << rep;
        EXPECT_EQ(r.flagged_count(), 3);
        for (const DiffRow& row : r.rows)
            if (!row.field.suspected_typo)
                EXPECT_LE(row.rel_diff, kTol) << row.field.label << " rep " << rep;
        // labeled upper bound on the normalized absolute moment
        for (double delta : {0.5, 1.0})
            EXPECT_GE(s.beta_bound(delta) * (1.0 + 1e-9), norm_moments(c, 2.0 + delta).beta);
    }
}

TEST(Dixon, PrintedValuesAtKOne) {
    const DixonParams d = dixon_closed_form(10, 10, 1);
    EXPECT_EQ(d.N, 10);
    EXPECT_EQ(d.leftover, 0);
    EXPECT_NEAR(d.Lambda, 10.0 + 2.0 * 10.0, 1e-12);
    EXPECT_NEAR(d.alpha12, 2.0 * std::sqrt(2.0) / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(d.sigma2, 24.0 * 10.0, 1e-12);
    // the derived alpha_12 depends on k only
    EXPECT_NEAR(dixon_closed_form(30, 7, 3).alpha12_derived, dixon_closed_form(12, 40, 3).alpha12_derived, 1e-14);
}

TEST(Dixon, LeftoverSpacingsAreRecorded) {
    const DixonParams d = dixon_closed_form(13, 9, 4);
    EXPECT_EQ(d.N, 3);
    EXPECT_EQ(d.leftover, 1);
    bool gamma_flagged = false;
    for (const ParamField& f : d.fields())
        if (f.label == "gamma")
            gamma_flagged = f.suspected_typo && !f.note.empty();
    EXPECT_TRUE(gamma_flagged);
}

TEST(Dixon, BridgeExample) {
    const DixonParams d = dixon_closed_form(12, 12, 2);
    const CenteredStat c = dixon_engine(d);
    EXPECT_NEAR(d.Lambda_derived, c.Lambda, 1e-10 * c.Lambda);
    EXPECT_NEAR(d.gamma, c.gamma, 1e-10 * c.gamma);
    EXPECT_NEAR(d.sigma2_derived, c.sigma2, 1e-10 * c.sigma2);
    // rho = 1: the printed Lambda happens to be right, the printed sigma2 is not
    EXPECT_NEAR(d.Lambda, c.Lambda, 1e-10 * c.Lambda);
    EXPECT_GT(std::abs(d.sigma2 - c.sigma2), 0.1 * c.sigma2);
}

TEST(Dixon, RandomSweepAgainstEngine) {
    std::mt19937_64 rng(300);
    for (int rep = 0; rep < 50; ++rep) {
        const int k = std::uniform_int_distribution<int>(1, 4)(rng);
        const int N = std::uniform_int_distribution<int>(2, 12)(rng);
        const int M = N * k;
        const int n = std::uniform_int_distribution<int>(1, 2 * M)(rng);
        const DixonParams d = dixon_closed_form(M, n, k);
        const DiffReport r = cross_check(d.fields(), dixon_engine(d), kTol, false);
        EXPECT_TRUE(r.ok()) << "M " << M << " n " << n << " k " << k;
        for (const DiffRow& row : r.rows)
            if (!row.field.suspected_typo)
                EXPECT_LE(row.rel_diff, kTol) << row.field.label << " M " << M << " n " << n << " k " << k;
    }
}

TEST(CrossCheck, ThrowsOnlyForUnflaggedFields) {
    const std::vector<double> p{0.2, 0.3, 0.5};
    const CenteredStat c = center(calibrate(Family::Poisson, p, 6), Kernel::power(2), kTail);
    std::vector<ParamField> fields = chisq_closed_form(6, p).fields();
    EXPECT_NO_THROW(cross_check(fields, c, kTol));
    fields[0].printed *= 1.01;
    try {
        cross_check(fields, c, kTol);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MismatchBeyondTolerance);
    }
    const DiffReport r = cross_check(fields, c, kTol, false);
    EXPECT_FALSE(r.ok());
    EXPECT_NEAR(r.rows[0].rel_diff, 0.01 / 1.01, 1e-6);
    fields[0].suspected_typo = true;
    EXPECT_TRUE(cross_check(fields, c, kTol).ok());
    EXPECT_THROW(engine_value(c, "nonsense"), Error);
}
