#include "urnedge/diagnostics.hpp"
#include "urnedge/error.hpp"

#include "support/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace urnedge;

TEST(NormMoments, SecondOrderIsOne) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 12; ++i) {
        const auto model = fixtures::random_model(rng, i);
        const NormMoments nm = norm_moments(center(model.gum, model.kernel), 2.0);
        EXPECT_NEAR(nm.beta, 1.0, 1e-9);
        EXPECT_NEAR(nm.kappa, 1.0, 1e-9);
    }
}

TEST(NormMoments, AgreeWithJointAlphaAndCauchySchwarz) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 12; ++i) {
        const auto model = fixtures::random_model(rng, i);
        const CenteredStat c = center(model.gum, model.kernel, 1e-15);
        const double N = c.size();
        const NormMoments m3 = norm_moments(c, 3.0), m4 = norm_moments(c, 4.0);
        EXPECT_NEAR(m4.beta, joint_alpha(c, 4, 0) / N, 1e-10 * m4.beta);
        EXPECT_NEAR(m4.kappa, joint_alpha(c, 0, 4) / N, 1e-10 * m4.kappa);
        EXPECT_LE(m3.beta, std::sqrt(m4.beta) * (1.0 + 1e-12));
        EXPECT_LE(m3.kappa, std::sqrt(m4.kappa) * (1.0 + 1e-12));
        // fractional orders interpolate log-convexly
        const NormMoments m25 = norm_moments(c, 2.5);
        EXPECT_LE(m25.beta, std::sqrt(m3.beta) * (1.0 + 1e-12));
    }
}

TEST(NormMoments, OrderRange) {
    const std::vector<double> p(5, 0.2);
    const CenteredStat c = center(calibrate(Family::Poisson, p, 10), Kernel::power(2));
    try {
        norm_moments(c, 7.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OrderTooHigh);
    }
    EXPECT_THROW(norm_moments(c, 1.5), Error);
}

// For the three families |E e^{i tau xi}| decreases on [0, pi], so the
// infimum sits at T and has a closed form.
TEST(MInf, ClosedForms) {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
    const GumSpec pg = calibrate(Family::Poisson, p, 12);
    for (double T : {0.05, 0.4, 1.3, 3.0}) {
        double expected = 0.0;
        for (double pm : p)
            expected += 1.0 - std::exp(-2.0 * 12.0 * pm * (1.0 - std::cos(T)));
        EXPECT_NEAR(m_inf(pg, T), expected, 1e-12);
    }
    const std::vector<double> omega{2, 5, 3};
    const GumSpec bg = calibrate(Family::Binomial, omega, 4);
    const double nu = 0.4;
    for (double T : {0.1, 1.0, 2.5}) {
        double expected = 0.0;
        for (double w : omega)
            expected += 1.0 - std::pow(1.0 - 2.0 * nu * (1.0 - nu) * (1.0 - std::cos(T)), w);
        EXPECT_NEAR(m_inf(bg, T), expected, 1e-12);
    }
    const std::vector<double> d{1.0, 2.5};
    const GumSpec ng = calibrate(Family::NegBinomial, d, 7);
    for (double T : {0.2, 1.7}) {
        double expected = 0.0;
        for (double dm : d) {
            const double v = ng.nu;
            expected += 1.0 - std::pow((1 - v) * (1 - v) / (1.0 - 2.0 * v * std::cos(T) + v * v), dm);
        }
        EXPECT_NEAR(m_inf(ng, T), expected, 1e-12);
    }
}

TEST(MInf, EdgeCasesAndStability) {
    const std::vector<double> p(10, 0.1);
    const GumSpec g = calibrate(Family::Poisson, p, 20);
    EXPECT_TRUE(std::isinf(m_inf(g, 3.2)));
    EXPECT_NEAR(m_inf(g, std::numbers::pi), m_inf(g, std::numbers::pi - 1e-12), 1e-9);
    EXPECT_THROW(m_inf(g, 0.0), Error);
    EXPECT_THROW(m_inf(g, 0.5, 100), Error);
    double prev = 0.0;
    for (double T = 0.05; T < 3.1; T += 0.25) {
        const double v = m_inf(g, T);
        EXPECT_GE(v, prev);
        prev = v;
    }
    // refining the grid does not move the minimum
    const std::vector<double> omega{1, 1, 1, 1};
    const GumSpec b = make_gum(Family::Binomial, omega, 2, 0.5);
    EXPECT_NEAR(m_inf(b, 0.3, 1024), m_inf(b, 0.3, 4096), 1e-10);
}

TEST(Lindeberg, LargeThresholdLeavesOnlyTheThirdMoment) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 8; ++i) {
        const auto model = fixtures::random_model(rng, i);
        const CenteredStat c = center(model.gum, model.kernel);
        const Lindeberg l = lindeberg(c, 1e6);
        EXPECT_EQ(l.L2, 0.0);
        EXPECT_EQ(l.script_L2, 0.0);
        EXPECT_NEAR(l.script_L1, norm_moments(c, 3.0).kappa, 1e-12);
        // small threshold pushes everything into the tails
        const Lindeberg s = lindeberg(c, 1e-9);
        EXPECT_NEAR(s.script_L2, norm_moments(c, 2.0).kappa, 1e-9);
    }
}

TEST(Gates, ReportFieldsAreConsistent) {
    const std::vector<double> p(40, 1.0 / 40);
    const CenteredStat c = center(calibrate(Family::Poisson, p, 80), Kernel::power(2));
    const BoundReport r = gates(c, 5, 0.5, 0.2);
    EXPECT_EQ(r.s, 5);
    EXPECT_TRUE(r.chi_term_omitted);
    for (const char* k : {"2", "2.5", "3", "4", "5"}) {
        EXPECT_EQ(r.beta.count(k), 1u) << k;
        EXPECT_EQ(r.kappa.count(k), 1u) << k;
    }
    const double B = c.B();
    EXPECT_NEAR(r.T_upsilon, 0.3 / (B * r.kappa.at("3")), 1e-15);
    EXPECT_NEAR(r.M_upsilon, m_inf(c.gum, r.T_upsilon), 1e-12);
    EXPECT_NEAR(r.upsilon, r.beta.at("5") + r.kappa.at("5") + B * B * std::exp(-r.M_upsilon / 8.0), 1e-12);
    EXPECT_NEAR(r.T_script_E, 0.3 / (B * r.kappa.at("2.5")), 1e-15);
    EXPECT_NEAR(r.E_delta, 1.0 / std::sqrt(r.M_script_E) + std::min(B, std::sqrt(40.0)) / r.M_script_E, 1e-12);
    EXPECT_NEAR(r.T_N, std::min(1.0 / r.beta.at("3"), 1.0 / r.E_one), 1e-15);
    EXPECT_NEAR(r.normal_approx_rhs, r.beta.at("2.5") + r.kappa.at("2.5") + r.E_delta, 1e-15);
    EXPECT_EQ(r.expansion_rhs_partial, r.upsilon);
    EXPECT_THROW(gates(c, 6), Error);
    EXPECT_THROW(gates(c, 4, 1.5), Error);
}
