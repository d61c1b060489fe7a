#include "urnedge/catalog.hpp"

#include "urnedge/error.hpp"

#include <cmath>
#include <sstream>

namespace urnedge {

double engine_value(const CenteredStat& c, const std::string& key) {
    const double N = c.size();
    if (key == "Lambda")
        return c.Lambda;
    if (key == "gamma")
        return c.gamma;
    if (key == "sigma2")
        return c.sigma2;
    if (key.size() == 8 && key.rfind("alpha_", 0) == 0)
        return joint_alpha(c, key[6] - '0', key[7] - '0');
    if (key == "mean_hat20_sq")
        return c.alpha_hat_product_mean(2, 0, 2, 0);
    if (key == "mean_mix")
        return 4.0 * c.alpha_hat_product_mean(1, 1, 1, 1) + 2.0 * c.alpha_hat_product_mean(2, 0, 0, 2);
    if (key == "sum_hat11_sq")
        return N * c.alpha_hat_product_mean(1, 1, 1, 1);
    if (key == "sum_hat20_hat02")
        return N * c.alpha_hat_product_mean(2, 0, 0, 2);
    throw Error(ErrorCode::ConfigError, "unknown engine quantity '" + key + "'");
}

// ---- chi-square -----------------------------------------------------------

ChiSqParams chisq_closed_form(int n, const std::vector<double>& p) {
    if (n < 1 || p.empty())
        throw Error(ErrorCode::ConfigError, "chi-square needs n >= 1 and a nonempty p");
    ChiSqParams r;
    r.n = n;
    r.N = static_cast<int>(p.size());
    r.lambda = static_cast<double>(n) / r.N;
    double total = 0.0;
    for (double pm : p) {
        if (!(pm > 0.0))
            throw Error(ErrorCode::NonpositiveShape, "cell probabilities must be positive");
        total += pm;
    }
    for (int i = 2; i <= 6; ++i) {
        r.P[i] = 0.0;
        for (double pm : p)
            r.P[i] += std::pow(pm / total, i);
    }
    const double nn = n, lam = r.lambda;
    const auto& P = r.P;
    const double d32 = P[3] - P[2] * P[2];

    r.Lambda = nn * (1.0 + nn * P[2]);
    r.sigma2 = 2.0 * nn * nn * P[2] + 4.0 * nn * nn * nn * d32;
    r.sigma_hat = std::sqrt(r.sigma2 / r.N);
    const double sh = r.sigma_hat;
    r.alpha12 = 2.0 * lam * P[2] / sh;
    r.alpha21 = 4.0 * std::sqrt(nn) * lam / (sh * sh) * (P[2] + 12.0 * nn * d32);
    r.alpha30 = nn * lam / std::pow(sh, 3)
                * (4.0 * P[2] + 2.0 * nn * (16.0 * P[3] - 9.0 * P[2] * P[2])
                   + 8.0 * nn * nn * (4.0 * P[4] - 9.0 * P[2] * P[3] + 5.0 * std::pow(P[2], 3)));
    r.alpha40 = nn * lam / std::pow(sh, 4)
                * (8.0 * P[2] + nn * (164.0 * P[2] * P[2] - 17.0 * P[3])
                   + nn * nn * (636.0 * P[4] - 768.0 * P[2] * P[3] + 192.0 * std::pow(P[2], 3))
                   + std::pow(nn, 3)
                         * (448.0 * P[5] - 1120.0 * P[2] * P[4] + 912.0 * P[2] * P[2] * P[3] - 240.0 * std::pow(P[2], 4))
                   + 48.0 * std::pow(nn, 4)
                         * (P[6] - 4.0 * P[2] * P[5] + 6.0 * P[2] * P[2] * P[4] - 4.0 * std::pow(P[2], 3) * P[3]
                            + std::pow(P[2], 5)));
    r.alpha22 = lam / (lam * sh * sh)
                * (8.0 * nn * P[2] + 2.0 * nn * nn * (19.0 * P[3] - 14.0 * P[2] * P[2])
                   + 12.0 * std::pow(nn, 3) * (P[4] - 2.0 * P[2] * P[3] + std::pow(P[2], 3)) - 1.0);
    const double NN = r.N;
    r.mean_hat20_sq = nn * lam / std::pow(sh, 4)
                      * (3.0 * P[2] - 2.0 * nn * P[3] + 4.0 * NN * NN * P[4]
                         + 16.0 * std::pow(NN, 3) * (P[5] - 2.0 * P[4] * P[2] + P[3] * P[2])
                         + 16.0 * std::pow(NN, 4)
                               * (P[6] - 4.0 * P[2] * P[5] + 6.0 * P[4] * P[2] * P[2] - 4.0 * P[3] * std::pow(P[2], 3)
                                  + std::pow(P[2], 5)));
    r.mean_mix = 1.0 / (lam * sh * sh)
                 * (2.0 * nn * nn * lam * P[3]
                    + 2.0 * std::pow(nn, 3) * lam * (2.0 * P[4] - 6.0 * P[3] * P[2] + 3.0 * std::pow(P[2], 3)));

    r.alpha12_derived = 2.0 * nn * P[2] / sh;
    // E g^2 (xi - lambda_m) summed over Poisson cells: 4 n^2 P2 + 12 n^3 (P3 - P2^2)
    r.alpha21_derived = std::sqrt(NN) * (4.0 * nn * nn * P[2] + 12.0 * std::pow(nn, 3) * d32) / (r.sigma2 * std::sqrt(nn));
    r.degenerate = r.N == 1;
    return r;
}

std::vector<ParamField> ChiSqParams::fields() const {
    const std::string eq_p_only = "agrees only when every p_m is equal";
    return {
        {"Lambda", "Lambda", Lambda, 0.0, false, 0.0, ""},
        {"sigma2", "sigma2", sigma2, 0.0, false, 0.0, ""},
        {"alpha_12", "alpha_12", alpha12, 1.0, false, 0.0, "printed value is the per-N average"},
        {"alpha_21", "alpha_21", alpha21, 0.5, true, 0.0, "coefficient 12 should be 3; " + eq_p_only},
        {"alpha_30", "alpha_30", alpha30, 0.5, true, 0.0, "bracket disagrees with the Poisson moments"},
        {"alpha_40", "alpha_40", alpha40, 1.0, true, 0.0, "bracket disagrees with the Poisson moments"},
        {"alpha_22", "alpha_22", alpha22, 1.0, true, 0.0, "bracket disagrees with the Poisson moments"},
        {"mean_hat20_sq", "mean_hat20_sq", mean_hat20_sq, 0.0, true, 0.0, "mixes N and n powers"},
        {"mean_mix", "mean_mix", mean_mix, 0.0, true, 0.0, "sign and scale disagree"},
        {"alpha_12 (derived)", "alpha_12", alpha12_derived, 0.0, false, 0.0, "2 n P2 / sigma_hat"},
        {"alpha_21 (derived)", "alpha_21", alpha21_derived, 0.0, false, 0.0, "4 n^2 P2 + 12 n^3 (P3 - P2^2) over sigma^2 B"},
    };
}

// ---- sample sum without replacement ----------------------------------------

std::array<double, 4> raw_moments(const DiscreteLaw& law) {
    validate_law(law);
    std::array<double, 4> m{};
    for (std::size_t s = 0; s < law.support.size(); ++s) {
        double v = 1.0;
        for (int i = 0; i < 4; ++i) {
            v *= law.support[s];
            m[i] += law.probs[s] * v;
        }
    }
    return m;
}

SampleSumParams samplesum_closed_form(const std::vector<double>& omega,
                                      const std::vector<std::array<double, 4>>& raw, int n) {
    if (omega.empty() || omega.size() != raw.size())
        throw Error(ErrorCode::ConfigError, "one moment set per stratum is required");
    SampleSumParams r;
    r.n = n;
    r.N = static_cast<int>(omega.size());
    r.omega = omega;
    for (double w : omega) {
        if (!(w > 0.0))
            throw Error(ErrorCode::NonpositiveShape, "stratum sizes must be positive");
        r.Omega += w;
    }
    if (n < 1 || n > r.Omega)
        throw Error(ErrorCode::InfeasibleTotal, "sample size must lie in 1..sum(omega)");
    r.p = n / r.Omega;
    r.q = 1.0 - r.p;
    for (int m = 0; m < r.N; ++m)
        r.gamma += omega[m] * raw[m][0];
    r.gamma /= r.Omega;

    // moments about gamma by binomial expansion of (Y - gamma)^i
    r.alpha.resize(r.N);
    for (int m = 0; m < r.N; ++m) {
        const double mu[5] = {1.0, raw[m][0], raw[m][1], raw[m][2], raw[m][3]};
        for (int i = 0; i <= 4; ++i) {
            double acc = 0.0, binom = 1.0;
            for (int j = 0; j <= i; ++j) {
                acc += binom * mu[j] * std::pow(-r.gamma, i - j);
                binom = binom * (i - j) / (j + 1);
            }
            r.alpha[m][i] = acc;
        }
    }
    const double p = r.p, q = r.q, nn = n;
    auto a = [&](int m, int i) { return r.alpha[m][i]; };
    double D = 0.0;
    for (int m = 0; m < r.N; ++m)
        D += omega[m] * (a(m, 2) - p * a(m, 1) * a(m, 1));
    r.sigma2 = p * D;

    r.alpha12 = 0.0;
    double num21 = 0.0, num22 = 0.0, s11 = 0.0, s2002 = 0.0, num30 = 0.0, num30d = 0.0, num40 = 0.0;
    for (int m = 0; m < r.N; ++m) {
        const double w = omega[m], a1 = a(m, 1), a2 = a(m, 2), a3 = a(m, 3), a4 = a(m, 4);
        num21 += w * (a2 - 2.0 * p * a1 * a1);
        num22 += w * (a2 * (1.0 + (w - 2.0) * p) - a1 * a1 * (w - 2.0) * p * (1.0 - 3.0 * q));
        s11 += w * w * a1 * a1;
        s2002 += w * w * (a2 - p * a1 * a1);
        num30 += w * (a3 - 3.0 * p * a1 * a2 - 2.0 * p * p * a1 * a1 * a1);
        num30d += w * (a3 - 3.0 * p * a1 * a2 + 2.0 * p * p * a1 * a1 * a1);
        num40 += w * (a4 - 4.0 * p * a1 * a3 + 3.0 * (w - 1.0) * p * a2 * a2 - 6.0 * (w - 2.0) * p * p * a1 * a1 * a2
                      - 3.0 * (3.0 * w - 2.0) * p * p * p * a1 * a1 * a1 * a1);
    }
    r.alpha21 = std::sqrt(q / nn) * num21 / D;
    r.alpha03 = (1.0 - 2.0 * q) / std::sqrt(nn * q);
    r.alpha22 = num22 / (r.Omega * p * D);
    r.sum_hat11_sq = q * s11 / (r.Omega * D);
    r.sum_hat20_hat02 = s2002 / (r.Omega * D);
    r.alpha30 = num30 * std::pow(std::pow(p, 2.0 / 3.0) * D, -1.5);
    r.alpha40 = num40 * std::pow(std::sqrt(p) * D, -2.0);

    const double sqrtN = std::sqrt(static_cast<double>(r.N));
    r.alpha03_derived = sqrtN * (1.0 - 2.0 * p) / std::sqrt(nn * q);
    r.alpha30_derived = sqrtN * num30d / (std::sqrt(p) * std::pow(D, 1.5));
    return r;
}

double SampleSumParams::beta_bound(double delta) const {
    const double e = 2.0 + delta;
    double acc = 0.0;
    for (int m = 0; m < N; ++m) {
        // E|Y - gamma|^{2+delta} bounded through the fourth moment by Lyapunov
        const double abs_moment = std::pow(alpha[m][4], e / 4.0);
        acc += std::pow(omega[m], e) * abs_moment;
    }
    return std::pow(2.0, e) * p * (1.0 + std::pow(p, 1.0 + delta)) / std::pow(sigma2, e / 2.0) * acc;
}

std::vector<ParamField> SampleSumParams::fields() const {
    return {
        {"gamma", "gamma", gamma, 0.0, false, 0.0, ""},
        {"sigma2", "sigma2", sigma2, 0.0, false, 0.0, ""},
        {"alpha_12", "alpha_12", alpha12, 0.0, false, 1.0, "vanishes identically"},
        {"alpha_21", "alpha_21", alpha21, 0.5, false, 0.0, "printed value is the per-N average"},
        {"alpha_22", "alpha_22", alpha22, 1.0, false, 0.0, "printed value is the per-N average"},
        {"sum alpha_11m^2", "sum_hat11_sq", sum_hat11_sq, 2.0, false, 0.0, "hatted moments carry N"},
        {"sum alpha_20m alpha_02m", "sum_hat20_hat02", sum_hat20_hat02, 2.0, false, 0.0, "hatted moments carry N"},
        {"alpha_03", "alpha_03", alpha03, 0.5, true, 1.0, "sign of (1 - 2q) is reversed"},
        {"alpha_30", "alpha_30", alpha30, 0.5, true, 1.0, "sign of the cubic alpha_1 term and the power of p"},
        {"alpha_40", "alpha_40", alpha40, 1.0, true, 0.0, "disagrees with the engine"},
        {"alpha_03 (derived)", "alpha_03", alpha03_derived, 0.0, false, 1.0, "sqrt(N) (1 - 2p) / sqrt(nq)"},
        {"alpha_30 (derived)", "alpha_30", alpha30_derived, 0.0, false, 1.0, "+2 p^2 alpha_1^3, p^{1/2} D^{3/2}"},
    };
}

// ---- Dixon ------------------------------------------------------------------

DixonParams dixon_closed_form(int M, int n, int k) {
    if (M < 1 || n < 1 || k < 1)
        throw Error(ErrorCode::ConfigError, "Dixon needs M, n, k >= 1");
    if (k > M)
        throw Error(ErrorCode::ConfigError, "spacing step k exceeds M");
    DixonParams r;
    r.M = M;
    r.n = n;
    r.k = k;
    r.N = M / k;
    r.leftover = M - r.N * k;
    const double rho = static_cast<double>(n) / M, kk = k, MM = M;
    r.rho = rho;
    r.Lambda = MM * (1.0 + (1.0 + kk) * rho);
    r.gamma = 1.0 + 2.0 * (1.0 + kk) * rho;
    r.sigma2 = 2.0 * MM * (1.0 + 2.0 * kk) * rho * rho * std::pow(1.0 + rho, 2);
    r.alpha12 = std::sqrt(2.0) * (kk + 1.0) / std::sqrt(kk * (1.0 + 2.0 * kk));
    const double r1 = 1.0 + rho;
    r.alpha30 = (8.0 * kk * kk * std::pow(rho, 3) * std::pow(r1, 3)
                 + kk * r1 * r1
                       * (19.0 + 76.0 * rho * r1 + 2.0 * r1 * r1 * (15.0 - 13.0 * rho + 16.0 * rho * rho * r1)))
                / (2.0 * std::pow(std::sqrt(2.0 * kk * (1.0 + 2.0 * kk)), 1.5) * std::pow(rho, 3) * std::pow(r1, 3));
    r.g_quadratic = 1.0;
    r.g_linear = -(1.0 + 2.0 * rho);
    r.g_constant = -kk * rho * (1.0 + rho);

    const double D1 = static_cast<double>(r.N) * kk;
    const double rc = n / D1;
    r.rho_cells = rc;
    r.Lambda_derived = D1 * rc * (1.0 + (1.0 + kk) * rc);
    r.sigma2_derived = 2.0 * D1 * (kk + 1.0) * rc * rc * std::pow(1.0 + rc, 2);
    r.alpha12_derived = std::sqrt(2.0 * (kk + 1.0) / kk);
    r.alpha30_derived = std::sqrt(2.0) * (2.0 * kk * rc * rc + 2.0 * kk * rc + 8.0 * rc * rc + 8.0 * rc + 1.0)
                        / (rc * (1.0 + rc) * std::sqrt(kk * (kk + 1.0)));
    return r;
}

std::vector<ParamField> DixonParams::fields() const {
    std::string bridge;
    if (leftover > 0) {
        std::ostringstream os;
        os << leftover << " spacings beyond N k = " << N * k << " are not covered";
        bridge = os.str();
    }
    return {
        {"Lambda", "Lambda", Lambda, 0.0, true, 0.0, "missing a factor rho"},
        {"gamma", "gamma", gamma, 0.0, leftover > 0, 0.0, bridge},
        {"sigma2", "sigma2", sigma2, 0.0, true, 0.0, "(1 + 2k) should be (k + 1)"},
        {"alpha_12", "alpha_12", alpha12, 0.0, true, 0.0, "should be sqrt(2 (k + 1) / k)"},
        {"alpha_30", "alpha_30", alpha30, 0.0, true, 0.0, "disagrees with the engine"},
        {"Lambda (derived)", "Lambda", Lambda_derived, 0.0, false, 0.0, "N k rho (1 + (1 + k) rho)"},
        {"sigma2 (derived)", "sigma2", sigma2_derived, 0.0, false, 0.0, "2 N k (k + 1) rho^2 (1 + rho)^2"},
        {"alpha_12 (derived)", "alpha_12", alpha12_derived, 0.0, false, 0.0, ""},
        {"alpha_30 (derived)", "alpha_30", alpha30_derived, 0.0, false, 0.0, ""},
    };
}

// ---- reconciliation -----------------------------------------------------------

bool DiffReport::ok() const {
    for (const DiffRow& r : rows)
        if (!r.field.suspected_typo && !r.within_tol)
            return false;
    return true;
}

int DiffReport::flagged_count() const {
    int c = 0;
    for (const DiffRow& r : rows)
        c += r.field.suspected_typo ? 1 : 0;
    return c;
}

DiffReport cross_check(const std::vector<ParamField>& fields, const CenteredStat& centered, double tol,
                       bool throw_on_mismatch) {
    DiffReport report;
    report.tol = tol;
    const double N = centered.size();
    std::string failures;
    for (const ParamField& f : fields) {
        DiffRow row;
        row.field = f;
        row.reconciled = f.printed * std::pow(N, f.n_power);
        row.engine = engine_value(centered, f.key);
        const double scale = std::max({std::abs(row.engine), std::abs(row.reconciled), f.abs_floor});
        row.rel_diff = scale > 0.0 ? std::abs(row.reconciled - row.engine) / scale : 0.0;
        row.within_tol = row.rel_diff <= tol;
        if (!f.suspected_typo && !row.within_tol)
            failures += (failures.empty() ? "" : ", ") + f.label;
        report.rows.push_back(std::move(row));
    }
    if (throw_on_mismatch && !failures.empty())
        throw Error(ErrorCode::MismatchBeyondTolerance, "closed form disagrees with the engine: " + failures);
    return report;
}

} // namespace urnedge
