#pragma once

#include "urnedge/decomposable.hpp"

#include <array>
#include <string>
#include <vector>

namespace urnedge {

// One closed-form quantity. `key` names the engine quantity it is compared
// with; the printed value times N^n_power is the reconciled value. Fields
// marked suspected_typo are reported but never asserted.
struct ParamField {
    std::string label;
    std::string key;
    double printed = 0.0;
    double n_power = 0.0;
    bool suspected_typo = false;
    double abs_floor = 0.0; // denominator floor for quantities that vanish
    std::string note;
};

// Engine-side value for a field key:
//   Lambda, gamma, sigma2, alpha_ij (joint_alpha),
//   mean_hat20_sq  = N^{-1} sum alpha_hat20^2,
//   mean_mix       = 4 N^{-1} sum alpha_hat11^2 + 2 N^{-1} sum alpha_hat20 alpha_hat02,
//   sum_hat11_sq   = sum alpha_hat11^2,
//   sum_hat20_hat02 = sum alpha_hat20 alpha_hat02.
double engine_value(const CenteredStat& centered, const std::string& key);

struct ChiSqParams {
    int n = 0;
    int N = 0;
    double lambda = 0.0;               // n / N
    std::array<double, 7> P{};         // P[i] = sum p_m^i, i = 2..6
    double Lambda = 0.0;
    double sigma2 = 0.0;
    double sigma_hat = 0.0;            // sqrt(sigma2 / N)
    double alpha12 = 0.0, alpha21 = 0.0, alpha30 = 0.0, alpha40 = 0.0, alpha22 = 0.0;
    double mean_hat20_sq = 0.0;
    double mean_mix = 0.0;
    // Re-derived from the Poisson moments; these agree with the engine.
    double alpha12_derived = 0.0;
    double alpha21_derived = 0.0;
    bool degenerate = false;           // N = 1: the statistic is constant

    std::vector<ParamField> fields() const;
};

ChiSqParams chisq_closed_form(int n, const std::vector<double>& p);

struct SampleSumParams {
    int n = 0;
    int N = 0;
    double Omega = 0.0;
    double p = 0.0, q = 0.0;
    std::vector<double> omega;
    std::vector<std::array<double, 5>> alpha; // alpha[m][i] = E(Y_m - gamma)^i
    double gamma = 0.0;
    double sigma2 = 0.0;
    double alpha12 = 0.0;
    double alpha21 = 0.0, alpha03 = 0.0, alpha22 = 0.0, alpha30 = 0.0, alpha40 = 0.0;
    double sum_hat11_sq = 0.0;
    double sum_hat20_hat02 = 0.0;
    double alpha03_derived = 0.0;
    double alpha30_derived = 0.0;

    // Upper bound on beta_{2+delta} (not an estimate).
    double beta_bound(double delta) const;
    std::vector<ParamField> fields() const;
};

// raw_moments[m] = {E Y, E Y^2, E Y^3, E Y^4}. Throws InfeasibleTotal.
SampleSumParams samplesum_closed_form(const std::vector<double>& omega,
                                      const std::vector<std::array<double, 4>>& raw_moments, int n);

std::array<double, 4> raw_moments(const DiscreteLaw& law);

struct DixonParams {
    int M = 0, n = 0, k = 0;
    int N = 0;              // floor(M / k)
    int leftover = 0;       // M - N k spacings not covered by the N cells
    double rho = 0.0;       // n / M
    double Lambda = 0.0, gamma = 0.0, sigma2 = 0.0;
    double alpha12 = 0.0, alpha30 = 0.0;
    // g_m(x) = a (x - k rho)^2 + b (x - k rho) + c
    double g_quadratic = 1.0, g_linear = 0.0, g_constant = 0.0;
    // Re-derived on N negative-binomial cells of order k, rho' = n / (N k).
    double rho_cells = 0.0;
    double Lambda_derived = 0.0, sigma2_derived = 0.0, alpha12_derived = 0.0, alpha30_derived = 0.0;

    std::vector<ParamField> fields() const;
};

DixonParams dixon_closed_form(int M, int n, int k);

struct DiffRow {
    ParamField field;
    double reconciled = 0.0;
    double engine = 0.0;
    double rel_diff = 0.0;
    bool within_tol = false;
};

struct DiffReport {
    std::vector<DiffRow> rows;
    double tol = 0.0;
    // every unflagged field within tol
    bool ok() const;
    int flagged_count() const;
};

// Throws MismatchBeyondTolerance when an unflagged field disagrees and
// throw_on_mismatch is set.
DiffReport cross_check(const std::vector<ParamField>& fields, const CenteredStat& centered, double tol,
                       bool throw_on_mismatch = true);

} // namespace urnedge
