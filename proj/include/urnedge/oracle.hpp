#pragma once

#include "urnedge/decomposable.hpp"
#include "urnedge/urn_models.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace urnedge {

// Finite distribution of the statistic R_N(eta) = sum_m f_m(eta_m).
struct ExactDist {
    double z0 = 0.0; // smallest value
    double h = 0.0;  // lattice span; 0 when the values are not lattice-regular
    std::vector<std::pair<double, double>> values; // (value, probability), increasing
    double total_prob_check = 0.0;

    // Provenance carried into output metadata.
    double tail_eps = 0.0;
    double q_v = 0.0;
    double local_mass = 0.0;            // P{zeta = n} seen by the DP (exact_pmf only)
    std::optional<std::uint64_t> seed;  // sample only
    long long reps = 0;                 // sample only

    // P{R <= z}.
    double cdf(double z) const;
    double mean() const;
    double variance() const;
    // E exp(i t (R - shift) / scale).
    std::complex<double> charfn(double t, double shift = 0.0, double scale = 1.0) const;
};

inline constexpr std::size_t kDefaultStateBudget = 10'000'000;

// Largest q such that every value is an integer multiple of q within
// rel_tol (relative to q). Returns nullopt when no q >= max|v| / max_ratio fits.
std::optional<double> common_quantum(const std::vector<double>& values, double rel_tol = 1e-9,
                                     int max_ratio = 1 << 20);

// Exact conditional law of R_N given zeta = n by sequential convolution of the
// joint law of (f_m(xi_m), xi_m). Values are carried on the lattice q_v; when
// qv is given, kernel values are binned to the nearest multiple.
// Throws StateBudgetExceeded, NonRepresentableValues, SupportTooShort.
ExactDist exact_pmf(const GumSpec& gum, const Kernel& kernel, double tail_eps = 1e-12,
                    std::optional<double> qv = std::nullopt, std::size_t budget = kDefaultStateBudget);

// P{xi_1 + ... + xi_N = n} by convolution of truncated cell laws.
double local_prob(const GumSpec& gum, double tail_eps = 1e-12);

struct QuadSpec {
    int initial_panels = 64;
    int max_panels = 1 << 20;
    double rel_tol = 1e-8;
};

// E exp(i t sum_m g_m(eta_m) / sigma) by the ratio of tau-integrals of the
// unconditional joint characteristic function. Throws QuadratureNotConverged.
std::complex<double> conditional_charfn(const CenteredStat& centered, double t, const QuadSpec& quad = {});

// Monte-Carlo draws of eta from the urn scheme itself (no rejection): multinomial
// for Poisson cells, multivariate hypergeometric for binomial cells, Polya urn
// for negative-binomial cells. Reps are split into fixed blocks with their own
// streams, so the result does not depend on the number of worker threads
// (capped by URNEDGE_THREADS).
ExactDist sample(const GumSpec& gum, const Kernel& kernel, long long reps, std::uint64_t seed);

// Draws a single occupancy vector; exposed for sampler tests.
std::vector<int> sample_occupancy(const GumSpec& gum, std::uint64_t seed);

int worker_threads();

} // namespace urnedge
