#pragma once

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urnedge {

enum class Family { Poisson, Binomial, NegBinomial };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

// Highest central-moment order the recurrences serve.
inline constexpr int kMaxMomentOrder = 12;

// Law of one cell variable xi_m.
//   Poisson:     xi ~ Poi(nu * shape), shape = p_m
//   Binomial:    xi ~ Bi(shape, nu),  shape = omega_m (integer)
//   NegBinomial: P{xi = k} = C(k + d - 1, k) nu^k (1 - nu)^d,  shape = d_m
struct CellLaw {
    Family family = Family::Poisson;
    double shape = 1.0;
    double nu = 1.0;

    double mean() const;
    double variance() const;
    double log_pmf(int x) const;
    double pmf(int x) const;
    // Largest support point, or -1 when the support is unbounded.
    int support_max() const;
};

// A generalized urn model: N independent cell laws conditioned on their
// total being n.
struct GumSpec {
    Family family = Family::Poisson;
    std::vector<double> shapes;
    int n = 0;
    double nu = 0.0;
    std::vector<CellLaw> cells;

    double A = 0.0;  // sum of cell means
    double B2 = 0.0; // sum of cell variances
    double xN = 0.0; // (n - A) / B

    std::optional<std::string> warning;

    int size() const { return static_cast<int>(cells.size()); }
    double B() const;
};

// Chooses nu so that A = n (hence xN = 0):
//   Poisson nu = n, Binomial nu = n / sum(omega), NegBinomial nu = n / (n + sum(d)).
// Poisson weights are rescaled to sum to one; a deviation above 1e-9 sets
// GumSpec::warning.
GumSpec calibrate(Family family, std::span<const double> shapes, int n);

// Same model with an explicit nu; xN is generally nonzero.
GumSpec make_gum(Family family, std::span<const double> shapes, int n, double nu);

// Exact central moment E(xi - E xi)^k from the family recurrence.
double cell_central_moment(const CellLaw& cell, int k);

// Central moments of orders 0..k_max as one vector.
Eigen::VectorXd cell_central_moments(const CellLaw& cell, int k_max);

// Smallest x* with P{xi > x*} < tail_eps.
int truncation_point(const CellLaw& cell, double tail_eps);

// P{xi = x} for x = 0..truncation_point, not renormalized.
Eigen::VectorXd truncated_pmf(const CellLaw& cell, double tail_eps);

// Central moment by summing over the truncated support.
double cell_central_moment_brute(const CellLaw& cell, int k, double tail_eps);

std::complex<double> cell_charfn(const CellLaw& cell, double tau);

} // namespace urnedge
