#pragma once

#include "urnedge/decomposable.hpp"
#include "urnedge/polynomial.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace urnedge {

// Polynomial P_k(t, tau) of the expansion of the joint characteristic
// function of sum_m (g_m / sigma, xi~_m / B), k in {0, 1, 2}. Coefficients use
// the alpha_{i,j,N} normalization, so the only N factors left are the
// N^{-k/2} weights applied by build_w.
ItPolynomial build_p(const CenteredStat& centered, int k);

// Gaussian tau-integration at drift x: (i tau)^b -> He_b(x).
ItPolynomial tau_integrate(const ItPolynomial& p, double x);

struct ExpansionResult {
    int s = 3;
    double xN = 0.0;
    int n_cells = 0;
    ItPolynomial W;                  // numeric W^(s)(t), N powers folded in
    std::vector<ItPolynomial> G;     // G_0 .. G_{s-3}, in (it) only
    std::vector<double> Q;           // Q_0 .. Q_{s-3}
    std::map<std::string, double> provenance; // alpha_{i,j,N} and per-cell sums used
    double Lambda = 0.0;
    double gamma = 0.0;
    double sigma = 0.0;
    double B = 0.0;

    // Mean of the statistic used for standardization: Lambda + xN * B * gamma.
    double center() const { return Lambda + xN * B * gamma; }
};

// W^(s) for s in {3, 4, 5}. Uses the model drift when x is not given.
ExpansionResult build_w(const CenteredStat& centered, int s, std::optional<double> x = std::nullopt);

// CDF expansion: Phi(u) + sum_{a>=1} c_a * (-phi(u) He_{a-1}(u)).
double cdf_expansion(const ExpansionResult& result, double u);

// d/du of cdf_expansion: phi(u) * sum_a c_a He_a(u).
double cdf_expansion_derivative(const ExpansionResult& result, double u);

struct Lattice {
    double origin = 0.0;
    double span = 1.0;
};

// Second derivative: -phi(u) * sum_a c_a He_{a+1}(u).
double cdf_expansion_second_derivative(const ExpansionResult& result, double u);

// Approximates P{R = z} by (h / sigma) * d/du W(u_z).
// Throws OffLattice when z is not origin + k * span.
double pmf_expansion(const ExpansionResult& result, double z, const Lattice& lattice);

// Sawtooth 1/2 - frac(x): +1/2 at integers, 0 at half-integers.
double sawtooth_s1(double x);

// Periodic Bernoulli term (frac(x)^2 - frac(x) + 1/6) / 2 of the second
// Euler-Maclaurin correction.
double sawtooth_s2(double x);

// CDF expansion at u plus the lattice continuity terms, with
// x = (u sigma + center - origin) / h and r = h / sigma:
//   s = 4: W(u) + r phi(u) S1(x)
//   s = 5: W(u) + r W'(u) S1(x) + r^2 W''(u) S2(x)
// The s = 5 form keeps every term of order 1/N. Needs s >= 4.
double lattice_cdf_corrected(const ExpansionResult& result, double u, const Lattice& lattice);

} // namespace urnedge
