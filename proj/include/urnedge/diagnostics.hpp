#pragma once

#include "urnedge/decomposable.hpp"
#include "urnedge/urn_models.hpp"

#include <map>
#include <string>

namespace urnedge {

struct NormMoments {
    double beta = 0.0;  // N^{-j/2} sum_m E|ghat_m|^j
    double kappa = 0.0; // N^{-j/2} sum_m E|xihat_m|^j
};

// Normalized absolute moments for real j in [2, 6]. Throws OrderTooHigh.
NormMoments norm_moments(const CenteredStat& centered, double j);

// inf over T <= |tau| <= pi of sum_m (1 - |E exp(i tau xi_m)|^2); +inf when T > pi.
double m_inf(const GumSpec& gum, double T, int grid_points = 1024);

struct Lindeberg {
    double L2 = 0.0;        // sum_m E (g_m/sigma)^2 1{|g_m/sigma| > eps}
    double script_L1 = 0.0; // sum_m E |xi~_m/B|^3 1{|xi~_m/B| <= eps}
    double script_L2 = 0.0; // sum_m E (xi~_m/B)^2 1{|xi~_m/B| > eps}
};

Lindeberg lindeberg(const CenteredStat& centered, double eps);

// Raw ingredients of the Berry-Esseen type bounds. The absolute constants of
// those bounds are unknown, so nothing here is a bound on the true error.
struct BoundReport {
    int s = 3;
    double delta = 1.0;
    double eps = 0.1;
    std::map<std::string, double> beta;  // keyed by order, e.g. "3", "2.5"
    std::map<std::string, double> kappa;
    double T_upsilon = 0.0;  // 0.3 / (B kappa_3)
    double M_upsilon = 0.0;  // M_N(T_upsilon)
    double T_script_E = 0.0;        // 0.3 / (B kappa_{2+delta})
    double M_script_E = 0.0;
    double upsilon = 0.0;    // beta_s + kappa_s + B^2 exp(-M_upsilon / 8)
    double E_delta = 0.0;    // at delta
    double E_one = 0.0;      // at delta = 1
    double T_N = 0.0;        // min(1/beta_3, 1/E_one)
    Lindeberg lindeberg;
    double normal_approx_rhs = 0.0;      // beta_{2+delta} + kappa_{2+delta} + E(delta)
    double expansion_rhs_partial = 0.0;  // upsilon; the oscillatory remainder integral is omitted
    bool chi_term_omitted = true;
};

BoundReport gates(const CenteredStat& centered, int s, double delta = 1.0, double eps = 0.1, int grid_points = 1024);

} // namespace urnedge
