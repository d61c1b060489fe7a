#pragma once

#include "urnedge/urn_models.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <variant>
#include <vector>

namespace urnedge {

// Finite discrete law (support points with probabilities).
struct DiscreteLaw {
    std::vector<double> support;
    std::vector<double> probs;

    double mean() const;
    // Cumulants kappa_0..kappa_order (kappa_0 = 0).
    Eigen::VectorXd cumulants(int order) const;
    std::complex<double> charfn(double t) const;
};

// Validates nonnegativity, matching sizes, and total mass 1 within 1e-12.
void validate_law(const DiscreteLaw& law);

// Central moments mu_0..mu_k of the law whose cumulants are given (kappa_1 ignored).
Eigen::VectorXd central_moments_from_cumulants(const Eigen::VectorXd& kappa, int k_max);

struct PowerKernel {
    int k = 2;
};
struct IndicatorKernel {
    int r = 0;
};
struct TableKernel {
    // One table per cell, or a single table shared by every cell.
    std::vector<std::vector<double>> tables;
};
// f_m(j) is the sum of j i.i.d. draws from laws[m].
struct CompoundSumKernel {
    std::vector<DiscreteLaw> laws;
};

class Kernel {
public:
    using Variant = std::variant<PowerKernel, IndicatorKernel, TableKernel, CompoundSumKernel>;

    Kernel() : kernel_(PowerKernel{}) {}
    Kernel(Variant k) : kernel_(std::move(k)) {}

    static Kernel power(int k) { return Kernel(PowerKernel{k}); }
    static Kernel indicator(int r) { return Kernel(IndicatorKernel{r}); }
    static Kernel tables(std::vector<std::vector<double>> t) { return Kernel(TableKernel{std::move(t)}); }
    static Kernel compound(std::vector<DiscreteLaw> laws) { return Kernel(CompoundSumKernel{std::move(laws)}); }

    bool randomized() const { return std::holds_alternative<CompoundSumKernel>(kernel_); }
    const Variant& variant() const { return kernel_; }

    // Deterministic value f_m(x); throws SupportTooShort past a table's end.
    double value(int m, int x) const;
    const DiscreteLaw& increment_law(int m) const;
    // Throws when the kernel cannot serve an N-cell model.
    void check_cells(int n_cells) const;

private:
    Kernel::Variant kernel_;
};

// Per-cell tables materialized by center().
struct CellStat {
    Eigen::VectorXd pmf;     // truncated law of xi_m, renormalized, x = 0..X
    double mean = 0.0;       // E xi_m (exact)
    double mean_f = 0.0;     // E f_m(xi_m)
    Eigen::VectorXd g_mean;  // E[g_m | xi_m = x]
    Eigen::MatrixXd g_cmom;  // conditional central moments of g_m given xi_m = x, columns 0..6
    Eigen::MatrixXd joint;   // E g_m^i (xi_m - E xi_m)^j, i + j <= 6
    std::optional<DiscreteLaw> increment;
};

inline constexpr int kMaxJointOrder = 6;

struct Orthogonality {
    double residual_mean = 0.0; // sum_m E g_m(xi_m)
    double residual_cov = 0.0;  // sum_m cov(g_m(xi_m), xi_m)
};

class CenteredStat {
public:
    GumSpec gum;
    double tail_eps = 1e-12;
    double Lambda = 0.0;
    double gamma = 0.0;
    double sigma2 = 0.0;
    std::vector<CellStat> cells;

    int size() const { return gum.size(); }
    double sigma() const;
    double B() const { return gum.B(); }

    // sum_m E g_m^i xi~_m^j, unnormalized.
    double joint_sum(int i, int j) const;
    // E ghat_m^i xihat_m^j with ghat = g sqrt(N)/sigma, xihat = xi~ sqrt(N)/B.
    double alpha_hat(int m, int i, int j) const;
    // N^{-1} sum_m alpha_hat(m, i1, j1) * alpha_hat(m, i2, j2).
    double alpha_hat_product_mean(int i1, int j1, int i2, int j2) const;
};

// Centering quantities and per-cell joint moments of a decomposable statistic.
// Throws SupportTooShort, DegenerateStatistic.
CenteredStat center(const GumSpec& gum, const Kernel& kernel, double tail_eps = 1e-12);

// N^{(i+j)/2 - 1} sum_m E[(g_m / sigma)^i (xi~_m / B)^j]; i + j <= 6.
double joint_alpha(const CenteredStat& centered, int i, int j);

Orthogonality check_orthogonality(const CenteredStat& centered);

} // namespace urnedge
