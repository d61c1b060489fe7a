#include "urnedge/diagnostics.hpp"

#include "urnedge/error.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace urnedge {

namespace {

// Visits (probability, g_m / sigma) pairs of every cell; compound kernels are
// expanded by convolving the centered increment law.
template <typename Visit>
void for_each_g(const CenteredStat& c, Visit&& visit) {
    const double sigma = c.sigma();
    for (int m = 0; m < c.size(); ++m) {
        const CellStat& cell = c.cells[m];
        if (!cell.increment) {
            for (Eigen::Index x = 0; x < cell.pmf.size(); ++x)
                visit(m, cell.pmf(x), cell.g_mean(x) / sigma);
            continue;
        }
        const DiscreteLaw& law = *cell.increment;
        const double mu = law.mean();
        // law of S_x - x mu as a list of points, built up one increment at a time
        std::vector<std::pair<double, double>> conv{{0.0, 1.0}};
        for (Eigen::Index x = 0; x < cell.pmf.size(); ++x) {
            for (const auto& [v, p] : conv)
                visit(m, cell.pmf(x) * p, (cell.g_mean(x) + v) / sigma);
            std::map<double, double> next;
            for (const auto& [v, p] : conv)
                for (std::size_t s = 0; s < law.support.size(); ++s)
                    next[v + law.support[s] - mu] += p * law.probs[s];
            conv.assign(next.begin(), next.end());
        }
    }
}

template <typename Visit>
void for_each_xi(const CenteredStat& c, Visit&& visit) {
    const double B = c.B();
    for (int m = 0; m < c.size(); ++m) {
        const CellStat& cell = c.cells[m];
        for (Eigen::Index x = 0; x < cell.pmf.size(); ++x)
            visit(m, cell.pmf(x), (static_cast<double>(x) - cell.mean) / B);
    }
}

std::string order_key(double j) {
    std::ostringstream os;
    os << j;
    return os.str();
}

} // namespace

NormMoments norm_moments(const CenteredStat& centered, double j) {
    if (!(j >= 2.0 && j <= kMaxJointOrder))
        throw Error(ErrorCode::OrderTooHigh, "normalized moments need 2 <= j <= 6");
    NormMoments out;
    for_each_g(centered, [&](int, double p, double v) { out.beta += p * std::pow(std::abs(v), j); });
    for_each_xi(centered, [&](int, double p, double v) { out.kappa += p * std::pow(std::abs(v), j); });
    return out;
}

double m_inf(const GumSpec& gum, double T, int grid_points) {
    if (!(T > 0.0))
        throw Error(ErrorCode::ConfigError, "M_N(T) needs T > 0");
    if (grid_points < 512)
        throw Error(ErrorCode::ConfigError, "M_N(T) needs at least 512 grid points");
    const double pi = std::numbers::pi;
    if (T > pi)
        return std::numeric_limits<double>::infinity();

    auto f = [&](double tau) {
        double s = 0.0;
        for (const CellLaw& cell : gum.cells)
            s += 1.0 - std::norm(cell_charfn(cell, tau));
        return s;
    };
    const double step = (pi - T) / (grid_points - 1);
    int best = 0;
    double fbest = f(T);
    for (int k = 1; k < grid_points; ++k) {
        const double v = f(T + k * step);
        if (v < fbest) {
            fbest = v;
            best = k;
        }
    }
    if (step == 0.0)
        return fbest;

    // golden-section on the bracket around the grid minimizer
    double a = T + std::max(0, best - 1) * step;
    double b = T + std::min(grid_points - 1, best + 1) * step;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-8 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - r * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + r * (b - a); f2 = f(x2);
        }
    }
    return std::min({fbest, f1, f2});
}

Lindeberg lindeberg(const CenteredStat& centered, double eps) {
    if (!(eps > 0.0))
        throw Error(ErrorCode::ConfigError, "Lindeberg threshold must be positive");
    Lindeberg out;
    for_each_g(centered, [&](int, double p, double v) {
        if (std::abs(v) > eps)
            out.L2 += p * v * v;
    });
    for_each_xi(centered, [&](int, double p, double v) {
        const double a = std::abs(v);
        if (a <= eps)
            out.script_L1 += p * a * a * a;
        else
            out.script_L2 += p * a * a;
    });
    return out;
}

BoundReport gates(const CenteredStat& centered, int s, double delta, double eps, int grid_points) {
    if (s < 3 || s > 5)
        throw Error(ErrorCode::UnsupportedOrder, "s must be 3, 4 or 5");
    if (!(delta > 0.0 && delta <= 1.0))
        throw Error(ErrorCode::ConfigError, "delta must lie in (0, 1]");

    BoundReport r;
    r.s = s;
    r.delta = delta;
    r.eps = eps;
    for (double j : {2.0, 2.0 + delta, 3.0, 4.0, static_cast<double>(s)}) {
        const NormMoments nm = norm_moments(centered, j);
        r.beta[order_key(j)] = nm.beta;
        r.kappa[order_key(j)] = nm.kappa;
    }
    const double B = centered.B();
    const double N = centered.size();

    auto E_at = [&](double kappa_2d, double& T_out, double& M_out) {
        T_out = 0.3 / (B * kappa_2d);
        M_out = m_inf(centered.gum, T_out, grid_points);
        return 1.0 / std::sqrt(M_out) + std::min(B, std::sqrt(N)) / M_out;
    };

    r.T_upsilon = 0.3 / (B * r.kappa.at("3"));
    r.M_upsilon = m_inf(centered.gum, r.T_upsilon, grid_points);
    const std::string ks = order_key(s);
    r.upsilon = r.beta.at(ks) + r.kappa.at(ks) + B * B * std::exp(-r.M_upsilon / 8.0);

    r.E_delta = E_at(r.kappa.at(order_key(2.0 + delta)), r.T_script_E, r.M_script_E);
    double T1 = 0.0, M1 = 0.0;
    r.E_one = E_at(r.kappa.at("3"), T1, M1);
    r.T_N = std::min(1.0 / r.beta.at("3"), 1.0 / r.E_one);

    r.lindeberg = lindeberg(centered, eps);
    const std::string kd = order_key(2.0 + delta);
    r.normal_approx_rhs = r.beta.at(kd) + r.kappa.at(kd) + r.E_delta;
    r.expansion_rhs_partial = r.upsilon;
    return r;
}

} // namespace urnedge
