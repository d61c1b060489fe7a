#include "urnedge/urn_models.hpp"

#include "urnedge/error.hpp"
#include "urnedge/polynomial.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace urnedge {

std::string_view family_name(Family family) {
    switch (family) {
    case Family::Poisson: return "poisson";
    case Family::Binomial: return "binomial";
    case Family::NegBinomial: return "negbinomial";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "poisson")
        return Family::Poisson;
    if (name == "binomial")
        return Family::Binomial;
    if (name == "negbinomial")
        return Family::NegBinomial;
    throw Error(ErrorCode::ConfigError, "unknown family '" + std::string(name) + "'");
}

double CellLaw::mean() const {
    switch (family) {
    case Family::Poisson: return nu * shape;
    case Family::Binomial: return shape * nu;
    case Family::NegBinomial: return shape * nu / (1.0 - nu);
    }
    return 0.0;
}

double CellLaw::variance() const {
    return cell_central_moment(*this, 2);
}

double CellLaw::log_pmf(int x) const {
    const double inf = std::numeric_limits<double>::infinity();
    if (x < 0)
        return -inf;
    const double k = x;
    switch (family) {
    case Family::Poisson: {
        const double lambda = nu * shape;
        if (lambda == 0.0)
            return x == 0 ? 0.0 : -inf;
        return -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    }
    case Family::Binomial: {
        const int omega = static_cast<int>(std::lround(shape));
        if (x > omega)
            return -inf;
        if (nu >= 1.0)
            return x == omega ? 0.0 : -inf;
        if (nu <= 0.0)
            return x == 0 ? 0.0 : -inf;
        return std::lgamma(omega + 1.0) - std::lgamma(k + 1.0) - std::lgamma(omega - k + 1.0)
               + k * std::log(nu) + (omega - k) * std::log1p(-nu);
    }
    case Family::NegBinomial: {
        if (nu <= 0.0)
            return x == 0 ? 0.0 : -inf;
        return std::lgamma(k + shape) - std::lgamma(shape) - std::lgamma(k + 1.0) + k * std::log(nu)
               + shape * std::log1p(-nu);
    }
    }
    return -inf;
}

double CellLaw::pmf(int x) const {
    return std::exp(log_pmf(x));
}

int CellLaw::support_max() const {
    return family == Family::Binomial ? static_cast<int>(std::lround(shape)) : -1;
}

double GumSpec::B() const {
    return std::sqrt(B2);
}

namespace {

void validate_shapes(Family family, std::span<const double> shapes, int n) {
    if (shapes.empty())
        throw Error(ErrorCode::ConfigError, "model needs at least one cell");
    if (n < 1)
        throw Error(ErrorCode::ConfigError, "conditioning total n must be >= 1");
    for (double s : shapes) {
        if (!(s > 0.0) || !std::isfinite(s))
            throw Error(ErrorCode::NonpositiveShape, "cell shape must be positive and finite");
        if (family == Family::Binomial && std::abs(s - std::round(s)) > 1e-12)
            throw Error(ErrorCode::ConfigError, "binomial stratum sizes must be integers");
    }
    if (family == Family::Binomial) {
        const double total = std::accumulate(shapes.begin(), shapes.end(), 0.0);
        if (n > total + 0.5)
            throw Error(ErrorCode::InfeasibleTotal,
                        "n = " + std::to_string(n) + " exceeds total stratum size");
    }
}

void fill_derived(GumSpec& gum) {
    gum.cells.clear();
    gum.cells.reserve(gum.shapes.size());
    gum.A = 0.0;
    gum.B2 = 0.0;
    for (double s : gum.shapes) {
        CellLaw cell{gum.family, s, gum.nu};
        gum.A += cell.mean();
        gum.B2 += cell_central_moment(cell, 2);
        gum.cells.push_back(cell);
    }
    gum.xN = gum.B2 > 0.0 ? (gum.n - gum.A) / std::sqrt(gum.B2) : 0.0;
}

} // namespace

GumSpec make_gum(Family family, std::span<const double> shapes, int n, double nu) {
    validate_shapes(family, shapes, n);
    GumSpec gum;
    gum.family = family;
    gum.shapes.assign(shapes.begin(), shapes.end());
    gum.n = n;
    gum.nu = nu;
    if (family == Family::Poisson) {
        const double total = std::accumulate(gum.shapes.begin(), gum.shapes.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "Poisson cell weights summed to " << total << "; rescaled to 1";
            gum.warning = msg.str();
        }
        for (double& p : gum.shapes)
            p /= total;
    } else if (!(nu > 0.0 && nu <= 1.0) || (family == Family::NegBinomial && nu >= 1.0)) {
        throw Error(ErrorCode::ConfigError, "nu must lie in (0, 1)");
    }
    if (family == Family::Poisson && !(nu > 0.0))
        throw Error(ErrorCode::ConfigError, "Poisson nu must be positive");
    fill_derived(gum);
    return gum;
}

GumSpec calibrate(Family family, std::span<const double> shapes, int n) {
    validate_shapes(family, shapes, n);
    const double total = std::accumulate(shapes.begin(), shapes.end(), 0.0);
    double nu = 0.0;
    switch (family) {
    case Family::Poisson: nu = n; break;
    case Family::Binomial: nu = n / total; break;
    case Family::NegBinomial: nu = n / (n + total); break;
    }
    GumSpec gum = make_gum(family, shapes, n, nu);
    // A = n holds analytically; pin the rounding residue.
    gum.xN = 0.0;
    return gum;
}

namespace {

// mu_{r+1} = r*lambda*mu_{r-1} + lambda*d(mu_r)/d(lambda), as polynomials in lambda.
const std::array<Eigen::VectorXd, kMaxMomentOrder + 1>& poisson_moment_polys() {
    static const auto table = [] {
        std::array<Eigen::VectorXd, kMaxMomentOrder + 1> mu;
        mu[0] = Eigen::VectorXd::Ones(1);
        mu[1] = Eigen::VectorXd::Zero(1);
        const Eigen::VectorXd lambda = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
        for (int r = 1; r < kMaxMomentOrder; ++r) {
            Eigen::VectorXd next = poly::multiply(lambda, poly::derivative(mu[r]));
            next = poly::add(next, static_cast<double>(r) * poly::multiply(lambda, mu[r - 1]));
            mu[r + 1] = next;
        }
        return mu;
    }();
    return table;
}

// mu_k = pq (d mu_{k-1}/dp + (k-1) omega mu_{k-2}), as polynomials in p.
Eigen::VectorXd binomial_moments(double omega, double p, int k_max) {
    std::vector<Eigen::VectorXd> mu(k_max + 1);
    mu[0] = Eigen::VectorXd::Ones(1);
    if (k_max >= 1)
        mu[1] = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd pq = (Eigen::VectorXd(3) << 0.0, 1.0, -1.0).finished();
    for (int k = 2; k <= k_max; ++k) {
        Eigen::VectorXd inner = poly::add(poly::derivative(mu[k - 1]), (k - 1) * omega * mu[k - 2]);
        mu[k] = poly::multiply(pq, inner);
    }
    Eigen::VectorXd out(k_max + 1);
    for (int k = 0; k <= k_max; ++k)
        out(k) = poly::evaluate(mu[k], p);
    return out;
}

// Central moments from cumulants kappa_2..kappa_kmax (kappa_1 ignored):
// mu_n = sum_{j=2}^{n} C(n-1, j-1) kappa_j mu_{n-j}.
Eigen::VectorXd central_from_cumulants(const Eigen::VectorXd& kappa, int k_max) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(k_max + 1);
    mu(0) = 1.0;
    for (int n = 2; n <= k_max; ++n) {
        double acc = 0.0;
        double binom = 1.0; // C(n-1, j-1) starting at j = 1
        for (int j = 2; j <= n; ++j) {
            binom = binom * (n - j + 1) / (j - 1);
            acc += binom * kappa(j) * mu(n - j);
        }
        mu(n) = acc;
    }
    return mu;
}

// kappa_1 = d rho, kappa_{r+1} = rho (1 + rho) d(kappa_r)/d(rho).
Eigen::VectorXd negbinomial_moments(double d, double rho, int k_max) {
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(k_max + 1);
    Eigen::VectorXd current = (Eigen::VectorXd(2) << 0.0, d).finished();
    const Eigen::VectorXd r1r = (Eigen::VectorXd(3) << 0.0, 1.0, 1.0).finished();
    for (int r = 1; r <= k_max; ++r) {
        kappa(r) = poly::evaluate(current, rho);
        current = poly::multiply(r1r, poly::derivative(current));
    }
    return central_from_cumulants(kappa, k_max);
}

} // namespace

Eigen::VectorXd cell_central_moments(const CellLaw& cell, int k_max) {
    if (k_max < 0 || k_max > kMaxMomentOrder)
        throw Error(ErrorCode::OrderTooHigh, "moment order " + std::to_string(k_max) + " exceeds "
                                                 + std::to_string(kMaxMomentOrder));
    switch (cell.family) {
    case Family::Poisson: {
        const double lambda = cell.nu * cell.shape;
        Eigen::VectorXd out(k_max + 1);
        for (int k = 0; k <= k_max; ++k)
            out(k) = poly::evaluate(poisson_moment_polys()[k], lambda);
        return out;
    }
    case Family::Binomial:
        return binomial_moments(std::round(cell.shape), cell.nu, k_max);
    case Family::NegBinomial:
        return negbinomial_moments(cell.shape, cell.nu / (1.0 - cell.nu), k_max);
    }
    return Eigen::VectorXd::Zero(k_max + 1);
}

double cell_central_moment(const CellLaw& cell, int k) {
    if (k < 0 || k > kMaxMomentOrder)
        throw Error(ErrorCode::OrderTooHigh, "moment order " + std::to_string(k) + " exceeds "
                                                 + std::to_string(kMaxMomentOrder));
    return cell_central_moments(cell, k)(k);
}

namespace {

// Probabilities p(0..X) plus an upper bound on the mass beyond X.
struct PmfScan {
    std::vector<double> p;
    double beyond = 0.0;
};

PmfScan scan_pmf(const CellLaw& cell, double tail_eps) {
    PmfScan scan;
    const int hard_max = cell.support_max();
    const double mean = cell.mean();
    const double sd = std::sqrt(std::max(cell.variance(), 0.0));
    const double start = mean + 10.0 * sd + 10.0;
    const double tiny = tail_eps * 1e-4;
    for (int x = 0;; ++x) {
        if (hard_max >= 0 && x > hard_max)
            break;
        scan.p.push_back(cell.pmf(x));
        if (x < 1 || x < start)
            continue;
        const double prev = scan.p[x - 1];
        const double ratio = prev > 0.0 ? scan.p[x] / prev : 0.0;
        // All three families are log-concave beyond the mode, so the ratio
        // bounds every later ratio and the tail is dominated by a geometric series.
        if (ratio < 1.0) {
            const double bound = scan.p[x] * ratio / (1.0 - ratio);
            if (bound < tiny) {
                scan.beyond = bound;
                break;
            }
        }
    }
    return scan;
}

} // namespace

int truncation_point(const CellLaw& cell, double tail_eps) {
    const PmfScan scan = scan_pmf(cell, tail_eps);
    double tail = scan.beyond; // P{xi > x} for x = last index
    int x = static_cast<int>(scan.p.size()) - 1;
    // Walk down while dropping p(x) keeps the omitted tail below tail_eps.
    while (x > 0 && tail + scan.p[x] < tail_eps) {
        tail += scan.p[x];
        --x;
    }
    return x;
}

Eigen::VectorXd truncated_pmf(const CellLaw& cell, double tail_eps) {
    const int top = truncation_point(cell, tail_eps);
    Eigen::VectorXd p(top + 1);
    for (int x = 0; x <= top; ++x)
        p(x) = cell.pmf(x);
    return p;
}

double cell_central_moment_brute(const CellLaw& cell, int k, double tail_eps) {
    const Eigen::VectorXd p = truncated_pmf(cell, tail_eps);
    const double mean = cell.mean();
    double acc = 0.0;
    for (Eigen::Index x = 0; x < p.size(); ++x)
        acc += std::pow(static_cast<double>(x) - mean, k) * p(x);
    return acc;
}

std::complex<double> cell_charfn(const CellLaw& cell, double tau) {
    const std::complex<double> e = std::polar(1.0, tau);
    switch (cell.family) {
    case Family::Poisson: {
        const double lambda = cell.nu * cell.shape;
        return std::exp(lambda * (e - 1.0));
    }
    case Family::Binomial: {
        std::complex<double> base = 1.0 - cell.nu + cell.nu * e;
        std::complex<double> acc = 1.0;
        for (long k = std::lround(cell.shape); k > 0; k >>= 1) {
            if (k & 1)
                acc *= base;
            base *= base;
        }
        return acc;
    }
    case Family::NegBinomial:
        return std::pow((1.0 - cell.nu) / (1.0 - cell.nu * e), cell.shape);
    }
    return 1.0;
}

} // namespace urnedge
