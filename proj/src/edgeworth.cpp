#include "urnedge/edgeworth.hpp"

#include "urnedge/error.hpp"
#include "urnedge/special.hpp"

#include <cmath>

namespace urnedge {

namespace {

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i)
        b = b * (n - k + i) / i;
    return b;
}

// sum_{a+b=r} C(r, a) coeff(a, b) (it)^a (i tau)^b
ItPolynomial homogeneous(int r, auto&& coeff) {
    ItPolynomial p;
    for (int a = 0; a <= r; ++a)
        p.add_to(a, r - a, binomial(r, a) * coeff(a, r - a));
    return p;
}

} // namespace

ItPolynomial build_p(const CenteredStat& centered, int k) {
    if (k < 0 || k > 2)
        throw Error(ErrorCode::UnsupportedOrder, "only P_0, P_1, P_2 are implemented");
    if (k == 0)
        return ItPolynomial::constant(1.0);
    if (centered.cells.empty() || centered.cells.front().joint.rows() < 2 + k + 1)
        throw Error(ErrorCode::MissingMoments, "joint moments up to order " + std::to_string(k + 2) + " needed");

    // Third-order cumulants coincide with third moments (every cell is centered).
    const ItPolynomial p1 =
        homogeneous(3, [&](int a, int b) { return joint_alpha(centered, a, b); }) * (1.0 / 6.0);
    if (k == 1)
        return p1;

    // Per-cell fourth cumulant E X^4 - 3 (E X^2)^2 of X = t ghat + tau xihat:
    // (E X^2)^2 = (t^2 a20 + 2 t tau a11 + tau^2 a02)^2 expanded in t^a tau^b.
    auto squared_second = [&](int a, int b) -> double {
        // coefficient of t^a tau^b divided by C(4, a)
        double c = 0.0;
        switch (a) {
        case 4: c = centered.alpha_hat_product_mean(2, 0, 2, 0); break;
        case 3: c = 4.0 * centered.alpha_hat_product_mean(2, 0, 1, 1); break;
        case 2:
            c = 4.0 * centered.alpha_hat_product_mean(1, 1, 1, 1)
                + 2.0 * centered.alpha_hat_product_mean(2, 0, 0, 2);
            break;
        case 1: c = 4.0 * centered.alpha_hat_product_mean(1, 1, 0, 2); break;
        case 0: c = centered.alpha_hat_product_mean(0, 2, 0, 2); break;
        }
        return c / binomial(4, a) + 0.0 * b;
    };
    ItPolynomial quartic = homogeneous(4, [&](int a, int b) {
        return joint_alpha(centered, a, b) - 3.0 * squared_second(a, b);
    });
    return quartic * (1.0 / 24.0) + 0.5 * (p1 * p1);
}

ItPolynomial tau_integrate(const ItPolynomial& p, double x) {
    const int deg_tau = p.degree_tau();
    const Eigen::VectorXd he = hermite_he_values(deg_tau, x);
    const Eigen::MatrixXd& c = p.coefficients();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.rows(), 1);
    const Eigen::Index cols = std::min<Eigen::Index>(c.cols(), deg_tau + 1);
    out.col(0) = c.leftCols(cols) * he.head(cols);
    return ItPolynomial(std::move(out));
}

ExpansionResult build_w(const CenteredStat& centered, int s, std::optional<double> x) {
    if (s < 3 || s > 5)
        throw Error(ErrorCode::UnsupportedOrder, "expansion order s = " + std::to_string(s) + " not in {3, 4, 5}");

    ExpansionResult r;
    r.s = s;
    r.xN = x.value_or(centered.gum.xN);
    r.n_cells = centered.size();
    r.Lambda = centered.Lambda;
    r.gamma = centered.gamma;
    r.sigma = centered.sigma();
    r.B = centered.B();

    const int terms = s - 3;
    for (int v = 0; v <= terms; ++v)
        r.G.push_back(tau_integrate(build_p(centered, v), r.xN));

    // Reciprocal of the series sum_v h^v G_v(0): Q_0 = 1, Q_j = -sum_{v=1}^{j} G_v(0) Q_{j-v}.
    r.Q.assign(terms + 1, 0.0);
    r.Q[0] = 1.0 / r.G[0].coeff(0, 0);
    for (int j = 1; j <= terms; ++j) {
        double acc = 0.0;
        for (int v = 1; v <= j; ++v)
            acc += r.G[v].coeff(0, 0) * r.Q[j - v];
        r.Q[j] = -acc * r.Q[0];
    }

    const double h = 1.0 / std::sqrt(static_cast<double>(r.n_cells));
    ItPolynomial w;
    for (int m = 0; m <= terms; ++m) {
        ItPolynomial term;
        for (int v = 0; v <= m; ++v)
            term += r.G[v] * r.Q[m - v];
        w += term * std::pow(h, m);
    }
    r.W = w;

    if (terms >= 1) {
        for (int i = 0; i <= 3; ++i)
            r.provenance["alpha_" + std::to_string(i) + std::to_string(3 - i)] = joint_alpha(centered, i, 3 - i);
    }
    if (terms >= 2) {
        for (int i = 0; i <= 4; ++i)
            r.provenance["alpha_" + std::to_string(i) + std::to_string(4 - i)] = joint_alpha(centered, i, 4 - i);
        r.provenance["mean_hat20_sq"] = centered.alpha_hat_product_mean(2, 0, 2, 0);
        r.provenance["mean_hat11_sq"] = centered.alpha_hat_product_mean(1, 1, 1, 1);
        r.provenance["mean_hat20_hat02"] = centered.alpha_hat_product_mean(2, 0, 0, 2);
    }
    return r;
}

double cdf_expansion(const ExpansionResult& result, double u) {
    const Eigen::VectorXd c = result.W.t_coefficients();
    const int deg = static_cast<int>(c.size()) - 1;
    double value = c(0) * normal_cdf(u);
    if (deg >= 1) {
        const Eigen::VectorXd he = hermite_he_values(deg - 1, u);
        double corr = 0.0;
        for (int a = 1; a <= deg; ++a)
            corr += c(a) * he(a - 1);
        value -= normal_pdf(u) * corr;
    }
    return value;
}

double cdf_expansion_derivative(const ExpansionResult& result, double u) {
    const Eigen::VectorXd c = result.W.t_coefficients();
    const Eigen::VectorXd he = hermite_he_values(static_cast<int>(c.size()) - 1, u);
    return normal_pdf(u) * c.dot(he);
}

double cdf_expansion_second_derivative(const ExpansionResult& result, double u) {
    const Eigen::VectorXd c = result.W.t_coefficients();
    const Eigen::VectorXd he = hermite_he_values(static_cast<int>(c.size()), u);
    return -normal_pdf(u) * c.dot(he.tail(c.size()));
}

double pmf_expansion(const ExpansionResult& result, double z, const Lattice& lattice) {
    if (!(lattice.span > 0.0))
        throw Error(ErrorCode::ConfigError, "lattice span must be positive");
    const double steps = (z - lattice.origin) / lattice.span;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, std::abs(steps)))
        throw Error(ErrorCode::OffLattice, "value is not on the statistic's lattice");
    const double u = (z - result.center()) / result.sigma;
    return lattice.span / result.sigma * cdf_expansion_derivative(result, u);
}

double sawtooth_s1(double x) {
    return 0.5 - (x - std::floor(x));
}

double sawtooth_s2(double x) {
    const double f = x - std::floor(x);
    return 0.5 * (f * f - f + 1.0 / 6.0);
}

double lattice_cdf_corrected(const ExpansionResult& result, double u, const Lattice& lattice) {
    if (result.s < 4)
        throw Error(ErrorCode::UnsupportedOrder, "continuity correction needs s >= 4");
    if (!(lattice.span > 0.0))
        throw Error(ErrorCode::ConfigError, "lattice span must be positive");
    const double value = u * result.sigma + result.center();
    const double arg = (value - lattice.origin) / lattice.span;
    const double r = lattice.span / result.sigma;
    if (result.s == 4)
        return cdf_expansion(result, u) + r * normal_pdf(u) * sawtooth_s1(arg);
    return cdf_expansion(result, u) + r * cdf_expansion_derivative(result, u) * sawtooth_s1(arg)
           + r * r * cdf_expansion_second_derivative(result, u) * sawtooth_s2(arg);
}

} // namespace urnedge
