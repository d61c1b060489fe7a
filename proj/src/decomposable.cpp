#include "urnedge/decomposable.hpp"

#include "urnedge/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace urnedge {

double DiscreteLaw::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        acc += support[i] * probs[i];
    return acc;
}

Eigen::VectorXd DiscreteLaw::cumulants(int order) const {
    const double mu = mean();
    Eigen::VectorXd central = Eigen::VectorXd::Zero(order + 1);
    for (std::size_t i = 0; i < support.size(); ++i) {
        double term = probs[i];
        for (int k = 0; k <= order; ++k) {
            central(k) += term;
            term *= support[i] - mu;
        }
    }
    // kappa_n = mu_n - sum_{j=2}^{n-2} C(n-1, j-1) kappa_j mu_{n-j}
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(order + 1);
    if (order >= 1)
        kappa(1) = mu;
    for (int n = 2; n <= order; ++n) {
        double acc = central(n);
        double binom = 1.0;
        for (int j = 2; j <= n - 2; ++j) {
            binom = binom * (n - j + 1) / (j - 1);
            acc -= binom * kappa(j) * central(n - j);
        }
        kappa(n) = acc;
    }
    return kappa;
}

std::complex<double> DiscreteLaw::charfn(double t) const {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        acc += probs[i] * std::polar(1.0, t * support[i]);
    return acc;
}

void validate_law(const DiscreteLaw& law) {
    if (law.support.empty() || law.support.size() != law.probs.size())
        throw Error(ErrorCode::ConfigError, "increment law needs matching nonempty support/probs");
    double total = 0.0;
    for (double p : law.probs) {
        if (!(p >= 0.0))
            throw Error(ErrorCode::ConfigError, "increment probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorCode::ConfigError, "increment probabilities must sum to 1");
}

Eigen::VectorXd central_moments_from_cumulants(const Eigen::VectorXd& kappa, int k_max) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(k_max + 1);
    mu(0) = 1.0;
    for (int n = 2; n <= k_max; ++n) {
        double acc = 0.0;
        double binom = 1.0;
        for (int j = 2; j <= n; ++j) {
            binom = binom * (n - j + 1) / (j - 1);
            acc += binom * kappa(j) * mu(n - j);
        }
        mu(n) = acc;
    }
    return mu;
}

double Kernel::value(int m, int x) const {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, PowerKernel>) {
                return std::pow(static_cast<double>(x), k.k);
            } else if constexpr (std::is_same_v<K, IndicatorKernel>) {
                return x == k.r ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<K, TableKernel>) {
                const auto& table = k.tables.size() == 1 ? k.tables[0] : k.tables.at(m);
                if (x < 0 || x >= static_cast<int>(table.size()))
                    throw Error(ErrorCode::SupportTooShort,
                                "kernel table of cell " + std::to_string(m) + " has no entry for x = "
                                    + std::to_string(x));
                return table[x];
            } else {
                throw Error(ErrorCode::ConfigError, "compound-sum kernel has no deterministic value");
            }
        },
        kernel_);
}

const DiscreteLaw& Kernel::increment_law(int m) const {
    const auto* compound = std::get_if<CompoundSumKernel>(&kernel_);
    if (!compound)
        throw Error(ErrorCode::ConfigError, "kernel is not a compound sum");
    return compound->laws.size() == 1 ? compound->laws[0] : compound->laws.at(m);
}

void Kernel::check_cells(int n_cells) const {
    if (const auto* t = std::get_if<TableKernel>(&kernel_)) {
        if (t->tables.size() != 1 && static_cast<int>(t->tables.size()) != n_cells)
            throw Error(ErrorCode::ConfigError, "kernel needs one table per cell (or a single shared table)");
    } else if (const auto* c = std::get_if<CompoundSumKernel>(&kernel_)) {
        if (c->laws.size() != 1 && static_cast<int>(c->laws.size()) != n_cells)
            throw Error(ErrorCode::ConfigError, "kernel needs one increment law per cell (or a single shared law)");
        for (const auto& law : c->laws)
            validate_law(law);
    } else if (const auto* p = std::get_if<PowerKernel>(&kernel_)) {
        if (p->k < 0)
            throw Error(ErrorCode::ConfigError, "power kernel needs k >= 0");
    }
}

double CenteredStat::sigma() const {
    return std::sqrt(sigma2);
}

double CenteredStat::joint_sum(int i, int j) const {
    if (i < 0 || j < 0 || i + j > kMaxJointOrder)
        throw Error(ErrorCode::OrderTooHigh, "joint moment order exceeds " + std::to_string(kMaxJointOrder));
    double acc = 0.0;
    for (const auto& cell : cells)
        acc += cell.joint(i, j);
    return acc;
}

double CenteredStat::alpha_hat(int m, int i, int j) const {
    if (i < 0 || j < 0 || i + j > kMaxJointOrder)
        throw Error(ErrorCode::OrderTooHigh, "joint moment order exceeds " + std::to_string(kMaxJointOrder));
    const double n_cells = size();
    return std::pow(n_cells, 0.5 * (i + j)) * cells[m].joint(i, j) / std::pow(sigma(), i) / std::pow(B(), j);
}

double CenteredStat::alpha_hat_product_mean(int i1, int j1, int i2, int j2) const {
    double acc = 0.0;
    for (int m = 0; m < size(); ++m)
        acc += alpha_hat(m, i1, j1) * alpha_hat(m, i2, j2);
    return acc / size();
}

namespace {

// Conditional law of f_m(xi_m) given xi_m = x: mean and central moments 0..6.
struct Conditional {
    double mean = 0.0;
    Eigen::Matrix<double, kMaxJointOrder + 1, 1> cmom = Eigen::Matrix<double, kMaxJointOrder + 1, 1>::Zero();
};

Conditional conditional_f(const Kernel& kernel, int m, int x, const Eigen::VectorXd* increment_kappa) {
    Conditional c;
    c.cmom(0) = 1.0;
    if (!increment_kappa) {
        c.mean = kernel.value(m, x);
        return c;
    }
    // Sum of x i.i.d. increments: cumulants scale by x.
    const Eigen::VectorXd kappa = static_cast<double>(x) * (*increment_kappa);
    c.mean = kappa(1);
    c.cmom = central_moments_from_cumulants(kappa, kMaxJointOrder);
    return c;
}

// E[(Y - a)^i] for Y with mean m and central moments cmom: sum_k C(i,k) cmom_k (m - a)^{i-k}.
double shifted_moment(const Eigen::Matrix<double, kMaxJointOrder + 1, 1>& cmom, double shift, int i) {
    double acc = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= i; ++k) {
        if (k > 0)
            binom = binom * (i - k + 1) / k;
        acc += binom * cmom(k) * std::pow(shift, i - k);
    }
    return acc;
}

} // namespace

CenteredStat center(const GumSpec& gum, const Kernel& kernel, double tail_eps) {
    if (!(tail_eps > 0.0 && tail_eps <= 1e-6))
        throw Error(ErrorCode::ConfigError, "tail_eps must lie in (0, 1e-6]");
    kernel.check_cells(gum.size());
    if (!(gum.B2 > 0.0))
        throw Error(ErrorCode::DegenerateStatistic, "cell variances vanish (B_N = 0)");

    CenteredStat out;
    out.gum = gum;
    out.tail_eps = tail_eps;
    const int n_cells = gum.size();
    out.cells.resize(n_cells);

    // Pass 1: E f_m, cov(f_m, xi_m), conditional laws of f_m.
    std::vector<std::vector<Conditional>> cond(n_cells);
    double cov_total = 0.0;
    double var_f_total = 0.0;
    for (int m = 0; m < n_cells; ++m) {
        CellStat& cell = out.cells[m];
        const CellLaw& law = gum.cells[m];
        Eigen::VectorXd pmf = truncated_pmf(law, tail_eps);
        pmf /= pmf.sum();
        cell.pmf = pmf;
        cell.mean = law.mean();

        std::optional<Eigen::VectorXd> kappa;
        if (kernel.randomized()) {
            cell.increment = kernel.increment_law(m);
            kappa = cell.increment->cumulants(kMaxJointOrder);
        }
        cond[m].reserve(pmf.size());
        for (Eigen::Index x = 0; x < pmf.size(); ++x)
            cond[m].push_back(conditional_f(kernel, m, static_cast<int>(x), kappa ? &*kappa : nullptr));

        double ef = 0.0;
        for (Eigen::Index x = 0; x < pmf.size(); ++x)
            ef += pmf(x) * cond[m][x].mean;
        double cov = 0.0;
        double var = 0.0;
        for (Eigen::Index x = 0; x < pmf.size(); ++x) {
            const double d = cond[m][x].mean - ef;
            cov += pmf(x) * d * (static_cast<double>(x) - cell.mean);
            var += pmf(x) * (d * d + cond[m][x].cmom(2));
        }
        cell.mean_f = ef;
        out.Lambda += ef;
        cov_total += cov;
        var_f_total += var;
    }
    out.gamma = cov_total / gum.B2;

    // Pass 2: g tables and joint moments.
    for (int m = 0; m < n_cells; ++m) {
        CellStat& cell = out.cells[m];
        const Eigen::Index size = cell.pmf.size();
        cell.g_mean.resize(size);
        cell.g_cmom.resize(size, kMaxJointOrder + 1);
        cell.joint = Eigen::MatrixXd::Zero(kMaxJointOrder + 1, kMaxJointOrder + 1);
        for (Eigen::Index x = 0; x < size; ++x) {
            const double dx = static_cast<double>(x) - cell.mean;
            const double gm = cond[m][x].mean - cell.mean_f - out.gamma * dx;
            cell.g_mean(x) = gm;
            cell.g_cmom.row(x) = cond[m][x].cmom.transpose();
            for (int i = 0; i <= kMaxJointOrder; ++i) {
                const double gi = shifted_moment(cond[m][x].cmom, gm, i);
                double dxj = 1.0;
                for (int j = 0; i + j <= kMaxJointOrder; ++j) {
                    cell.joint(i, j) += cell.pmf(x) * gi * dxj;
                    dxj *= dx;
                }
            }
        }
        out.sigma2 += cell.joint(2, 0);
    }

    const double scale = std::max(var_f_total, std::numeric_limits<double>::min());
    if (!(out.sigma2 > 1e-14 * scale))
        throw Error(ErrorCode::DegenerateStatistic,
                    "residual variance sigma_N^2 = " + std::to_string(out.sigma2) + " vanishes");
    return out;
}

double joint_alpha(const CenteredStat& centered, int i, int j) {
    if (i < 0 || j < 0 || i + j > kMaxJointOrder)
        throw Error(ErrorCode::OrderTooHigh, "joint moment order exceeds " + std::to_string(kMaxJointOrder));
    const double n_cells = centered.size();
    return std::pow(n_cells, 0.5 * (i + j) - 1.0) * centered.joint_sum(i, j) / std::pow(centered.sigma(), i)
           / std::pow(centered.B(), j);
}

Orthogonality check_orthogonality(const CenteredStat& centered) {
    Orthogonality out;
    for (const auto& cell : centered.cells) {
        for (Eigen::Index x = 0; x < cell.pmf.size(); ++x) {
            out.residual_mean += cell.pmf(x) * cell.g_mean(x);
            out.residual_cov += cell.pmf(x) * cell.g_mean(x) * (static_cast<double>(x) - cell.mean);
        }
    }
    return out;
}

} // namespace urnedge
