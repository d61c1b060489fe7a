#include "urnedge/oracle.hpp"

#include "urnedge/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

namespace urnedge {

double ExactDist::cdf(double z) const {
    double acc = 0.0;
    for (const auto& [v, p] : values) {
        if (v > z)
            break;
        acc += p;
    }
    return acc;
}

double ExactDist::mean() const {
    double m = 0.0;
    for (const auto& [v, p] : values)
        m += v * p;
    return m;
}

double ExactDist::variance() const {
    const double m = mean();
    double s = 0.0;
    for (const auto& [v, p] : values)
        s += (v - m) * (v - m) * p;
    return s;
}

std::complex<double> ExactDist::charfn(double t, double shift, double scale) const {
    std::complex<double> acc = 0.0;
    for (const auto& [v, p] : values)
        acc += p * std::polar(1.0, t * (v - shift) / scale);
    return acc;
}

namespace {

// Best rational approximation with denominator <= max_den, via continued fractions.
std::pair<long long, long long> rationalize(double x, long long max_den, double tol) {
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(r);
        const long long ai = static_cast<long long>(a);
        const long long p2 = ai * p1 + p0;
        const long long q2 = ai * q1 + q0;
        if (q2 > max_den)
            break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::abs(x - static_cast<double>(p1) / q1) <= tol * std::max(1.0, std::abs(x)))
            break;
        const double frac = r - a;
        if (frac < 1e-15)
            break;
        r = 1.0 / frac;
    }
    return {p1, q1};
}

bool on_lattice(double v, double q, double rel_tol) {
    // the residual is measured in units of q; the second term absorbs rounding in v / q
    const double k = v / q;
    return std::abs(k - std::round(k)) <= rel_tol + 64.0 * std::numeric_limits<double>::epsilon() * std::abs(k);
}

} // namespace

std::optional<double> common_quantum(const std::vector<double>& values, double rel_tol, int max_ratio) {
    double scale = 0.0;
    for (double v : values)
        scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        return 1.0;
    double vmin = scale;
    for (double v : values)
        if (std::abs(v) > scale * 1e-12)
            vmin = std::min(vmin, std::abs(v));

    long long denom = 1;
    for (double v : values) {
        if (std::abs(v) <= scale * 1e-12)
            continue;
        const auto [p, q] = rationalize(std::abs(v) / vmin, max_ratio, rel_tol);
        if (q == 0)
            return std::nullopt;
        denom = std::lcm(denom, q);
        if (denom > max_ratio)
            return std::nullopt;
    }
    const double q = vmin / static_cast<double>(denom);
    for (double v : values)
        if (!on_lattice(v, q, rel_tol))
            return std::nullopt;
    return q;
}

namespace {

// Per cell and per occupancy x: the law of f_m(x) as integer offsets on the
// q-lattice relative to base = sum_m f_m(0).
struct CellContribution {
    Eigen::VectorXd weight;                    // P{xi_m = x}
    std::vector<long long> lo;                 // smallest value index for x
    std::vector<std::vector<double>> probs;    // dense law over lo[x] ..
};

long long to_index(double v, double q, bool binning) {
    const double k = v / q;
    const double r = std::round(k);
    if (!binning && std::abs(k - r) > 1e-9 * std::max(1.0, std::abs(k)))
        throw Error(ErrorCode::NonRepresentableValues, "kernel value off the q_v lattice");
    return static_cast<long long>(r);
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

int cell_window(const CellLaw& cell, double tail_eps, int n) {
    return std::min(truncation_point(cell, tail_eps), n);
}

} // namespace

ExactDist exact_pmf(const GumSpec& gum, const Kernel& kernel, double tail_eps, std::optional<double> qv,
                    std::size_t budget) {
    if (!(tail_eps > 0.0 && tail_eps <= 1e-6))
        throw Error(ErrorCode::ConfigError, "tail_eps must lie in (0, 1e-6]");
    const int N = gum.size();
    const int n = gum.n;
    kernel.check_cells(N);

    std::vector<int> window(N);
    for (int m = 0; m < N; ++m)
        window[m] = cell_window(gum.cells[m], tail_eps, n);

    // Lattice of the statistic values.
    double base = 0.0;
    std::vector<double> lattice_values;
    for (int m = 0; m < N; ++m) {
        if (kernel.randomized()) {
            for (double y : kernel.increment_law(m).support)
                lattice_values.push_back(y);
        } else {
            const double f0 = kernel.value(m, 0);
            base += f0;
            for (int x = 1; x <= window[m]; ++x)
                lattice_values.push_back(kernel.value(m, x) - f0);
        }
    }
    double q = 0.0;
    if (qv) {
        if (!(*qv > 0.0))
            throw Error(ErrorCode::ConfigError, "q_v must be positive");
        q = *qv;
    } else {
        const auto detected = common_quantum(lattice_values);
        if (!detected)
            throw Error(ErrorCode::NonRepresentableValues,
                        "kernel values are not commensurable; supply q_v to bin them");
        q = *detected;
    }
    const bool binning = qv.has_value();

    std::vector<CellContribution> contrib(N);
    for (int m = 0; m < N; ++m) {
        CellContribution& c = contrib[m];
        c.weight = truncated_pmf(gum.cells[m], tail_eps).head(window[m] + 1);
        if (kernel.randomized()) {
            const DiscreteLaw& law = kernel.increment_law(m);
            std::vector<long long> idx;
            for (double y : law.support)
                idx.push_back(to_index(y, q, binning));
            const long long ilo = *std::min_element(idx.begin(), idx.end());
            const long long ihi = *std::max_element(idx.begin(), idx.end());
            std::vector<double> inc(ihi - ilo + 1, 0.0);
            for (std::size_t s = 0; s < idx.size(); ++s)
                inc[idx[s] - ilo] += law.probs[s];
            std::vector<double> conv{1.0};
            for (int x = 0; x <= window[m]; ++x) {
                c.lo.push_back(ilo * x);
                c.probs.push_back(conv);
                conv = convolve(conv, inc);
            }
        } else {
            const double f0 = kernel.value(m, 0);
            for (int x = 0; x <= window[m]; ++x) {
                c.lo.push_back(to_index(kernel.value(m, x) - f0, q, binning));
                c.probs.push_back({1.0});
            }
        }
    }

    // DP over cells: for every partial total k <= n a dense slab of value indices.
    std::vector<long long> lo(n + 1, 0), hi(n + 1, -1);
    std::vector<std::vector<double>> slab(n + 1);
    lo[0] = 0;
    hi[0] = 0;
    slab[0] = {1.0};
    for (int m = 0; m < N; ++m) {
        const CellContribution& c = contrib[m];
        std::vector<long long> nlo(n + 1, 0), nhi(n + 1, -1);
        for (int k = 0; k <= n; ++k) {
            if (hi[k] < lo[k])
                continue;
            for (int x = 0; x <= window[m] && k + x <= n; ++x) {
                const long long a = lo[k] + c.lo[x];
                const long long b = hi[k] + c.lo[x] + static_cast<long long>(c.probs[x].size()) - 1;
                if (nhi[k + x] < nlo[k + x]) {
                    nlo[k + x] = a;
                    nhi[k + x] = b;
                } else {
                    nlo[k + x] = std::min(nlo[k + x], a);
                    nhi[k + x] = std::max(nhi[k + x], b);
                }
            }
        }
        std::size_t states = 0;
        for (int k = 0; k <= n; ++k)
            if (nhi[k] >= nlo[k])
                states += static_cast<std::size_t>(nhi[k] - nlo[k] + 1);
        if (states > budget)
            throw Error(ErrorCode::StateBudgetExceeded,
                        "DP needs " + std::to_string(states) + " (value, total) states at cell " +
                            std::to_string(m + 1) + ", budget " + std::to_string(budget));

        std::vector<std::vector<double>> next(n + 1);
        for (int k = 0; k <= n; ++k)
            if (nhi[k] >= nlo[k])
                next[k].assign(nhi[k] - nlo[k] + 1, 0.0);
        for (int k = 0; k <= n; ++k) {
            if (hi[k] < lo[k])
                continue;
            const std::vector<double>& src = slab[k];
            for (int x = 0; x <= window[m] && k + x <= n; ++x) {
                const double w = c.weight(x);
                if (w == 0.0)
                    continue;
                std::vector<double>& dst = next[k + x];
                const long long off = lo[k] + c.lo[x] - nlo[k + x];
                const std::vector<double>& vals = c.probs[x];
                for (std::size_t v = 0; v < src.size(); ++v) {
                    const double p = src[v] * w;
                    if (p == 0.0)
                        continue;
                    double* out = dst.data() + off + static_cast<long long>(v);
                    for (std::size_t s = 0; s < vals.size(); ++s)
                        out[s] += p * vals[s];
                }
            }
        }
        slab = std::move(next);
        lo = std::move(nlo);
        hi = std::move(nhi);
    }

    ExactDist dist;
    dist.tail_eps = tail_eps;
    dist.q_v = q;
    if (hi[n] < lo[n])
        throw Error(ErrorCode::InfeasibleTotal, "P{zeta = n} is zero");
    const std::vector<double>& last = slab[n];
    double mass = 0.0;
    for (double p : last)
        mass += p;
    if (!(mass > 0.0))
        throw Error(ErrorCode::InfeasibleTotal, "P{zeta = n} underflows");
    dist.local_mass = mass;

    long long span_idx = 0;
    long long first_idx = 0;
    bool have_first = false;
    for (std::size_t v = 0; v < last.size(); ++v) {
        if (last[v] <= 0.0)
            continue;
        const long long idx = lo[n] + static_cast<long long>(v);
        if (!have_first) {
            first_idx = idx;
            have_first = true;
        } else {
            span_idx = std::gcd(span_idx, idx - first_idx);
        }
        dist.values.emplace_back(base + q * static_cast<double>(idx), last[v] / mass);
    }
    dist.z0 = dist.values.front().first;
    dist.h = span_idx == 0 ? q : q * static_cast<double>(span_idx);
    for (const auto& vp : dist.values)
        dist.total_prob_check += vp.second;
    return dist;
}

double local_prob(const GumSpec& gum, double tail_eps) {
    if (!(tail_eps > 0.0 && tail_eps <= 1e-6))
        throw Error(ErrorCode::ConfigError, "tail_eps must lie in (0, 1e-6]");
    const int n = gum.n;
    std::vector<double> acc(n + 1, 0.0);
    acc[0] = 1.0;
    for (const CellLaw& cell : gum.cells) {
        const int w = cell_window(cell, tail_eps, n);
        const Eigen::VectorXd pmf = truncated_pmf(cell, tail_eps);
        std::vector<double> next(n + 1, 0.0);
        for (int k = 0; k <= n; ++k) {
            if (acc[k] == 0.0)
                continue;
            for (int x = 0; x <= w && k + x <= n; ++x)
                next[k + x] += acc[k] * pmf(x);
        }
        acc = std::move(next);
    }
    return acc[n];
}

namespace {

// Per cell, a(x) = P{xi = x} E[exp(i t g_m / sigma) | xi = x] on the truncated window.
std::vector<Eigen::VectorXcd> cell_coefficients(const CenteredStat& c, double t) {
    const double sigma = c.sigma();
    std::vector<Eigen::VectorXcd> out;
    out.reserve(c.cells.size());
    for (const CellStat& cell : c.cells) {
        const Eigen::Index X = cell.pmf.size();
        Eigen::VectorXcd a(X);
        std::complex<double> inc_factor = 1.0;
        if (cell.increment) {
            const DiscreteLaw& law = *cell.increment;
            inc_factor = law.charfn(t / sigma) * std::polar(1.0, -t * law.mean() / sigma);
        }
        std::complex<double> power = 1.0;
        for (Eigen::Index x = 0; x < X; ++x) {
            a(x) = cell.pmf(x) * std::polar(1.0, t * cell.g_mean(x) / sigma) * power;
            power *= inc_factor;
        }
        out.push_back(std::move(a));
    }
    return out;
}

// Trapezoid sum over P equispaced tau in [-pi, pi) of prod_m sum_x a_m(x) e^{i tau (x - n/N ...)}.
// The phase e^{-i tau n} is folded in so the integrand is 2 pi periodic.
std::complex<double> theta(const std::vector<Eigen::VectorXcd>& coeffs, int n, int panels) {
    std::complex<double> acc = 0.0;
    const double step = 2.0 * std::numbers::pi / panels;
    for (int j = 0; j < panels; ++j) {
        const double tau = -std::numbers::pi + j * step;
        const std::complex<double> e = std::polar(1.0, tau);
        std::complex<double> prod = std::polar(1.0, -tau * n);
        for (const Eigen::VectorXcd& a : coeffs) {
            // Horner in e^{i tau}
            std::complex<double> s = 0.0;
            for (Eigen::Index x = a.size() - 1; x >= 0; --x)
                s = s * e + a(x);
            prod *= s;
        }
        acc += prod;
    }
    return acc / static_cast<double>(panels);
}

} // namespace

std::complex<double> conditional_charfn(const CenteredStat& centered, double t, const QuadSpec& quad) {
    if (t == 0.0)
        return {1.0, 0.0};
    const auto num_coeffs = cell_coefficients(centered, t);
    const auto den_coeffs = cell_coefficients(centered, 0.0);
    const int n = centered.gum.n;

    int panels = std::max(8, quad.initial_panels);
    std::complex<double> prev = theta(num_coeffs, n, panels) / theta(den_coeffs, n, panels);
    int agreements = 0;
    while (panels < quad.max_panels) {
        panels *= 2;
        const std::complex<double> cur = theta(num_coeffs, n, panels) / theta(den_coeffs, n, panels);
        if (std::abs(cur - prev) <= quad.rel_tol * std::max(1.0, std::abs(cur))) {
            if (++agreements == 2)
                return cur;
        } else {
            agreements = 0;
        }
        prev = cur;
    }
    throw Error(ErrorCode::QuadratureNotConverged,
                "tau quadrature did not settle within " + std::to_string(quad.max_panels) + " panels");
}

// ---- sampling ------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

double uniform01(Rng& rng) {
    return std::generate_canonical<double, 53>(rng);
}

// Inverse-CDF draw from an unnormalized pmf on lo..hi given by its log at the
// mode and successive ratios w(j+1)/w(j). Walks outward from the mode so the
// weights never underflow before they become negligible.
template <typename Ratio>
int draw_unimodal(Rng& rng, int lo, int hi, int mode, Ratio ratio) {
    std::vector<double> w(hi - lo + 1, 0.0);
    w[mode - lo] = 1.0;
    double total = 1.0;
    for (int j = mode; j < hi; ++j) {
        w[j + 1 - lo] = w[j - lo] * ratio(j);
        total += w[j + 1 - lo];
        if (w[j + 1 - lo] < 1e-300)
            break;
    }
    for (int j = mode; j > lo; --j) {
        const double r = ratio(j - 1);
        w[j - 1 - lo] = r > 0.0 ? w[j - lo] / r : 0.0;
        total += w[j - 1 - lo];
        if (w[j - 1 - lo] < 1e-300)
            break;
    }
    double u = uniform01(rng) * total;
    for (int j = lo; j <= hi; ++j) {
        u -= w[j - lo];
        if (u < 0.0)
            return j;
    }
    return mode;
}

int draw_binomial(Rng& rng, int trials, double p) {
    if (trials == 0 || p <= 0.0)
        return 0;
    if (p >= 1.0)
        return trials;
    const int mode = std::min(trials, static_cast<int>(std::floor((trials + 1) * p)));
    return draw_unimodal(rng, 0, trials, mode,
                         [&](int j) { return (trials - j) / (j + 1.0) * p / (1.0 - p); });
}

// Successes among `draws` taken without replacement from a population of
// `total` containing `good` successes.
int draw_hypergeometric(Rng& rng, int draws, int good, int total) {
    const int bad = total - good;
    const int lo = std::max(0, draws - bad);
    const int hi = std::min(draws, good);
    if (lo == hi)
        return lo;
    const int mode = std::clamp(static_cast<int>(std::floor((draws + 1.0) * (good + 1.0) / (total + 2.0))), lo, hi);
    return draw_unimodal(rng, lo, hi, mode, [&](int j) {
        return static_cast<double>(good - j) * (draws - j) / ((j + 1.0) * (bad - draws + j + 1.0));
    });
}

// Balls of `draws` falling into a cell of weight d among Polya urn weight
// total D: beta-binomial(draws, d, D - d).
int draw_polya(Rng& rng, int draws, double d, double total) {
    const double rest = total - d;
    if (draws == 0)
        return 0;
    if (rest <= 0.0)
        return draws;
    auto ratio = [&](int j) { return (draws - j) * (d + j) / ((j + 1.0) * (rest + draws - j - 1.0)); };
    // mode: first j where the ratio drops below 1
    int mode = 0;
    while (mode < draws && ratio(mode) >= 1.0)
        ++mode;
    return draw_unimodal(rng, 0, draws, mode, ratio);
}

std::vector<int> occupancy(const GumSpec& gum, Rng& rng) {
    const int N = gum.size();
    std::vector<int> eta(N, 0);
    int left = gum.n;
    double rest = 0.0;
    for (double s : gum.shapes)
        rest += s;
    for (int m = 0; m < N && left > 0; ++m) {
        const double shape = gum.shapes[m];
        if (m == N - 1) {
            eta[m] = left;
            break;
        }
        switch (gum.family) {
        case Family::Poisson:
            eta[m] = draw_binomial(rng, left, std::min(1.0, shape / rest));
            break;
        case Family::Binomial:
            eta[m] = draw_hypergeometric(rng, left, static_cast<int>(std::lround(shape)),
                                         static_cast<int>(std::lround(rest)));
            break;
        case Family::NegBinomial:
            eta[m] = draw_polya(rng, left, shape, rest);
            break;
        }
        left -= eta[m];
        rest -= shape;
    }
    return eta;
}

double draw_increment(Rng& rng, const DiscreteLaw& law) {
    double u = uniform01(rng);
    for (std::size_t s = 0; s + 1 < law.probs.size(); ++s) {
        u -= law.probs[s];
        if (u < 0.0)
            return law.support[s];
    }
    return law.support.back();
}

constexpr long long kBlock = 4096;

} // namespace

int worker_threads() {
    int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("URNEDGE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1)
            cap = v;
    }
    return cap;
}

std::vector<int> sample_occupancy(const GumSpec& gum, std::uint64_t seed) {
    Rng rng(splitmix64(seed));
    return occupancy(gum, rng);
}

ExactDist sample(const GumSpec& gum, const Kernel& kernel, long long reps, std::uint64_t seed) {
    if (reps < 1)
        throw Error(ErrorCode::ConfigError, "reps must be >= 1");
    const int N = gum.size();
    kernel.check_cells(N);
    for (int m = 0; m < N; ++m)
        if (gum.family == Family::Binomial && std::abs(gum.shapes[m] - std::round(gum.shapes[m])) > 0)
            throw Error(ErrorCode::ConfigError, "binomial shapes must be integers");

    const long long blocks = (reps + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> results(blocks);
    auto run_block = [&](long long b) {
        Rng rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(b))));
        const long long count = std::min(kBlock, reps - b * kBlock);
        std::vector<double>& out = results[b];
        out.reserve(count);
        for (long long r = 0; r < count; ++r) {
            const std::vector<int> eta = occupancy(gum, rng);
            double stat = 0.0;
            for (int m = 0; m < N; ++m) {
                if (kernel.randomized()) {
                    const DiscreteLaw& law = kernel.increment_law(m);
                    for (int j = 0; j < eta[m]; ++j)
                        stat += draw_increment(rng, law);
                } else {
                    stat += kernel.value(m, eta[m]);
                }
            }
            out.push_back(stat);
        }
    };

    const int threads = static_cast<int>(std::min<long long>(worker_threads(), blocks));
    if (threads <= 1) {
        for (long long b = 0; b < blocks; ++b)
            run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (long long b = w; b < blocks; b += threads)
                        run_block(b);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    std::map<double, long long> counts;
    for (const auto& block : results)
        for (double v : block)
            ++counts[v];

    ExactDist dist;
    dist.seed = seed;
    dist.reps = reps;
    std::vector<double> diffs;
    for (const auto& [v, c] : counts) {
        dist.values.emplace_back(v, static_cast<double>(c) / static_cast<double>(reps));
        diffs.push_back(v - counts.begin()->first);
    }
    for (const auto& vp : dist.values)
        dist.total_prob_check += vp.second;
    dist.z0 = dist.values.front().first;
    dist.h = common_quantum(diffs).value_or(0.0);
    if (dist.values.size() == 1)
        dist.h = 0.0;
    return dist;
}

} // namespace urnedge
