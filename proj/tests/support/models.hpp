#pragma once

// Random model generators shared by the property tests.

#include "urnedge/decomposable.hpp"
#include "urnedge/urn_models.hpp"

#include <random>
#include <vector>

namespace urnedge::fixtures {

inline std::vector<double> random_probs(std::mt19937_64& rng, int N) {
    std::uniform_real_distribution<double> U(0.2, 1.0);
    std::vector<double> p(N);
    double s = 0.0;
    for (double& v : p)
        s += (v = U(rng));
    for (double& v : p)
        v /= s;
    return p;
}

inline DiscreteLaw random_law(std::mt19937_64& rng, int points) {
    std::uniform_int_distribution<int> V(-3, 6);
    std::uniform_real_distribution<double> U(0.1, 1.0);
    DiscreteLaw law;
    double s = 0.0;
    for (int i = 0; i < points; ++i) {
        law.support.push_back(V(rng));
        law.probs.push_back(U(rng));
        s += law.probs.back();
    }
    for (double& p : law.probs)
        p /= s;
    return law;
}

struct RandomModel {
    GumSpec gum;
    Kernel kernel;
};

// Rotates through the three families with chi-square, cubic and compound kernels.
inline RandomModel random_model(std::mt19937_64& rng, int index) {
    std::uniform_int_distribution<int> cells(3, 10);
    const int N = cells(rng);
    switch (index % 4) {
    case 0: {
        const int n = std::uniform_int_distribution<int>(N, 3 * N)(rng);
        return {calibrate(Family::Poisson, random_probs(rng, N), n), Kernel::power(2)};
    }
    case 1: {
        std::vector<double> omega(N);
        for (double& w : omega)
            w = std::uniform_int_distribution<int>(1, 4)(rng);
        double total = 0.0;
        for (double w : omega)
            total += w;
        const int n = std::uniform_int_distribution<int>(1, static_cast<int>(total) - 1)(rng);
        std::vector<DiscreteLaw> laws;
        for (int m = 0; m < N; ++m)
            laws.push_back(random_law(rng, 3));
        return {calibrate(Family::Binomial, omega, n), Kernel::compound(laws)};
    }
    case 2: {
        std::vector<double> d(N);
        for (double& v : d)
            v = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
        const int n = std::uniform_int_distribution<int>(N, 2 * N)(rng);
        return {calibrate(Family::NegBinomial, d, n), Kernel::power(2)};
    }
    default: {
        const int n = std::uniform_int_distribution<int>(N, 2 * N)(rng);
        return {calibrate(Family::Poisson, random_probs(rng, N), n), Kernel::power(3)};
    }
    }
}

} // namespace urnedge::fixtures
