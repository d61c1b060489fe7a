#pragma once

// Direct coding of the three-term CDF expansion at zero drift, written out
// bracket by bracket from the alpha's. Shares no code with the polynomial
// pipeline beyond the moment accessors.

#include "urnedge/decomposable.hpp"

#include <cmath>
#include <numbers>

namespace urnedge::fixtures {

inline double direct_cdf(const CenteredStat& c, double u) {
    const double N = c.size();
    auto a = [&](int i, int j) { return joint_alpha(c, i, j); };
    const double a30 = a(3, 0), a21 = a(2, 1), a12 = a(1, 2), a03 = a(0, 3);
    const double a40 = a(4, 0), a22 = a(2, 2);
    const double s20sq = c.alpha_hat_product_mean(2, 0, 2, 0);
    const double s11sq = c.alpha_hat_product_mean(1, 1, 1, 1);
    const double s2002 = c.alpha_hat_product_mean(2, 0, 0, 2);

    const double phi = std::exp(-u * u / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    const double Phi = 0.5 * std::erfc(-u / std::sqrt(2.0));
    const double u2 = u * u, u3 = u2 * u, u5 = u3 * u2;

    const double first = (u2 - 1.0) / 6.0 * a30 - 0.5 * a12;
    const double second = (u5 - 10.0 * u3 + 15.0 * u) / 72.0 * a30 * a30
                          + (u3 - 3.0 * u) / 24.0 * (a40 - 3.0 * s20sq - 3.0 * a21 * a21 - 2.0 * a30 * a12)
                          + u / 8.0 * (3.0 * a12 * a12 + 2.0 * a21 * a03 - 2.0 * a22 + 4.0 * s11sq + 2.0 * s2002);
    return Phi - phi / std::sqrt(N) * first - phi / N * second;
}

} // namespace urnedge::fixtures
