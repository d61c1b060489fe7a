#pragma once

// Scalar special functions shared by the expansion and the diagnostics:
// the standard normal law and probabilists' Hermite polynomials.

#include <Eigen/Core>

#include <cmath>
#include <numbers>

namespace urnedge {

template <typename Scalar>
Scalar normal_pdf(Scalar u) {
    using std::exp;
    return exp(Scalar(-0.5) * u * u) * Scalar(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

// Evaluated through erfc on the side where it does not cancel.
template <typename Scalar>
Scalar normal_cdf(Scalar u) {
    using std::erfc;
    const Scalar z = u * Scalar(1.0 / std::numbers::sqrt2);
    if (u < Scalar(0))
        return Scalar(0.5) * erfc(-z);
    return Scalar(1) - Scalar(0.5) * erfc(z);
}

// He_0(u) .. He_order(u) by He_{v+1} = u He_v - v He_{v-1}.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hermite_he_values(int order, Scalar u) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> he(order + 1);
    he(0) = Scalar(1);
    if (order >= 1)
        he(1) = u;
    for (int v = 1; v < order; ++v)
        he(v + 1) = u * he(v) - Scalar(v) * he(v - 1);
    return he;
}

template <typename Scalar>
Scalar hermite_he(int order, Scalar u) {
    return hermite_he_values(order, u)(order);
}

} // namespace urnedge
