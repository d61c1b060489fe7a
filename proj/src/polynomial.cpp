#include "urnedge/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace urnedge {
namespace poly {

Eigen::VectorXd multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() == 0 || b.size() == 0)
        return Eigen::VectorXd::Zero(1);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i, b.size()) += a(i) * b;
    return out;
}

Eigen::VectorXd add(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max(a.size(), b.size()));
    out.head(a.size()) += a;
    out.head(b.size()) += b;
    return out;
}

Eigen::VectorXd derivative(const Eigen::VectorXd& a) {
    if (a.size() <= 1)
        return Eigen::VectorXd::Zero(1);
    Eigen::VectorXd out(a.size() - 1);
    for (Eigen::Index i = 1; i < a.size(); ++i)
        out(i - 1) = static_cast<double>(i) * a(i);
    return out;
}

double evaluate(const Eigen::VectorXd& a, double x) {
    double acc = 0.0;
    for (Eigen::Index i = a.size() - 1; i >= 0; --i)
        acc = acc * x + a(i);
    return acc;
}

} // namespace poly

ItPolynomial::ItPolynomial(Eigen::MatrixXd coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0)
        coeffs_ = Eigen::MatrixXd::Zero(1, 1);
}

ItPolynomial ItPolynomial::constant(double c) {
    return ItPolynomial(Eigen::MatrixXd::Constant(1, 1, c));
}

ItPolynomial ItPolynomial::monomial(int a, int b, double c) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a + 1, b + 1);
    m(a, b) = c;
    return ItPolynomial(std::move(m));
}

double ItPolynomial::coeff(int a, int b) const {
    if (a < 0 || b < 0 || a >= coeffs_.rows() || b >= coeffs_.cols())
        return 0.0;
    return coeffs_(a, b);
}

void ItPolynomial::grow(int rows, int cols) {
    if (rows <= coeffs_.rows() && cols <= coeffs_.cols())
        return;
    Eigen::MatrixXd bigger = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(rows, coeffs_.rows()),
                                                   std::max<Eigen::Index>(cols, coeffs_.cols()));
    bigger.topLeftCorner(coeffs_.rows(), coeffs_.cols()) = coeffs_;
    coeffs_.swap(bigger);
}

void ItPolynomial::add_to(int a, int b, double c) {
    grow(a + 1, b + 1);
    coeffs_(a, b) += c;
}

int ItPolynomial::degree_t() const {
    for (Eigen::Index a = coeffs_.rows() - 1; a >= 0; --a)
        if ((coeffs_.row(a).array() != 0.0).any())
            return static_cast<int>(a);
    return 0;
}

int ItPolynomial::degree_tau() const {
    for (Eigen::Index b = coeffs_.cols() - 1; b >= 0; --b)
        if ((coeffs_.col(b).array() != 0.0).any())
            return static_cast<int>(b);
    return 0;
}

int ItPolynomial::total_degree() const {
    int deg = 0;
    for (Eigen::Index a = 0; a < coeffs_.rows(); ++a)
        for (Eigen::Index b = 0; b < coeffs_.cols(); ++b)
            if (coeffs_(a, b) != 0.0)
                deg = std::max(deg, static_cast<int>(a + b));
    return deg;
}

int ItPolynomial::min_total_degree() const {
    int deg = -1;
    for (Eigen::Index a = 0; a < coeffs_.rows(); ++a)
        for (Eigen::Index b = 0; b < coeffs_.cols(); ++b)
            if (coeffs_(a, b) != 0.0 && (deg < 0 || a + b < deg))
                deg = static_cast<int>(a + b);
    return deg;
}

bool ItPolynomial::is_zero(double tol) const {
    return coeffs_.cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXd ItPolynomial::t_coefficients() const {
    return coeffs_.col(0);
}

std::complex<double> ItPolynomial::evaluate_at(double t) const {
    std::complex<double> acc = 0.0;
    const std::complex<double> it(0.0, t);
    for (Eigen::Index a = coeffs_.rows() - 1; a >= 0; --a)
        acc = acc * it + coeffs_(a, 0);
    return acc;
}

std::vector<std::pair<std::pair<int, int>, double>> ItPolynomial::monomials() const {
    std::vector<std::pair<std::pair<int, int>, double>> out;
    for (Eigen::Index a = 0; a < coeffs_.rows(); ++a)
        for (Eigen::Index b = 0; b < coeffs_.cols(); ++b)
            if (coeffs_(a, b) != 0.0)
                out.push_back({{static_cast<int>(a), static_cast<int>(b)}, coeffs_(a, b)});
    return out;
}

ItPolynomial& ItPolynomial::operator+=(const ItPolynomial& rhs) {
    grow(static_cast<int>(rhs.coeffs_.rows()), static_cast<int>(rhs.coeffs_.cols()));
    coeffs_.topLeftCorner(rhs.coeffs_.rows(), rhs.coeffs_.cols()) += rhs.coeffs_;
    return *this;
}

ItPolynomial& ItPolynomial::operator-=(const ItPolynomial& rhs) {
    grow(static_cast<int>(rhs.coeffs_.rows()), static_cast<int>(rhs.coeffs_.cols()));
    coeffs_.topLeftCorner(rhs.coeffs_.rows(), rhs.coeffs_.cols()) -= rhs.coeffs_;
    return *this;
}

ItPolynomial& ItPolynomial::operator*=(double s) {
    coeffs_ *= s;
    return *this;
}

ItPolynomial operator*(const ItPolynomial& lhs, const ItPolynomial& rhs) {
    const auto& l = lhs.coeffs_;
    const auto& r = rhs.coeffs_;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l.rows() + r.rows() - 1, l.cols() + r.cols() - 1);
    for (Eigen::Index a = 0; a < l.rows(); ++a)
        for (Eigen::Index b = 0; b < l.cols(); ++b)
            if (l(a, b) != 0.0)
                out.block(a, b, r.rows(), r.cols()) += l(a, b) * r;
    return ItPolynomial(std::move(out));
}

} // namespace urnedge
