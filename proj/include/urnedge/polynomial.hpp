#pragma once

#include <Eigen/Core>

#include <complex>
#include <utility>
#include <vector>

namespace urnedge {

// Univariate polynomials as ascending coefficient vectors. Used by the
// moment recurrences, which are exact polynomial identities in the rate or
// probability parameter.
namespace poly {

Eigen::VectorXd multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd add(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd derivative(const Eigen::VectorXd& a);
double evaluate(const Eigen::VectorXd& a, double x);

} // namespace poly

// Bivariate polynomial sum_{a,b} c(a,b) (it)^a (i tau)^b with real
// coefficients. The imaginary unit is carried by the formal variables, so the
// stored coefficients are real.
class ItPolynomial {
public:
    ItPolynomial() : coeffs_(Eigen::MatrixXd::Zero(1, 1)) {}
    explicit ItPolynomial(Eigen::MatrixXd coeffs);

    static ItPolynomial constant(double c);
    static ItPolynomial monomial(int a, int b, double c = 1.0);

    double coeff(int a, int b) const;
    void add_to(int a, int b, double c);

    // Highest power of (it) and (i tau) with a nonzero coefficient.
    int degree_t() const;
    int degree_tau() const;
    int total_degree() const;
    // Smallest a+b over nonzero coefficients; -1 for the zero polynomial.
    int min_total_degree() const;
    bool is_zero(double tol = 0.0) const;

    // Coefficients of (it)^a in a polynomial free of (i tau).
    Eigen::VectorXd t_coefficients() const;

    // Value at t with tau = 0, as a complex number (it)^a -> i^a t^a.
    std::complex<double> evaluate_at(double t) const;

    const Eigen::MatrixXd& coefficients() const { return coeffs_; }

    // Nonzero monomials as (a, b, coeff), ordered by a then b.
    std::vector<std::pair<std::pair<int, int>, double>> monomials() const;

    ItPolynomial& operator+=(const ItPolynomial& rhs);
    ItPolynomial& operator-=(const ItPolynomial& rhs);
    ItPolynomial& operator*=(double s);

    friend ItPolynomial operator+(ItPolynomial lhs, const ItPolynomial& rhs) { return lhs += rhs; }
    friend ItPolynomial operator-(ItPolynomial lhs, const ItPolynomial& rhs) { return lhs -= rhs; }
    friend ItPolynomial operator*(ItPolynomial lhs, double s) { return lhs *= s; }
    friend ItPolynomial operator*(double s, ItPolynomial rhs) { return rhs *= s; }
    friend ItPolynomial operator*(const ItPolynomial& lhs, const ItPolynomial& rhs);

private:
    void grow(int rows, int cols);
    Eigen::MatrixXd coeffs_;
};

} // namespace urnedge
