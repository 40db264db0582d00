#pragma once

// Leading-order expansion of C(e,p,q) in powers of e.
//
// Along the resonant track, with z = exp(iF) and e = 2 beta / (1 + beta^2),
//   r / a           = (1 + beta^2)^-1 (1 - beta z^-q)(1 - beta z^q)
//   exp(i n theta)  = phase * z^{n(q-p)} (1 - beta z^-q)^n (1 - beta z^q)^-n exp(+-(e n p / 2q)(z^q - z^-q))
// (z^{n(p+q)} and the opposite exponential sign for retrograde tracks). Radial
// Taylor shifts r = a(1 + delta) are written as (1 + delta)^D with D = alpha d/dalpha
// acting on Laplace coefficients, so every Laurent coefficient of the integrand
// becomes an e-series whose coefficients are polynomials in D. Only constant
// Laurent terms survive the F-integral.

#include <cstddef>
#include <vector>

#include "resorb/perturbation.hpp"

namespace resorb {

/// slope * D + offset.
struct Affine {
    long double slope = 0;
    long double offset = 0;
};

/// Polynomial sum_j c_j D^j in the operator D = alpha d/dalpha. Acting on alpha^k it
/// multiplies by the ordinary polynomial value at k.
class OperatorPolynomial {
public:
    OperatorPolynomial() = default;
    explicit OperatorPolynomial(std::vector<long double> coefficients);

    static OperatorPolynomial constant(long double c);
    static OperatorPolynomial affine(Affine x);
    /// binom(x, j) = x (x - 1) ... (x - j + 1) / j!
    static OperatorPolynomial binomial(Affine x, int j);

    [[nodiscard]] int degree() const;
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] const std::vector<long double>& coefficients() const { return c_; }
    /// Value at D = k, i.e. the eigenvalue on alpha^k.
    [[nodiscard]] long double evaluate(long double k) const;

    OperatorPolynomial& operator+=(const OperatorPolynomial& o);
    OperatorPolynomial& operator*=(long double s);
    friend OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b) { return a += b; }
    friend OperatorPolynomial operator*(OperatorPolynomial a, long double s) { return a *= s; }
    friend OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b);

private:
    void trim();
    std::vector<long double> c_;
};

/// Power series in e truncated after e^order; coefficients are operator polynomials
/// (plain numbers are constant polynomials).
class ESeries {
public:
    explicit ESeries(int order);
    static ESeries scalar(std::vector<long double> coefficients, int order);

    [[nodiscard]] int order() const { return static_cast<int>(c_.size()) - 1; }
    [[nodiscard]] const OperatorPolynomial& operator[](int m) const { return c_.at(static_cast<std::size_t>(m)); }
    OperatorPolynomial& operator[](int m) { return c_.at(static_cast<std::size_t>(m)); }
    /// Lowest power with a nonzero coefficient, or -1 when the series vanishes.
    [[nodiscard]] int valuation() const;

    ESeries& operator+=(const ESeries& o);
    ESeries& operator*=(const OperatorPolynomial& s);
    friend ESeries operator*(const ESeries& a, const ESeries& b);

private:
    std::vector<OperatorPolynomial> c_;
};

/// beta(e) defined by e = 2 beta / (1 + beta^2), as a series to e^order (odd powers only).
std::vector<long double> beta_series(int order);

/// Bessel function of the first kind, integer order, |x| <= 50. Power series for
/// |x| <= 10, normalized backward recurrence above.
double bessel_j(int k, double x);

/// Laplace coefficient b_n(alpha) of 1/sqrt(1 + alpha^2 - 2 alpha cos(theta))
/// = (1/2) sum_n b_n(alpha) exp(i n theta), with derivatives d^j b_n / d alpha^j,
/// j = 0..deriv_order, from the hypergeometric series. Requires 0 < alpha < 1.
std::vector<double> laplace_b(int n, double alpha, int deriv_order = 0);

/// Applies P(D) to alpha^shift * b_n(alpha) at alpha (termwise on the Laplace series).
long double apply_to_laplace(const OperatorPolynomial& P, int n, long double alpha, int shift);

/// Parameters of X_n(A,B,C) = (1+beta^2)^A (1 - beta z^-q)^B (1 - beta z^q)^C exp(s (e n p / 2q)(z^q - z^-q)),
/// with s = +1 for direct and -1 for retrograde tracks.
struct XnSpec {
    int n = 0;
    int p = 1;
    int q = 2;
    Direction direction = Direction::direct;
    Affine A;
    Affine B;
    Affine C;

    /// X_n(-D, D + n, D - n): the inner (alpha = r < 1) expansion of the C1 integrand.
    static XnSpec inner(int n, int p, int q, Direction dir);
    /// X_n(D, -D + n, -D - n): the outer (alpha = 1/r < 1) expansion.
    static XnSpec outer(int n, int p, int q, Direction dir);
};

/// Coefficient of z^{k q} in X_n as an e-series up to e^e_order. Vanishes below e^|k|.
ESeries xn_series_coefficient(const XnSpec& spec, int k, int e_order);

struct LeadingCoefficient {
    ResonantFamily family;
    int exponent = 0;     ///< |p - q| for direct, p + q for retrograde
    double value = 0.0;   ///< coefficient of e^exponent in C
    double c1_part = 0.0; ///< coefficient of e^exponent in C1
    double c2_part = 0.0; ///< coefficient of e^exponent in C2 (nonzero only for q = 1)
};

/// Coefficient of the lowest nonvanishing power of e in C for the family (its e is
/// ignored). Throws DomainError for p/q = 1/1.
LeadingCoefficient leading_coefficient(const ResonantFamily& f);

/// Coefficients of C1 and C2 (and C = -6 pi p^2 (C1 + C2)) in powers of e, up to e^order.
struct CoefficientSeries {
    std::vector<double> C1;
    std::vector<double> C2;
    std::vector<double> C;
};
CoefficientSeries coefficient_series(const ResonantFamily& f, int order);

/// Closed-form operator sums for the direct C1 leading coefficient as printed for
/// p < q and p > q; kept separate from the general expansion so the two can be compared.
double closed_form_leading_c1(const ResonantFamily& f);

/// C2 at finite e for q = 1 from its Bessel/beta series, summed until terms drop
/// below 1e-16. Returns 0 for q != 1.
double c2_bessel_sum(const ResonantFamily& f);

}  // namespace resorb
