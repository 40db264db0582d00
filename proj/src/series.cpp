#include "resorb/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace resorb {

namespace {

using Real = long double;

constexpr Real kPiL = std::numbers::pi_v<Real>;

int parity_sign(long long k) { return (k % 2 == 0) ? 1 : -1; }

// Series in e of J_k(c e) to e^order.
std::vector<Real> bessel_series(int k, Real c, int order) {
    std::vector<Real> s(static_cast<std::size_t>(order) + 1, 0);
    const int ak = std::abs(k);
    const Real sign = (k < 0 && ak % 2 == 1) ? -1 : 1;
    // (c/2)^(2m+ak) / (m! (m+ak)!)
    Real term = sign;
    for (int i = 1; i <= ak; ++i) term *= (c / 2) / i;
    for (int m = 0; 2 * m + ak <= order; ++m) {
        s[static_cast<std::size_t>(2 * m + ak)] = term;
        term *= -(c / 2) * (c / 2) / ((m + 1) * static_cast<Real>(m + 1 + ak));
    }
    return s;
}

std::vector<Real> multiply(const std::vector<Real>& a, const std::vector<Real>& b, int order) {
    std::vector<Real> out(static_cast<std::size_t>(order) + 1, 0);
    for (std::size_t i = 0; i < a.size() && static_cast<int>(i) <= order; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && static_cast<int>(i + j) <= order; ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

// Leading Laplace-series coefficient c_0 = 2 (1/2)_n / n!.
Real laplace_c0(int n) {
    Real c = 2;
    for (int i = 0; i < n; ++i) c *= (0.5L + i) / (i + 1);
    return c;
}

// c_{m+1} / c_m for b_n = sum_m c_m alpha^(n + 2m).
Real laplace_ratio(int n, int m) {
    return (0.5L + m) * (0.5L + n + m) / ((m + 1) * static_cast<Real>(n + 1 + m));
}

}  // namespace

// ---------------------------------------------------------------------------
// OperatorPolynomial

OperatorPolynomial::OperatorPolynomial(std::vector<long double> coefficients) : c_(std::move(coefficients)) {
    trim();
}

OperatorPolynomial OperatorPolynomial::constant(long double c) {
    return OperatorPolynomial(std::vector<long double>{c});
}

OperatorPolynomial OperatorPolynomial::affine(Affine x) {
    return OperatorPolynomial(std::vector<long double>{x.offset, x.slope});
}

OperatorPolynomial OperatorPolynomial::binomial(Affine x, int j) {
    if (j < 0) return OperatorPolynomial{};
    OperatorPolynomial out = constant(1);
    for (int i = 0; i < j; ++i) {
        out = out * affine(Affine{x.slope / (i + 1), (x.offset - i) / (i + 1)});
    }
    return out;
}

int OperatorPolynomial::degree() const {
    return static_cast<int>(c_.size()) - 1;
}

bool OperatorPolynomial::is_zero() const {
    return c_.empty();
}

long double OperatorPolynomial::evaluate(long double k) const {
    long double v = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * k + *it;
    return v;
}

OperatorPolynomial& OperatorPolynomial::operator+=(const OperatorPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

OperatorPolynomial& OperatorPolynomial::operator*=(long double s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
}

OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return OperatorPolynomial{};
    std::vector<long double> out(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return OperatorPolynomial(std::move(out));
}

void OperatorPolynomial::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

// ---------------------------------------------------------------------------
// ESeries

ESeries::ESeries(int order) : c_(static_cast<std::size_t>(std::max(order, 0)) + 1) {}

ESeries ESeries::scalar(std::vector<long double> coefficients, int order) {
    ESeries s(order);
    for (int m = 0; m <= order && m < static_cast<int>(coefficients.size()); ++m) {
        s[m] = OperatorPolynomial::constant(coefficients[static_cast<std::size_t>(m)]);
    }
    return s;
}

int ESeries::valuation() const {
    for (int m = 0; m <= order(); ++m)
        if (!c_[static_cast<std::size_t>(m)].is_zero()) return m;
    return -1;
}

ESeries& ESeries::operator+=(const ESeries& o) {
    for (int m = 0; m <= std::min(order(), o.order()); ++m) (*this)[m] += o[m];
    return *this;
}

ESeries& ESeries::operator*=(const OperatorPolynomial& s) {
    for (auto& c : c_) c = c * s;
    return *this;
}

ESeries operator*(const ESeries& a, const ESeries& b) {
    const int order = std::min(a.order(), b.order());
    ESeries out(order);
    for (int i = 0; i <= order; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; i + j <= order; ++j) {
            if (b[j].is_zero()) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Special functions

std::vector<long double> beta_series(int order) {
    // beta = (e/2)(1 + beta^2), iterated to a fixed point of the truncated series.
    std::vector<Real> beta(static_cast<std::size_t>(order) + 1, 0);
    for (int it = 0; it <= order; ++it) {
        const auto sq = multiply(beta, beta, order);
        std::vector<Real> next(beta.size(), 0);
        for (int m = 0; m < order; ++m) next[static_cast<std::size_t>(m) + 1] = (m == 0 ? 1 : sq[static_cast<std::size_t>(m)]) / 2;
        beta = std::move(next);
    }
    return beta;
}

double bessel_j(int k, double x) {
    if (std::abs(x) > 50.0) throw DomainError("bessel_j: |x| must not exceed 50");
    const int ak = std::abs(k);
    const int reflect = (k < 0) ? parity_sign(ak) : 1;
    if (x == 0.0) return ak == 0 ? 1.0 : 0.0;

    const Real ax = std::abs(static_cast<Real>(x));
    const int xsign = (x < 0) ? parity_sign(ak) : 1;
    Real value = 0;
    if (ax <= 10) {
        Real term = 1;
        for (int i = 1; i <= ak; ++i) term *= (ax / 2) / i;
        for (int m = 0; m < 500; ++m) {
            value += term;
            const Real next = -term * (ax / 2) * (ax / 2) / ((m + 1) * static_cast<Real>(m + 1 + ak));
            if (std::abs(next) < 1e-21L * std::abs(value) && m > ax) break;
            term = next;
        }
    } else {
        // Miller's backward recurrence normalized by J_0 + 2 sum J_2j = 1.
        int start = static_cast<int>(std::max<Real>(ak, ax)) + 60;
        if (start % 2 == 1) ++start;
        Real next = 0;
        Real cur = 1e-300L;
        Real norm = 0;
        Real wanted = 0;
        for (int j = start; j >= 1; --j) {
            const Real prev = 2 * j / ax * cur - next;
            next = cur;
            cur = prev;  // J_{j-1}
            if (j - 1 == ak) wanted = cur;
            if ((j - 1) % 2 == 0) norm += (j - 1 == 0) ? cur : 2 * cur;
            if (std::abs(cur) > 1e250L) {
                next /= 1e250L;
                cur /= 1e250L;
                norm /= 1e250L;
                wanted /= 1e250L;
            }
        }
        if (ak == 0) wanted = cur;
        value = wanted / norm;
    }
    return static_cast<double>(value) * reflect * xsign;
}

std::vector<double> laplace_b(int n, double alpha, int deriv_order) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("laplace_b: alpha must lie in (0, 1)");
    if (deriv_order < 0) throw DomainError("laplace_b: derivative order must be nonnegative");
    const int an = std::abs(n);
    const Real a = alpha;
    std::vector<Real> sums(static_cast<std::size_t>(deriv_order) + 1, 0);
    Real c = laplace_c0(an);
    for (int m = 0; m < 1000000; ++m) {
        const int k = an + 2 * m;
        bool small = true;
        for (int j = 0; j <= deriv_order; ++j) {
            // c_m k (k-1) ... (k-j+1) alpha^(k-j)
            Real ff = 1;
            for (int i = 0; i < j; ++i) ff *= (k - i);
            const Real term = (ff == 0) ? 0 : c * ff * std::pow(a, k - j);
            sums[static_cast<std::size_t>(j)] += term;
            if (std::abs(term) > 1e-19L * std::abs(sums[static_cast<std::size_t>(j)])) small = false;
        }
        // Stop once every derivative's terms are negligible and past their peak.
        if (small && m > 2 * deriv_order + 4) break;
        c *= laplace_ratio(an, m);
    }
    std::vector<double> out(sums.size());
    std::transform(sums.begin(), sums.end(), out.begin(), [](Real v) { return static_cast<double>(v); });
    return out;
}

long double apply_to_laplace(const OperatorPolynomial& P, int n, long double alpha, int shift) {
    if (!(alpha > 0 && alpha < 1)) throw DomainError("apply_to_laplace: alpha must lie in (0, 1)");
    if (P.is_zero()) return 0;
    const int an = std::abs(n);
    const Real a2 = alpha * alpha;
    Real c = laplace_c0(an);
    Real power = std::pow(alpha, static_cast<Real>(an + shift));
    Real sum = 0;
    int quiet = 0;
    for (int m = 0; m < 2000000; ++m) {
        const Real k = static_cast<Real>(an + 2 * m + shift);
        const Real term = c * P.evaluate(k) * power;
        sum += term;
        // P(k) grows polynomially, so terms decay geometrically once past the peak.
        if (std::abs(term) <= 1e-20L * std::abs(sum) && m > P.degree() + 2) {
            if (++quiet >= 4) break;
        } else {
            quiet = 0;
        }
        c *= laplace_ratio(an, m);
        power *= a2;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// X_n machinery

XnSpec XnSpec::inner(int n, int p, int q, Direction dir) {
    return XnSpec{n, p, q, dir, Affine{-1, 0}, Affine{1, static_cast<Real>(n)}, Affine{1, -static_cast<Real>(n)}};
}

XnSpec XnSpec::outer(int n, int p, int q, Direction dir) {
    return XnSpec{n, p, q, dir, Affine{1, 0}, Affine{-1, static_cast<Real>(n)}, Affine{-1, -static_cast<Real>(n)}};
}

ESeries xn_series_coefficient(const XnSpec& spec, int k, int e_order) {
    if (e_order < 0) throw DomainError("xn_series_coefficient: truncation order must be nonnegative");
    const int order = e_order;
    ESeries result(order);
    if (std::abs(k) > order) return result;

    const auto beta = beta_series(order);
    // (-beta)^j
    std::vector<std::vector<Real>> neg_beta_pow{std::vector<Real>(static_cast<std::size_t>(order) + 1, 0)};
    neg_beta_pow[0][0] = 1;
    std::vector<Real> neg_beta = beta;
    for (auto& v : neg_beta) v = -v;
    for (int j = 1; j <= order; ++j) neg_beta_pow.push_back(multiply(neg_beta_pow.back(), neg_beta, order));

    const Real sigma = spec.direction == Direction::direct ? 1 : -1;
    const Real c = sigma * static_cast<Real>(spec.n) * spec.p / static_cast<Real>(spec.q);

    for (int j1 = 0; j1 <= order; ++j1) {
        for (int j2 = 0; j1 + j2 <= order; ++j2) {
            const int kk = k + j1 - j2;
            if (j1 + j2 + std::abs(kk) > order) continue;
            const auto scalar = multiply(neg_beta_pow[static_cast<std::size_t>(j1 + j2)], bessel_series(kk, c, order), order);
            ESeries term = ESeries::scalar(scalar, order);
            term *= OperatorPolynomial::binomial(spec.B, j1) * OperatorPolynomial::binomial(spec.C, j2);
            result += term;
        }
    }

    // (1 + beta^2)^A = sum_m binom(A, m) beta^(2m)
    const auto beta_sq = multiply(beta, beta, order);
    ESeries prefactor(order);
    std::vector<Real> power(static_cast<std::size_t>(order) + 1, 0);
    power[0] = 1;
    for (int m = 0; 2 * m <= order; ++m) {
        ESeries t = ESeries::scalar(power, order);
        t *= OperatorPolynomial::binomial(spec.A, m);
        prefactor += t;
        power = multiply(power, beta_sq, order);
    }
    return result * prefactor;
}

CoefficientSeries coefficient_series(const ResonantFamily& f, int order) {
    if (f.p == f.q) throw DomainError("series expansion requires p/q != 1/1");
    if (order < 0) throw DomainError("coefficient_series: order must be nonnegative");
    const int p = f.p;
    const int q = f.q;
    const bool direct = f.direction == Direction::direct;
    const Real a = std::cbrt(static_cast<Real>(p) * p / (static_cast<Real>(q) * q));
    const bool inner = p < q;
    const Real alpha0 = inner ? a : 1 / a;
    const int step = direct ? std::abs(p - q) : p + q;

    CoefficientSeries out;
    out.C1.assign(static_cast<std::size_t>(order) + 1, 0.0);
    out.C2.assign(static_cast<std::size_t>(order) + 1, 0.0);
    out.C.assign(static_cast<std::size_t>(order) + 1, 0.0);
    std::vector<Real> c1(out.C1.size(), 0), c2(out.C2.size(), 0);

    // C1 = pi * sum over n = n0 q of the constant Laurent terms of -n^2 D_alpha f_n(alpha) exp(i n theta).
    for (int n0 = 1; n0 * step <= order; ++n0) {
        for (int s : {1, -1}) {
            const int m0 = s * n0;
            const int n = m0 * q;
            const int K = direct ? m0 * (p - q) : -m0 * (p + q);
            const XnSpec spec = inner ? XnSpec::inner(n, p, q, f.direction) : XnSpec::outer(n, p, q, f.direction);
            const ESeries coef = xn_series_coefficient(spec, K, order);
            const Real phase = parity_sign(static_cast<long long>(m0) * (q * f.n_g + p * f.n_l));
            for (int m = 0; m <= order; ++m) {
                if (coef[m].is_zero()) continue;
                const Real value = apply_to_laplace(coef[m], n, alpha0, inner ? 1 : 0);
                c1[static_cast<std::size_t>(m)] += kPiL * (-static_cast<Real>(n) * n) * phase * value;
            }
        }
    }

    // C2 = (pi / a) sum_{n = +-1} constant term of phase * z^(..) X_n(1, n - 1, -n - 1); only q = 1 survives.
    if (q == 1) {
        for (int n : {1, -1}) {
            const int K = direct ? n * (p - q) : -n * (p + q);
            const XnSpec spec{n, p, q, f.direction, Affine{0, 1}, Affine{0, static_cast<Real>(n - 1)},
                              Affine{0, static_cast<Real>(-n - 1)}};
            const ESeries coef = xn_series_coefficient(spec, K, order);
            const Real phase = parity_sign(f.n_g + static_cast<long long>(p) * f.n_l);
            for (int m = 0; m <= order; ++m) {
                c2[static_cast<std::size_t>(m)] += kPiL / a * phase * coef[m].evaluate(0);
            }
        }
    }

    const Real pref = -6 * kPiL * p * p;
    for (std::size_t m = 0; m < out.C.size(); ++m) {
        out.C1[m] = static_cast<double>(c1[m]);
        out.C2[m] = static_cast<double>(c2[m]);
        out.C[m] = static_cast<double>(pref * (c1[m] + c2[m]));
    }
    return out;
}

LeadingCoefficient leading_coefficient(const ResonantFamily& f) {
    if (f.p == f.q) throw DomainError("leading_coefficient: p/q = 1/1 is excluded");
    LeadingCoefficient lc;
    lc.family = f;
    lc.exponent = f.direction == Direction::direct ? std::abs(f.p - f.q) : f.p + f.q;
    const auto s = coefficient_series(f, lc.exponent);
    const auto m = static_cast<std::size_t>(lc.exponent);
    lc.value = s.C[m];
    lc.c1_part = s.C1[m];
    lc.c2_part = s.C2[m];
    return lc;
}

double closed_form_leading_c1(const ResonantFamily& f) {
    if (f.direction != Direction::direct) throw DomainError("closed_form_leading_c1: direct families only");
    if (f.p == f.q) throw DomainError("closed_form_leading_c1: p/q = 1/1 is excluded");
    const int p = f.p;
    const int q = f.q;
    const int d = std::abs(p - q);
    const Real phase = parity_sign(static_cast<long long>(f.n_g) * q + static_cast<long long>(f.n_l) * p);
    const Real sign_d = parity_sign(d);
    Real factorial = 1;
    OperatorPolynomial sum;
    for (int k = 0; k <= d; ++k) {
        factorial = 1;
        for (int i = 2; i <= d - k; ++i) factorial *= i;
        const Real weight = std::pow(static_cast<Real>(p), d - k) / factorial;
        if (p < q) {
            sum += OperatorPolynomial::binomial(Affine{1, static_cast<Real>(q)}, k) * weight;
        } else {
            sum += OperatorPolynomial::binomial(Affine{-1, -static_cast<Real>(q)}, k) * (weight * parity_sign(k));
        }
    }
    const Real pref = -2 * kPiL * q * q * sign_d / std::pow(2.0L, d) * phase;
    if (p < q) {
        const Real alpha = std::cbrt(static_cast<Real>(p) * p / (static_cast<Real>(q) * q));
        return static_cast<double>(pref * apply_to_laplace(sum, q, alpha, 1));
    }
    const Real alpha = std::cbrt(static_cast<Real>(q) * q / (static_cast<Real>(p) * p));
    return static_cast<double>(pref * apply_to_laplace(sum, q, alpha, 0));
}

double c2_bessel_sum(const ResonantFamily& f) {
    if (f.q != 1) return 0.0;
    const int p = f.p;
    const double e = f.e;
    const double beta = (1.0 - std::sqrt(1.0 - e * e)) / e;
    const double x = e * p;
    const bool direct = f.direction == Direction::direct;
    double sum = 0.0;
    double bpow = 1.0;
    for (int j = 0; j < 10000; ++j) {
        const int order = direct ? p - 1 - j : p + 1 + j;
        const double term = (j + 1) * bpow * bessel_j(order, x);
        sum += term;
        if (j > p + 2 && std::abs(term) < 1e-16 * std::abs(sum)) break;
        bpow *= beta;
    }
    const double phase = parity_sign(f.n_g + static_cast<long long>(p) * f.n_l);
    return 2.0 * kPi * (1.0 + beta * beta) / std::cbrt(static_cast<double>(p) * p) * phase * sum;
}

}  // namespace resorb
