#pragma once

// Two-body coordinate stack: Kepler's equation, anomalies, and the
// Delaunay <-> polar <-> rotating-Cartesian transforms used throughout.
//
// Conventions
//   * The primary of mass 1 sits at the origin (mu = 0 limit).
//   * Rotating frame turns with unit angular velocity; H = |p|^2/2 + y p_x - x p_y - 1/r.
//   * L = sign(G) sqrt(a); retrograde motion has L, G < 0 and a decreasing mean anomaly.
//   * Angles are kept unwrapped inside computations and reduced to [0, 2pi)
//     when they leave a public conversion.

#include <cmath>
#include <algorithm>
#include <concepts>
#include <limits>
#include <numbers>

#include "resorb/errors.hpp"

namespace resorb {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Canonical Delaunay variables (L, G, l, g).
struct DelaunayState {
    double L = 0.0;
    double G = 0.0;
    double l = 0.0;
    double g = 0.0;

    /// e = sqrt(1 - G^2/L^2); NaN when |G| > |L|.
    [[nodiscard]] double eccentricity() const { return std::sqrt(1.0 - (G * G) / (L * L)); }
};

/// Polar canonical variables: radial momentum R, angular momentum G, radius r, angle theta.
struct PolarState {
    double R = 0.0;
    double G = 0.0;
    double r = 0.0;
    double theta = 0.0;
};

/// Keplerian elements of the osculating ellipse (a, e) and the eccentric/true anomalies.
struct OrbitalElements {
    double a = 0.0;
    double e = 0.0;
    double E = 0.0;
    double nu = 0.0;
};

/// Rotating-frame Cartesian state.
struct RtbpState {
    double px = 0.0;
    double py = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// Reduce an angle to [0, 2pi).
template <std::floating_point T>
T reduce_angle(T angle) {
    constexpr T two_pi = 2 * std::numbers::pi_v<T>;
    T r = std::fmod(angle, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r -= two_pi;
    return r;
}

/// Solve l = E - e sin E for E. Continuous and monotone in l: E(l + 2pi) = E(l) + 2pi.
///
/// Newton iteration seeded at l + e sin l, safeguarded by the bracket
/// [l - e, l + e]; a step that leaves the bracket is replaced by bisection.
template <std::floating_point T>
T solve_kepler(T l, T e) {
    if (!(e >= 0 && e < 1)) throw DomainError("solve_kepler: eccentricity must lie in [0, 1)");
    if (!std::isfinite(l)) throw DomainError("solve_kepler: mean anomaly must be finite");
    constexpr T two_pi = 2 * std::numbers::pi_v<T>;
    const T turns = std::round(l / two_pi);
    const T lr = l - turns * two_pi;  // in [-pi, pi]
    if (e == 0) return l;

    T lo = lr - e;
    T hi = lr + e;
    T E = lr + e * std::sin(lr);
    constexpr int kMaxIter = 50;
    const T eps = std::numeric_limits<T>::epsilon();
    for (int it = 0; it < kMaxIter; ++it) {
        const T f = E - e * std::sin(E) - lr;
        if (f == 0) return E + turns * two_pi;
        if (f < 0) lo = E; else hi = E;
        const T fp = 1 - e * std::cos(E);
        const T newton = f / fp;
        // A rounding-level step can land on the bracket end E itself; that is convergence.
        if (std::abs(newton) <= 4 * eps * std::max<T>(1, std::abs(E))) return E + turns * two_pi;
        T next = E - newton;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;
        const T step = next - E;
        E = next;
        if (std::abs(step) <= 4 * eps * std::max<T>(1, std::abs(E)) || hi - lo <= 4 * eps) {
            return E + turns * two_pi;
        }
    }
    throw ConvergenceError("solve_kepler: no convergence within 50 iterations");
}

/// True anomaly from eccentric anomaly. Same half-plane as E, unwrapped so that
/// nu(E + 2pi) = nu(E) + 2pi.
template <std::floating_point T>
T true_anomaly(T E, T e) {
    if (!(e >= 0 && e < 1)) throw DomainError("true_anomaly: eccentricity must lie in [0, 1)");
    constexpr T two_pi = 2 * std::numbers::pi_v<T>;
    const T turns = std::round(E / two_pi);
    const T Er = E - turns * two_pi;  // in [-pi, pi]
    const T half = Er / 2;
    const T nu = 2 * std::atan2(std::sqrt(1 + e) * std::sin(half), std::sqrt(1 - e) * std::cos(half));
    return nu + turns * two_pi;
}

/// Elements (a, e, E, nu) of a Delaunay state; E and nu unwrapped relative to l.
OrbitalElements delaunay_elements(const DelaunayState& s);

/// Delaunay -> polar. Requires sign(L) = sign(G) and 0 < e < 1. theta reduced to [0, 2pi).
PolarState delaunay_to_polar(const DelaunayState& s);

/// Polar -> Delaunay (inverse of delaunay_to_polar). Requires a bound orbit with 0 < e < 1.
/// At R = 0 the apsis is resolved as E = 0 (perihelion) or E = pi (aphelion).
DelaunayState polar_to_delaunay(const PolarState& s);

/// Polar -> rotating Cartesian: x = r cos(theta), y = r sin(theta), and the canonical
/// momenta (p_x, p_y) are (R, G/r) rotated by theta. The rotating-frame velocity is
/// (x', y') = (p_x + y, p_y - x).
RtbpState polar_to_cartesian_rotating(const PolarState& s);

/// Inverse of polar_to_cartesian_rotating; theta in [0, 2pi).
PolarState cartesian_rotating_to_polar(const RtbpState& s);

/// Exact mu = 0 flow: l += t / L^3, g -= t; angles reduced to [0, 2pi).
DelaunayState unperturbed_flow(const DelaunayState& s, double t);

}  // namespace resorb
