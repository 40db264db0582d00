#pragma once

// Disturbing function of the small primary and the resonant mu = 0 track along
// which the stability coefficient is integrated.

#include <array>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>

#include "resorb/errors.hpp"
#include "resorb/kepler.hpp"

namespace resorb {

enum class Direction { direct, retrograde };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Discrete data selecting one resonant periodic family: the particle's period is
/// 2 pi p / q, it starts at l = n_l pi, g = n_g pi, with eccentricity e.
struct ResonantFamily {
    int p = 1;
    int q = 2;
    double e = 0.1;
    int n_l = 0;
    int n_g = 0;
    Direction direction = Direction::direct;

    /// Validating constructor. Enforces gcd(p, q) = 1, e in (0, 1), n_l, n_g in {0, 1}
    /// and the canonical form (n_g = 0 for odd p, n_l = 0 for even p).
    static ResonantFamily make(int p, int q, double e, int n_l, int n_g, Direction dir);

    /// Semimajor axis (p/q)^(2/3).
    [[nodiscard]] double semimajor() const;
    /// |L| = (p/q)^(1/3).
    [[nodiscard]] double action() const;
    /// Index 0 or 1 of this family among the two canonical ones.
    [[nodiscard]] int canonical_index() const;
    [[nodiscard]] std::string label() const;
};

/// The two distinct families for (p, q, e, direction): n_g = 0, n_l in {0,1} when p is
/// odd; n_l = 0, n_g in {0,1} when p is even.
std::array<ResonantFamily, 2> canonical_families(int p, int q, double e, Direction dir);

/// One point of the resonant track parametrized by F = E / q.
template <std::floating_point T>
struct TrackPointT {
    T F{};
    T r{};
    T theta{};  ///< unwrapped, continuous in F
    T t{};
    T delta1{};
};
using TrackPoint = TrackPointT<double>;

/// Distance to the small primary at (1, 0): sqrt(1 + r^2 - 2 r cos(theta)).
template <std::floating_point T>
T distance_to_small_primary(T r, T theta) {
    // 1 + r^2 - 2 r cos = (1 - r)^2 + 4 r sin^2(theta/2), free of cancellation near (1, 0).
    const T s = std::sin(theta / 2);
    return std::sqrt((1 - r) * (1 - r) + 4 * r * s * s);
}

/// Omega(r, theta) = 1/Delta1 - cos(theta)/r^2 - 1/r.
double omega_polar(double r, double theta);

/// (r / Delta1)_{theta theta}: the C1 integrand.
template <std::floating_point T>
T c1_integrand(T r, T theta) {
    const T c = std::cos(theta);
    const T s = std::sin(theta);
    const T d = distance_to_small_primary(r, theta);
    const T d2 = d * d;
    const T d5 = d2 * d2 * d;
    return r * (-r * c * d2 + 3 * r * r * s * s) / d5;
}

/// cos(theta)/r: the C2 integrand.
template <std::floating_point T>
T c2_integrand(T r, T theta) {
    return std::cos(theta) / r;
}

/// (r / Delta1)_{theta theta} + cos(theta)/r; requires r > 0 and Delta1 > 0.
double integrand_thetatheta(double r, double theta);

/// Position on the mu = 0 resonant orbit of family f at parameter F (E = qF).
///   l = E - e sin E, t = +-(l - n_l pi) p/q (minus sign for retrograde),
///   r = (p/q)^(2/3) (1 - e cos E), theta = nu + n_g pi - t.
template <std::floating_point T>
TrackPointT<T> resonant_track_t(const ResonantFamily& f, T F) {
    constexpr T pi = std::numbers::pi_v<T>;
    const T e = static_cast<T>(f.e);
    const T ratio = static_cast<T>(f.p) / static_cast<T>(f.q);
    const T E = static_cast<T>(f.q) * F;
    const T l = E - e * std::sin(E);
    const T shifted = l - static_cast<T>(f.n_l) * pi;
    TrackPointT<T> pt;
    pt.F = F;
    pt.t = (f.direction == Direction::direct ? shifted : -shifted) * ratio;
    pt.r = std::cbrt(ratio * ratio) * (1 - e * std::cos(E));
    pt.theta = true_anomaly(E, e) + static_cast<T>(f.n_g) * pi - pt.t;
    pt.delta1 = distance_to_small_primary(pt.r, pt.theta);
    return pt;
}

TrackPoint resonant_track(const ResonantFamily& f, double F);

}  // namespace resorb
