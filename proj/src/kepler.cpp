#include "resorb/kepler.hpp"

#include <cmath>

namespace resorb {

namespace {

void check_delaunay(const DelaunayState& s) {
    if (!std::isfinite(s.L) || !std::isfinite(s.G) || !std::isfinite(s.l) || !std::isfinite(s.g)) {
        throw DomainError("Delaunay state must be finite");
    }
    if (s.L == 0.0) throw DomainError("Delaunay state: L must be nonzero");
    if (s.G != 0.0 && std::signbit(s.G) != std::signbit(s.L)) {
        throw DomainError("Delaunay state: sign(L) must equal sign(G)");
    }
    const double e = s.eccentricity();
    if (!(e > 0.0 && e < 1.0)) throw DomainError("Delaunay state: eccentricity must lie in (0, 1)");
}

}  // namespace

OrbitalElements delaunay_elements(const DelaunayState& s) {
    check_delaunay(s);
    OrbitalElements el;
    el.a = s.L * s.L;
    el.e = s.eccentricity();
    el.E = solve_kepler(s.l, el.e);
    el.nu = true_anomaly(el.E, el.e);
    return el;
}

PolarState delaunay_to_polar(const DelaunayState& s) {
    const OrbitalElements el = delaunay_elements(s);
    const double one_minus = 1.0 - el.e * std::cos(el.E);
    PolarState p;
    p.r = el.a * one_minus;
    p.G = s.G;
    // R = dr/dt with dE/dt = L^-3 / (1 - e cos E).
    p.R = el.e * std::sin(el.E) / (s.L * one_minus);
    p.theta = reduce_angle(el.nu + s.g);
    return p;
}

DelaunayState polar_to_delaunay(const PolarState& s) {
    if (!(s.r > 0.0) || !std::isfinite(s.r)) throw DomainError("polar_to_delaunay: r must be positive");
    if (s.G == 0.0) throw DomainError("polar_to_delaunay: G = 0 is a degenerate (rectilinear) orbit");
    const double h0 = 0.5 * (s.R * s.R + s.G * s.G / (s.r * s.r)) - 1.0 / s.r;
    if (!(h0 < 0.0)) throw DomainError("polar_to_delaunay: orbit is not bound");
    const double a = -0.5 / h0;
    const double e = std::sqrt(std::max(0.0, 1.0 + 2.0 * s.G * s.G * h0));
    if (!(e > 0.0 && e < 1.0)) throw DomainError("polar_to_delaunay: eccentricity must lie in (0, 1)");
    DelaunayState d;
    d.L = std::copysign(std::sqrt(a), s.G);
    d.G = s.G;
    // e cos E = 1 - r/a, e sin E = R L r / a.
    const double E = std::atan2(s.R * d.L * s.r / a, 1.0 - s.r / a);
    const double nu = true_anomaly(E, e);
    d.l = reduce_angle(E - e * std::sin(E));
    d.g = reduce_angle(s.theta - nu);
    return d;
}

RtbpState polar_to_cartesian_rotating(const PolarState& s) {
    if (!(s.r > 0.0)) throw DomainError("polar_to_cartesian_rotating: r must be positive");
    const double c = std::cos(s.theta);
    const double sn = std::sin(s.theta);
    const double vt = s.G / s.r;
    RtbpState out;
    out.x = s.r * c;
    out.y = s.r * sn;
    out.px = s.R * c - vt * sn;
    out.py = s.R * sn + vt * c;
    return out;
}

PolarState cartesian_rotating_to_polar(const RtbpState& s) {
    const double r = std::hypot(s.x, s.y);
    if (!(r > 0.0)) throw DomainError("cartesian_rotating_to_polar: r must be positive");
    PolarState p;
    p.r = r;
    p.theta = reduce_angle(std::atan2(s.y, s.x));
    p.R = (s.x * s.px + s.y * s.py) / r;
    p.G = s.x * s.py - s.y * s.px;
    return p;
}

DelaunayState unperturbed_flow(const DelaunayState& s, double t) {
    if (s.L == 0.0) throw DomainError("unperturbed_flow: L must be nonzero");
    DelaunayState out = s;
    out.l = reduce_angle(s.l + t / (s.L * s.L * s.L));
    out.g = reduce_angle(s.g - t);
    return out;
}

}  // namespace resorb
