#include "resorb/perturbation.hpp"

#include <numeric>

namespace resorb {

std::string to_string(Direction d) {
    return d == Direction::direct ? "direct" : "retrograde";
}

Direction direction_from_string(const std::string& s) {
    if (s == "direct") return Direction::direct;
    if (s == "retrograde") return Direction::retrograde;
    throw DomainError("unknown direction '" + s + "' (expected direct or retrograde)");
}

ResonantFamily ResonantFamily::make(int p, int q, double e, int n_l, int n_g, Direction dir) {
    if (p <= 0 || q <= 0) throw DomainError("p and q must be positive integers");
    if (std::gcd(p, q) != 1) throw DomainError("p and q must be relatively prime");
    if (!(e > 0.0 && e < 1.0)) throw DomainError("eccentricity must lie in (0, 1)");
    if ((n_l != 0 && n_l != 1) || (n_g != 0 && n_g != 1)) throw DomainError("n_l and n_g must be 0 or 1");
    if (p % 2 == 1 && n_g != 0) throw DomainError("odd p: the distinct families use n_g = 0");
    if (p % 2 == 0 && n_l != 0) throw DomainError("even p: the distinct families use n_l = 0");
    return ResonantFamily{p, q, e, n_l, n_g, dir};
}

double ResonantFamily::semimajor() const {
    const double ratio = static_cast<double>(p) / q;
    return std::cbrt(ratio * ratio);
}

double ResonantFamily::action() const {
    return std::cbrt(static_cast<double>(p) / q);
}

int ResonantFamily::canonical_index() const {
    return p % 2 == 1 ? n_l : n_g;
}

std::string ResonantFamily::label() const {
    return std::to_string(p) + "/" + std::to_string(q) + " " + to_string(direction) + " e=" + std::to_string(e) +
           " n_l=" + std::to_string(n_l) + " n_g=" + std::to_string(n_g);
}

std::array<ResonantFamily, 2> canonical_families(int p, int q, double e, Direction dir) {
    if (p % 2 == 1) {
        return {ResonantFamily::make(p, q, e, 0, 0, dir), ResonantFamily::make(p, q, e, 1, 0, dir)};
    }
    return {ResonantFamily::make(p, q, e, 0, 0, dir), ResonantFamily::make(p, q, e, 0, 1, dir)};
}

double omega_polar(double r, double theta) {
    if (!(r > 0.0)) throw CollisionError("omega_polar: r must be positive");
    const double d = distance_to_small_primary(r, theta);
    if (!(d > 0.0)) throw CollisionError("omega_polar: collision with the small primary");
    return 1.0 / d - std::cos(theta) / (r * r) - 1.0 / r;
}

double integrand_thetatheta(double r, double theta) {
    if (!(r > 0.0)) throw CollisionError("integrand_thetatheta: r must be positive");
    if (!(distance_to_small_primary(r, theta) > 0.0)) {
        throw CollisionError("integrand_thetatheta: collision with the small primary");
    }
    return c1_integrand(r, theta) + c2_integrand(r, theta);
}

TrackPoint resonant_track(const ResonantFamily& f, double F) {
    return resonant_track_t<double>(f, F);
}

}  // namespace resorb
