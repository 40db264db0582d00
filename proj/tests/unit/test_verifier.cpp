#include <doctest.h>

#include <cmath>
#include <vector>

#include "resorb/coefficient.hpp"
#include "resorb/verifier.hpp"

using namespace resorb;

namespace {

RtbpState mirror(const RtbpState& s) {
    return {-s.px, s.py, s.x, -s.y};
}

double distance(const RtbpState& a, const RtbpState& b) {
    return (to_vector(a) - to_vector(b)).cwiseAbs().maxCoeff();
}

const ResonantFamily k13 = ResonantFamily::make(1, 3, 0.3, 0, 0, Direction::direct);

}  // namespace

TEST_CASE("the corotating circular orbit is an equilibrium at mu = 0") {
    const Vec4 d = rtbp_derivatives({0.0, 1.0, 1.0, 0.0}, 0.0);
    CHECK(d.cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(rtbp_derivatives({0.0, 1.0, -1e-3, 0.0}, 1e-3), CollisionError);
    CHECK_THROWS_AS(rtbp_derivatives({0.0, 1.0, 1.0 - 1e-3, 0.0}, 1e-3), CollisionError);
}

TEST_CASE("Jacobian of the vector field matches finite differences") {
    const RtbpState s{0.1, 0.9, 0.45, -0.3};
    const double mu = 0.01;
    const Mat4 J = rtbp_jacobian(s, mu);
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
        Vec4 up = to_vector(s);
        Vec4 dn = up;
        up[j] += h;
        dn[j] -= h;
        const Vec4 col = (rtbp_derivatives(from_vector(up), mu) - rtbp_derivatives(from_vector(dn), mu)) / (2 * h);
        CHECK((col - J.col(j)).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("energy is conserved along an arc") {
    const auto [s0, half] = unperturbed_seed(k13);
    const double mu = 1e-5;
    const double h0 = rtbp_hamiltonian(s0, mu);
    double drift = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const RtbpState s = rtbp_flow(s0, mu, 2.0 * half * k / 8.0).state;
        drift = std::max(drift, std::abs(rtbp_hamiltonian(s, mu) - h0));
    }
    CHECK(drift <= 1e-11);
}

TEST_CASE("mu = 0 Cartesian flow is conjugate to the Delaunay flow") {
    for (const DelaunayState& d : {DelaunayState{0.8, 0.6, 0.3, 1.1}, DelaunayState{-1.1, -0.7, 2.0, 4.0}}) {
        for (double t : {0.7, 5.0, 12.0}) {
            const RtbpState start = polar_to_cartesian_rotating(delaunay_to_polar(d));
            const RtbpState end = rtbp_flow(start, 0.0, t).state;
            const DelaunayState got = polar_to_delaunay(cartesian_rotating_to_polar(end));
            const DelaunayState want = unperturbed_flow(d, t);
            CHECK(got.L == doctest::Approx(want.L).epsilon(1e-10));
            CHECK(got.G == doctest::Approx(want.G).epsilon(1e-10));
            CHECK(std::abs(std::remainder(got.l - want.l, kTwoPi)) < 1e-9);
            CHECK(std::abs(std::remainder(got.g - want.g, kTwoPi)) < 1e-9);
        }
    }
}

TEST_CASE("reflection maps mu = 0 solutions to solutions run backwards") {
    const RtbpState s0 = polar_to_cartesian_rotating(delaunay_to_polar({0.9, 0.7, 0.4, 0.2}));
    for (double t : {1.0, 4.0}) {
        const RtbpState s1 = rtbp_flow(s0, 0.0, t).state;
        const RtbpState back = rtbp_flow(mirror(s1), 0.0, t).state;
        CHECK(distance(back, mirror(s0)) < 1e-10);
    }
}

TEST_CASE("refined 1/3 orbit: section, period, closure and reflection symmetry") {
    const double mu = 1e-5;
    const PeriodicOrbit o = refine_periodic_orbit(k13, mu);
    CHECK(o.initial.y == 0.0);
    CHECK(o.initial.px == 0.0);
    CHECK(std::abs(o.residual_y) <= kDefaultCorrectorTol);
    CHECK(std::abs(o.residual_px) <= kDefaultCorrectorTol);
    CHECK(o.closure <= 1e-10);
    CHECK(std::abs(o.period - kTwoPi) <= 10 * mu * kTwoPi);
    CHECK(o.initial.x * o.initial.py == doctest::Approx(k13.action() * std::sqrt(1 - 0.09)).epsilon(1e-14));

    const RtbpState mid = rtbp_flow(o.initial, mu, o.period / 2).state;
    double worst = 0.0;
    for (double s : {0.3, 1.0, 2.5}) {
        const RtbpState ahead = rtbp_flow(mid, mu, s).state;
        const RtbpState behind = rtbp_flow(mid, mu, -s).state;
        worst = std::max(worst, distance(ahead, mirror(behind)));
    }
    CHECK(worst <= 1e-9);

    const double energy = rtbp_hamiltonian(o.initial, mu);
    CHECK(std::abs(rtbp_hamiltonian(rtbp_flow(o.initial, mu, o.period).state, mu) - energy) <= 1e-11);
}

TEST_CASE("the refined orbit tends to the unperturbed seed as mu -> 0") {
    const auto [seed, half] = unperturbed_seed(k13);
    CHECK(seed.x == doctest::Approx(k13.semimajor() * 0.7).epsilon(1e-15));
    CHECK(half == doctest::Approx(kPi).epsilon(1e-15));
    const PeriodicOrbit small = refine_periodic_orbit(k13, 1e-8);
    CHECK(std::abs(small.initial.x - seed.x) < 1e-6);
    CHECK(std::abs(small.period - kTwoPi) < 1e-6);
    CHECK_THROWS_AS(refine_periodic_orbit(k13, 0.0), DomainError);
}

TEST_CASE("retrograde 1/2 orbit circulates the other way") {
    const auto f = ResonantFamily::make(1, 2, 0.2, 0, 0, Direction::retrograde);
    const PeriodicOrbit o = refine_periodic_orbit(f, 1e-5);
    CHECK(o.initial.x * o.initial.py < 0.0);
    CHECK(o.closure <= 1e-10);
    CHECK(std::abs(o.period - kTwoPi) <= 10 * 1e-5 * kTwoPi);
}

TEST_CASE("monodromy at mu = 0 has trace 4") {
    const auto [seed, half] = unperturbed_seed(k13);
    PeriodicOrbit o;
    o.family = k13;
    o.initial = seed;
    o.period = 2 * half;
    const MonodromyReport r = monodromy(o);
    CHECK(r.trace == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(r.determinant == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::isnan(r.C_estimate));
}

TEST_CASE("monodromy structure and the multiplier law on both 1/3 families") {
    const double mu = 1e-5;
    for (const auto& f : canonical_families(1, 3, 0.3, Direction::direct)) {
        const MonodromyReport r = monodromy(refine_periodic_orbit(f, mu));
        const double C = compute_C(f).C;
        INFO(f.label() << ": estimate " << r.C_estimate << " vs " << C);
        CHECK(std::abs(r.determinant - 1.0) <= 1e-8);
        CHECK(r.trivial_pair_error <= 1e-6);
        CHECK(r.reciprocal_error <= 1e-9);
        CHECK(std::abs(r.C_estimate - C) <= 0.05 * std::abs(C));
        CHECK(r.hyperbolic == (C > 0));
        const auto lam = r.eigenvalues[2];
        if (C > 0) {
            CHECK(std::abs(lam.imag()) < 1e-12);
            CHECK(std::abs(std::abs(lam) - 1.0) > 1e-4);
        } else {
            CHECK(std::abs(lam.imag()) > 1e-4);
            CHECK(std::abs(std::abs(lam) - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("fit_multiplier_law") {
    const std::vector<double> mu{1e-4, 3e-5, 1e-5, 3e-6};
    std::vector<double> est;
    for (double m : mu) est.push_back(40.0 + 2000.0 * m);
    const Extrapolation fit = fit_multiplier_law(mu, est);
    CHECK(fit.C == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(fit.slope == doctest::Approx(2000.0).epsilon(1e-9));
    CHECK(fit.residual < 1e-10);

    std::vector<double> bad = est;
    bad[2] = 41.0;
    CHECK_THROWS_AS(fit_multiplier_law(mu, bad), ConvergenceError);
    const std::vector<double> increasing{1e-6, 1e-5};
    CHECK_THROWS_AS(fit_multiplier_law(increasing, std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("a mu too large for the family is reported as a corrector failure") {
    CHECK_THROWS_AS(refine_periodic_orbit(k13, 0.1), ConvergenceError);
}
