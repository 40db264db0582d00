#include "resorb/levi_civita.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "resorb/verifier.hpp"

namespace resorb {

namespace {

// Delta1^2 in regularized coordinates and its partial derivatives.
struct SmallPrimaryDistance {
    double d2, d2_xi, d2_nu;
};

SmallPrimaryDistance small_primary_distance(double xi, double nu) {
    const double rho = xi * xi + nu * nu;
    const double w = xi * xi - nu * nu - 1.0;
    return {w * w + 4.0 * xi * xi * nu * nu, 4.0 * xi * (rho - 1.0), 4.0 * nu * (rho + 1.0)};
}

RegularizedState from_polar(double R, double G, double r, double theta, double C) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return RegularizedState{R * c - (G / r) * s, R * s + (G / r) * c, r * c, r * s, C};
}

// K-flow in (p_xi, p_nu, xi, nu, t), with dt/dtau = xi^2 + nu^2.
OdeRhs k_rhs(double mu, double C) {
    return [mu, C](const OdeState& u, OdeState& du, double) {
        const auto d = k_derivatives(RegularizedState{u[0], u[1], u[2], u[3], C}, mu);
        for (std::size_t i = 0; i < 4; ++i) du[i] = d[i];
        du[4] = u[2] * u[2] + u[3] * u[3];
    };
}

double wrap_difference(double d) {
    return d - kTwoPi * std::round(d / kTwoPi);
}

}  // namespace

RegularizedState lc_forward(const RtbpState& s, double mu) {
    return lc_forward(s, mu, rtbp_hamiltonian(s, mu));
}

RegularizedState lc_forward(const RtbpState& s, double mu, double C_J) {
    const std::complex<double> w(s.x + mu, s.y);
    if (w == 0.0) throw CollisionError("lc_forward: the large primary is the branch point of the map");
    const std::complex<double> z = std::sqrt(w);  // principal root: Re z >= 0
    const double xi = z.real();
    const double nu = z.imag();
    return RegularizedState{2.0 * (xi * s.px + nu * s.py), 2.0 * (-nu * s.px + xi * s.py), xi, nu, C_J};
}

RtbpState lc_inverse(const RegularizedState& s, double mu) {
    const double rho = s.xi * s.xi + s.nu * s.nu;
    if (!(rho > 0.0)) throw CollisionError("lc_inverse: momenta are singular at xi = nu = 0");
    const auto [x, y] = lc_position(s, mu);
    return RtbpState{(s.xi * s.p_xi - s.nu * s.p_nu) / (2.0 * rho), (s.nu * s.p_xi + s.xi * s.p_nu) / (2.0 * rho), x, y};
}

std::array<double, 2> lc_position(const RegularizedState& s, double mu) {
    return {-mu + s.xi * s.xi - s.nu * s.nu, 2.0 * s.xi * s.nu};
}

double lc_angular_momentum(const RegularizedState& s) {
    return s.xi * s.p_nu - s.nu * s.p_xi;
}

double k_value(const RegularizedState& s, double mu) {
    const double rho = s.xi * s.xi + s.nu * s.nu;
    double k = (s.p_xi * s.p_xi + s.p_nu * s.p_nu) / 8.0 + 0.5 * rho * (s.nu * s.p_xi - s.xi * s.p_nu - 2.0 * s.C_J) - 1.0;
    if (mu != 0.0) {
        const double d2 = small_primary_distance(s.xi, s.nu).d2;
        if (!(d2 > 0.0)) throw CollisionError("k_value: state is at the small primary");
        k += 0.5 * mu * (s.xi * s.p_nu + s.nu * s.p_xi) + mu - mu * rho / std::sqrt(d2);
    }
    return k;
}

std::array<double, 4> k_derivatives(const RegularizedState& s, double mu) {
    const double xi = s.xi, nu = s.nu, pxi = s.p_xi, pnu = s.p_nu;
    const double rho = xi * xi + nu * nu;
    const double bracket = nu * pxi - xi * pnu - 2.0 * s.C_J;
    double dk_dpxi = pxi / 4.0 + 0.5 * rho * nu;
    double dk_dpnu = pnu / 4.0 - 0.5 * rho * xi;
    double dk_dxi = xi * bracket - 0.5 * rho * pnu;
    double dk_dnu = nu * bracket + 0.5 * rho * pxi;
    if (mu != 0.0) {
        const auto d = small_primary_distance(xi, nu);
        if (!(d.d2 > 0.0)) throw CollisionError("k_derivatives: state is at the small primary");
        const double d1 = std::sqrt(d.d2);
        const double d3 = d.d2 * d1;
        dk_dpxi += 0.5 * mu * nu;
        dk_dpnu += 0.5 * mu * xi;
        // d(rho / Delta1) = 2 q / Delta1 - rho dDelta1^2 / (2 Delta1^3)
        dk_dxi += 0.5 * mu * pnu - mu * (2.0 * xi / d1 - rho * d.d2_xi / (2.0 * d3));
        dk_dnu += 0.5 * mu * pxi - mu * (2.0 * nu / d1 - rho * d.d2_nu / (2.0 * d3));
    }
    return {-dk_dxi, -dk_dnu, dk_dpxi, dk_dpnu};
}

std::vector<KFlowResult> k_flow_samples(const RegularizedState& s, double mu, const std::vector<double>& taus,
                                        const IntegratorOptions& opts) {
    OdeState x{s.p_xi, s.p_nu, s.xi, s.nu, 0.0};
    const OdeRhs rhs = k_rhs(mu, s.C_J);
    std::vector<KFlowResult> out;
    out.reserve(taus.size());
    double tau = 0.0;
    for (double next : taus) {
        if (next < tau) throw DomainError("k_flow_samples: fictitious times must be nondecreasing and >= 0");
        integrate(rhs, x, tau, next, opts);
        tau = next;
        out.push_back(KFlowResult{RegularizedState{x[0], x[1], x[2], x[3], s.C_J}, x[4]});
    }
    return out;
}

KFlowResult k_flow(const RegularizedState& s, double mu, double tau, const IntegratorOptions& opts) {
    OdeState x{s.p_xi, s.p_nu, s.xi, s.nu, 0.0};
    integrate(k_rhs(mu, s.C_J), x, 0.0, tau, opts);
    return KFlowResult{RegularizedState{x[0], x[1], x[2], x[3], s.C_J}, x[4]};
}

double anomaly_integral(double l, double e) {
    if (!(e >= 0.0 && e < 1.0)) throw DomainError("anomaly_integral: e must lie in [0, 1)");
    const double turns = std::round(l / kTwoPi);
    const double lr = l - kTwoPi * turns;  // in [-pi, pi]
    const double s = std::sqrt(1.0 - e * e);
    const double half = 2.0 / s * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * lr), std::sqrt(1.0 - e) * std::cos(0.5 * lr));
    return half + turns * kTwoPi / s;
}

ActionAngle action_angle_from_state(const RegularizedState& s, AngleFormula formula) {
    const double G = lc_angular_momentum(s);
    const double C = s.C_J;
    if (G == 0.0) throw DomainError("action-angle chart invalid at G=0");
    ActionAngle aa;
    aa.G = G;
    aa.K = k_value(s, 0.0);
    const double w2 = -G - 2.0 * C;
    if (!(w2 > 0.0)) throw DomainError("action_angle_from_state: condition G + 2C < 0 violated");
    if (!(aa.K + 1.0 > 0.0)) throw DomainError("action_angle_from_state: requires K + 1 > 0");
    const double disc = (aa.K + 1.0) * (aa.K + 1.0) + G * G * (G + 2.0 * C) / 4.0;
    if (disc < -1e-14 * (aa.K + 1.0) * (aa.K + 1.0)) {
        throw DomainError("action_angle_from_state: requires (K+1)^2 + G^2 (G+2C)/4 > 0");
    }
    aa.omega = std::sqrt(w2);
    aa.L = (aa.K + 1.0) / aa.omega;
    aa.a = aa.L / aa.omega;
    // e^2 is what the state determines to rounding; e itself amplifies that to ~1e-8.
    const double e2 = 1.0 - G * G / (4.0 * aa.L * aa.L);
    if (e2 <= 1e-12) throw DegenerateError("action_angle_from_state: circular torus (e = 0); l is undefined");
    aa.e = std::sqrt(e2);
    aa.L_star = aa.L - std::abs(G) / 2.0;

    const double u = s.xi * s.xi + s.nu * s.nu;
    const double r = std::sqrt(u);
    const double R = (s.xi * s.p_xi + s.nu * s.p_nu) / r;
    // u = a (1 - e cos l) and du/dtau = r R / 2 = a e omega sin l.
    aa.l = std::atan2(r * R / (2.0 * aa.a * aa.omega), 1.0 - u / aa.a);
    if (aa.l == -kPi) aa.l = kPi;

    const double theta = std::atan2(s.nu, s.xi);
    double drift = G / (4.0 * aa.L);
    double sin_coef = aa.L * aa.e / (2.0 * w2);
    if (formula == AngleFormula::uncorrected_sin_factor) sin_coef *= 4.0;
    if (formula == AngleFormula::uncorrected_abs_g) drift = std::abs(G) / (4.0 * aa.L);
    aa.g = theta - drift * anomaly_integral(aa.l, aa.e) - sin_coef * std::sin(aa.l);
    return aa;
}

RegularizedState state_from_action_angle(double L, double G, double l, double g, double C) {
    if (G == 0.0) throw DomainError("action-angle chart invalid at G=0");
    const double w2 = -G - 2.0 * C;
    if (!(w2 > 0.0)) throw DomainError("state_from_action_angle: condition G + 2C < 0 violated");
    if (!(L > std::abs(G) / 2.0)) {
        throw DomainError("state_from_action_angle: requires L > |G|/2, i.e. (K+1)^2 + G^2 (G+2C)/4 > 0");
    }
    const double omega = std::sqrt(w2);
    const double a = L / omega;
    const double e = std::sqrt(1.0 - G * G / (4.0 * L * L));
    const double u = a * (1.0 - e * std::cos(l));
    const double r = std::sqrt(u);
    const double R = 2.0 * a * omega * e * std::sin(l) / r;
    const double theta = g + G / (4.0 * L) * anomaly_integral(l, e) + L * e / (2.0 * w2) * std::sin(l);
    return from_polar(R, G, r, theta, C);
}

RegularizedState perihelion_state(double L, double G, double C, double g) {
    return state_from_action_angle(L, G, 0.0, g, C);
}

AngleCycleReport angle_consistency_check(const RegularizedState& s, AngleFormula formula, int samples) {
    if (samples < 16) throw DomainError("angle_consistency_check: need at least 16 samples per cycle");
    const ActionAngle base = action_angle_from_state(s, formula);
    AngleCycleReport rep;
    rep.G = base.G;
    rep.sign = base.G > 0.0 ? 1 : -1;
    const double C = s.C_J;
    const double theta0 = std::atan2(s.nu, s.xi);
    const double r0 = std::sqrt(s.xi * s.xi + s.nu * s.nu);
    const double R0 = (s.xi * s.p_xi + s.nu * s.p_nu) / r0;

    // Accumulates unwrapped changes of l and h = g + sign l / 2 along a sampled closed path.
    auto walk = [&](auto point_at, double& dl, double& dh) {
        ActionAngle prev = action_angle_from_state(point_at(0.0), formula);
        dl = 0.0;
        dh = 0.0;
        for (int k = 1; k <= samples; ++k) {
            const ActionAngle cur = action_angle_from_state(point_at(kTwoPi * k / samples), formula);
            dl += wrap_difference(cur.l - prev.l);
            dh += wrap_difference((cur.g + 0.5 * rep.sign * cur.l) - (prev.g + 0.5 * rep.sign * prev.l));
            prev = cur;
        }
    };

    // r-cycle: theta fixed, r from r_min to r_max (R >= 0) and back (R <= 0).
    walk(
        [&](double phase) {
            const double u = base.a * (1.0 - base.e * std::cos(phase));
            const double r = std::sqrt(u);
            const double R = 2.0 * base.a * base.omega * base.e * std::sin(phase) / r;
            return from_polar(R, base.G, r, theta0, C);
        },
        rep.r_cycle_dl, rep.r_cycle_dh);

    // theta-cycle: r and R fixed, theta once around.
    walk([&](double phase) { return from_polar(R0, base.G, r0, theta0 + phase, C); }, rep.theta_cycle_dl,
         rep.theta_cycle_dh);

    rep.max_error = std::max({std::abs(rep.r_cycle_dl - kTwoPi), std::abs(rep.r_cycle_dh),
                              std::abs(rep.theta_cycle_dl), std::abs(rep.theta_cycle_dh - kTwoPi)});
    return rep;
}

}  // namespace resorb
