#include "resorb/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "resorb/errors.hpp"

namespace resorb {

namespace {

struct Potential {
    double vx, vy;          // gradient of V = -(1-mu)/D0 - mu/D1
    double vxx, vxy, vyy;   // Hessian
};

Potential potential(double x, double y, double mu, bool hessian) {
    Potential out{0, 0, 0, 0, 0};
    const double masses[2] = {1.0 - mu, mu};
    const double centers[2] = {-mu, 1.0 - mu};
    for (int i = 0; i < 2; ++i) {
        if (masses[i] == 0.0) continue;
        const double dx = x - centers[i];
        const double d2 = dx * dx + y * y;
        const double d = std::sqrt(d2);
        if (!(d > kRtbpCollisionRadius)) {
            throw CollisionError(i == 0 ? "collision with the primary of mass 1-mu" : "collision with the primary of mass mu");
        }
        const double d3 = d2 * d;
        out.vx += masses[i] * dx / d3;
        out.vy += masses[i] * y / d3;
        if (hessian) {
            const double d5 = d3 * d2;
            out.vxx += masses[i] * (1.0 / d3 - 3.0 * dx * dx / d5);
            out.vxy += masses[i] * (-3.0 * dx * y / d5);
            out.vyy += masses[i] * (1.0 / d3 - 3.0 * y * y / d5);
        }
    }
    return out;
}

Mat4 jacobian_from(const Potential& v) {
    Mat4 J;
    J << 0, 1, -v.vxx, -v.vxy,
        -1, 0, -v.vxy, -v.vyy,
         1, 0, 0, 1,
         0, 1, -1, 0;
    return J;
}

}  // namespace

Vec4 to_vector(const RtbpState& s) { return Vec4(s.px, s.py, s.x, s.y); }

RtbpState from_vector(const Vec4& v) { return RtbpState{v[0], v[1], v[2], v[3]}; }

double rtbp_hamiltonian(const RtbpState& s, double mu) {
    const double d0 = std::hypot(s.x + mu, s.y);
    const double d1 = std::hypot(s.x - 1.0 + mu, s.y);
    return 0.5 * (s.px * s.px + s.py * s.py) + s.y * s.px - s.x * s.py - (1.0 - mu) / d0 - (mu == 0.0 ? 0.0 : mu / d1);
}

Vec4 rtbp_derivatives(const RtbpState& s, double mu) {
    const Potential v = potential(s.x, s.y, mu, false);
    return Vec4(s.py - v.vx, -s.px - v.vy, s.px + s.y, s.py - s.x);
}

Mat4 rtbp_jacobian(const RtbpState& s, double mu) {
    return jacobian_from(potential(s.x, s.y, mu, true));
}

FlowResult rtbp_flow(const RtbpState& s, double mu, double t, bool with_stm, const IntegratorOptions& opts) {
    OdeState x(with_stm ? 20 : 4, 0.0);
    x[0] = s.px;
    x[1] = s.py;
    x[2] = s.x;
    x[3] = s.y;
    if (with_stm) {
        for (int i = 0; i < 4; ++i) x[4 + 5 * i] = 1.0;  // row-major identity
    }
    auto rhs = [mu, with_stm](const OdeState& u, OdeState& du, double) {
        const Potential v = potential(u[2], u[3], mu, with_stm);
        du[0] = u[1] - v.vx;
        du[1] = -u[0] - v.vy;
        du[2] = u[0] + u[3];
        du[3] = u[1] - u[2];
        if (with_stm) {
            Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> phi(u.data() + 4);
            Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> dphi(du.data() + 4);
            dphi = jacobian_from(v) * phi;
        }
    };
    FlowResult out;
    out.steps = integrate(rhs, x, 0.0, t, opts);
    out.state = RtbpState{x[0], x[1], x[2], x[3]};
    if (with_stm) {
        out.stm = Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(x.data() + 4);
    }
    return out;
}

std::pair<RtbpState, double> unperturbed_seed(const ResonantFamily& f) {
    const double sign = f.direction == Direction::direct ? 1.0 : -1.0;
    const double L = sign * f.action();
    const DelaunayState d{L, L * std::sqrt(1.0 - f.e * f.e), f.n_l * kPi, f.n_g * kPi};
    RtbpState s = polar_to_cartesian_rotating(delaunay_to_polar(d));
    // Exact symmetric section; the transforms leave rounding-level y and p_x.
    s.y = 0.0;
    s.px = 0.0;
    return {s, kPi * f.p};
}

PeriodicOrbit refine_periodic_orbit(const ResonantFamily& f, double mu, double tol, const IntegratorOptions& opts) {
    if (!(mu > 0.0 && mu < 0.5)) throw DomainError("refine_periodic_orbit: mu must lie in (0, 0.5)");
    if (!(tol > 0.0)) throw DomainError("refine_periodic_orbit: tolerance must be positive");
    auto [seed, half] = unperturbed_seed(f);
    const double G = seed.x * seed.py;
    double x0 = seed.x;
    const double seed_half = half;
    constexpr double kFamilyWindow = 0.05;

    constexpr int kMaxIterations = 30;
    double last_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= kMaxIterations; ++it) {
        const RtbpState s0{0.0, G / x0, x0, 0.0};
        const FlowResult fr = rtbp_flow(s0, mu, half, true, opts);
        const double ry = fr.state.y;
        const double rpx = fr.state.px;
        const double res = std::max(std::abs(ry), std::abs(rpx));
        // Once within tol, keep polishing while Newton still gains: the half-period
        // residual is amplified by the flow when checking closure over a full period.
        const bool polished = res <= 1e-3 * tol || (res <= tol && res >= 0.5 * last_res);
        last_res = res;
        if (polished || (res <= tol && it == kMaxIterations)) {
            // A root far from the unperturbed orbit belongs to another family.
            if (std::abs(half - seed_half) > kFamilyWindow * seed_half ||
                std::abs(x0 - seed.x) > kFamilyWindow * std::abs(seed.x)) {
                throw ConvergenceError("refine_periodic_orbit: Newton left the family for " + f.label() +
                                       " at mu=" + std::to_string(mu));
            }
            PeriodicOrbit o;
            o.family = f;
            o.mu = mu;
            o.initial = s0;
            o.period = 2.0 * half;
            o.residual_y = ry;
            o.residual_px = rpx;
            o.iterations = it;
            // Closure is an accuracy check on the corrected orbit, so it runs one decade tighter.
            IntegratorOptions fine = opts;
            fine.abs_tol *= 0.1;
            fine.rel_tol *= 0.1;
            const FlowResult full = rtbp_flow(s0, mu, o.period, false, fine);
            o.closure = (to_vector(full.state) - to_vector(s0)).cwiseAbs().maxCoeff();
            return o;
        }
        if (it == kMaxIterations) break;
        // d(state)/d(x0) along p_y = G/x0, and d(state)/d(half) = vector field.
        const Vec4 dx0 = fr.stm * Vec4(0.0, -G / (x0 * x0), 1.0, 0.0);
        const Vec4 dt = rtbp_derivatives(fr.state, mu);
        Eigen::Matrix2d J;
        J << dx0[3], dt[3], dx0[0], dt[0];
        const Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(-ry, -rpx));
        if (!step.allFinite()) break;
        x0 += step[0];
        half += step[1];
        if (!(x0 > 0.0 || x0 < 0.0) || !(half > 0.0)) break;
    }
    throw ConvergenceError("refine_periodic_orbit: Newton shooting did not converge for " + f.label() +
                           " at mu=" + std::to_string(mu));
}

MonodromyReport monodromy(const PeriodicOrbit& o, const IntegratorOptions& opts) {
    MonodromyReport rep;
    rep.mu = o.mu;
    rep.M = rtbp_flow(o.initial, o.mu, o.period, true, opts).stm;
    rep.trace = rep.M.trace();
    rep.determinant = rep.M.determinant();
    rep.C_estimate = o.mu > 0.0 ? (rep.trace - 4.0) / o.mu : std::numeric_limits<double>::quiet_NaN();

    Eigen::EigenSolver<Mat4> es(rep.M, false);
    std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a - 1.0) < std::abs(b - 1.0); });
    std::copy(ev.begin(), ev.end(), rep.eigenvalues.begin());
    rep.trivial_pair_error = std::max(std::abs(ev[0] - 1.0), std::abs(ev[1] - 1.0));
    rep.reciprocal_error = std::abs(ev[2] * ev[3] - 1.0);
    // The trivial pair contributes 2 to the trace, so lambda + 1/lambda = tr M - 2.
    rep.hyperbolic = rep.trace > 4.0;
    return rep;
}

Extrapolation extrapolate_C(const ResonantFamily& f, std::span<const double> mu_list, double tol,
                            const IntegratorOptions& opts, unsigned threads) {
    const std::size_t n = mu_list.size();
    if (n < 2) throw DomainError("extrapolate_C: need at least two mu values");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(mu_list[i] < mu_list[i - 1])) throw DomainError("extrapolate_C: mu_list must be strictly decreasing");
    }
    Extrapolation out;
    out.mu.assign(mu_list.begin(), mu_list.end());
    out.estimates.assign(n, 0.0);
    out.orbits.resize(n);
    out.reports.resize(n);
    std::vector<std::exception_ptr> errors(n);

    auto work = [&](std::size_t i) {
        try {
            out.orbits[i] = refine_periodic_orbit(f, mu_list[i], tol, opts);
            out.reports[i] = monodromy(out.orbits[i], opts);
            out.estimates[i] = out.reports[i].C_estimate;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) work(i);
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Extrapolation fit = fit_multiplier_law(out.mu, out.estimates);
    fit.orbits = std::move(out.orbits);
    fit.reports = std::move(out.reports);
    return fit;
}

Extrapolation fit_multiplier_law(std::span<const double> mu_list, std::span<const double> estimates) {
    const std::size_t n = mu_list.size();
    if (n < 2 || estimates.size() != n) throw DomainError("fit_multiplier_law: need at least two (mu, estimate) pairs");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(mu_list[i] < mu_list[i - 1])) throw DomainError("fit_multiplier_law: mu values must be strictly decreasing");
    }
    Extrapolation out;
    out.mu.assign(mu_list.begin(), mu_list.end());
    out.estimates.assign(estimates.begin(), estimates.end());
    // Least squares for estimate = C + slope * mu.
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        A(static_cast<Eigen::Index>(i), 0) = 1.0;
        A(static_cast<Eigen::Index>(i), 1) = mu_list[i];
        b[static_cast<Eigen::Index>(i)] = out.estimates[i];
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    out.C = coef[0];
    out.slope = coef[1];
    out.residual = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(n));

    // Estimates must approach the limit monotonically as mu decreases: every step moves
    // against the fitted slope, unless it is below the trace noise (about 1e-10 / mu).
    for (std::size_t i = 1; i < n; ++i) {
        const double step = out.estimates[i] - out.estimates[i - 1];
        const double noise = 1e-10 / mu_list[i] + 1e-9 * std::abs(out.C);
        if (std::abs(step) > noise && step * out.slope > 0.0) {
            throw ConvergenceError("extrapolate_C: estimates do not approach the limit monotonically at mu=" +
                                   std::to_string(mu_list[i]));
        }
    }
    return out;
}

}  // namespace resorb
