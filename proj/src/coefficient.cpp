#include "resorb/coefficient.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/tools/minima.hpp>

namespace resorb {

namespace {

using Real = long double;

struct Sums {
    Real c1 = 0;
    Real c2 = 0;
    Real magnitude = 0;  // sum of |integrand|, for the rounding floor
};

// Adds the integrand at nodes F = 2 pi (offset + stride k) / n, k = 0.. while index < n.
Sums accumulate(const ResonantFamily& f, long n, long offset, long stride) {
    constexpr Real two_pi = 2 * std::numbers::pi_v<Real>;
    Sums s;
    for (long i = offset; i < n; i += stride) {
        const Real F = two_pi * static_cast<Real>(i) / static_cast<Real>(n);
        const auto pt = resonant_track_t<Real>(f, F);
        const Real a = c1_integrand(pt.r, pt.theta);
        const Real b = c2_integrand(pt.r, pt.theta);
        s.c1 += a;
        s.c2 += b;
        s.magnitude += std::abs(a) + std::abs(b);
    }
    return s;
}

CoefficientResult assemble(const ResonantFamily& f, const Sums& total, long n) {
    constexpr Real two_pi = 2 * std::numbers::pi_v<Real>;
    const Real h = two_pi / static_cast<Real>(n);
    const Real pref = -6 * std::numbers::pi_v<Real> * static_cast<Real>(f.p) * static_cast<Real>(f.p);
    const Real c1 = h * total.c1;
    const Real c2 = h * total.c2;
    CoefficientResult r;
    r.C1 = static_cast<double>(c1);
    r.C2 = static_cast<double>(c2);
    r.C = static_cast<double>(pref * (c1 + c2));
    r.nodes = n;
    return r;
}

void require_no_collision(double d) {
    if (!(d > kCollisionThreshold)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "resonant track passes within %.3g of the small primary (threshold 1e-6)", d);
        throw CollisionError(msg);
    }
}

}  // namespace

CoefficientResult trapezoid_C(const ResonantFamily& f, long nodes) {
    if (nodes < 1) throw DomainError("trapezoid_C: node count must be positive");
    const double md = min_delta1(f);
    require_no_collision(md);
    CoefficientResult r = assemble(f, accumulate(f, nodes, 0, 1), nodes);
    r.min_delta1 = md;
    return r;
}

CoefficientResult compute_C(const ResonantFamily& f, double tol) {
    if (!(tol > 0.0)) throw DomainError("compute_C: tolerance must be positive");
    const double md = min_delta1(f);
    require_no_collision(md);

    const Real eps = std::numeric_limits<Real>::epsilon();
    const Real pref = 6 * std::numbers::pi_v<Real> * static_cast<Real>(f.p) * static_cast<Real>(f.p);

    long n = kInitialQuadratureNodes;
    Sums total = accumulate(f, n, 0, 1);
    CoefficientResult prev = assemble(f, total, n);
    while (n < kMaxQuadratureNodes) {
        const long n2 = 2 * n;
        const Sums odd = accumulate(f, n2, 1, 2);
        total.c1 += odd.c1;
        total.c2 += odd.c2;
        total.magnitude += odd.magnitude;
        CoefficientResult cur = assemble(f, total, n2);
        const double diff = std::abs(cur.C - prev.C);
        const Real h = 2 * std::numbers::pi_v<Real> / static_cast<Real>(n2);
        const double floor = static_cast<double>(64 * eps * pref * h * total.magnitude);
        cur.err_estimate = diff;
        cur.min_delta1 = md;
        if (diff <= tol * std::abs(cur.C) || diff <= floor) return cur;
        prev = cur;
        n = n2;
    }
    throw ConvergenceError("compute_C: tolerance not reached at 2^20 nodes for " + f.label());
}

double min_delta1(const ResonantFamily& f) {
    constexpr int kSamples = 4096;
    constexpr int kRefine = 4;
    const double h = kTwoPi / kSamples;
    std::vector<double> d2(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        const double dist = resonant_track(f, h * i).delta1;
        d2[i] = dist * dist;
    }
    // Local minima of the periodic sample sequence, best first.
    std::vector<int> minima;
    for (int i = 0; i < kSamples; ++i) {
        const double left = d2[(i + kSamples - 1) % kSamples];
        const double right = d2[(i + 1) % kSamples];
        if (d2[i] <= left && d2[i] <= right) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](int a, int b) { return d2[a] < d2[b]; });
    if (minima.size() > kRefine) minima.resize(kRefine);

    double best = *std::min_element(d2.begin(), d2.end());
    auto objective = [&](double F) {
        const double dist = resonant_track(f, F).delta1;
        return dist * dist;
    };
    for (int i : minima) {
        const auto [F, val] =
            boost::math::tools::brent_find_minima(objective, h * (i - 1), h * (i + 1), std::numeric_limits<double>::digits);
        (void)F;
        best = std::min(best, val);
    }
    return std::sqrt(best);
}

std::vector<SweepRow> sweep_e(int p, int q, Direction dir, std::span<const double> e_grid, double tol,
                              unsigned threads) {
    std::vector<SweepRow> rows(e_grid.size());
    auto work = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.e = e_grid[i];
        for (int k = 0; k < 2; ++k) {
            FamilyOutcome& out = row.families[k];
            try {
                const auto fams = canonical_families(p, q, e_grid[i], dir);
                out.min_delta1 = min_delta1(fams[k]);
                out.result = compute_C(fams[k], tol);
                out.status = "ok";
            } catch (const CollisionError& ex) {
                out.status = "collision";
                out.message = ex.what();
            } catch (const ConvergenceError& ex) {
                out.status = "no_convergence";
                out.message = ex.what();
            } catch (const DomainError& ex) {
                out.status = "invalid";
                out.message = ex.what();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, rows.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) work(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < rows.size(); i = next++) work(i);
        });
    }
    pool.clear();
    return rows;
}

}  // namespace resorb
