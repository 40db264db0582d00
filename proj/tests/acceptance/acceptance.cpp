// Acceptance checks for the stability coefficient stack. Each criterion prints its
// measurements followed by one PASS/FAIL line; the exit status is nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lc_checks.hpp"
#include "oracles.hpp"
#include "resorb/coefficient.hpp"
#include "resorb/kepler.hpp"
#include "resorb/levi_civita.hpp"
#include "resorb/series.hpp"
#include "resorb/verifier.hpp"

using namespace resorb;

namespace {

struct Outcome {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
};

std::vector<Outcome> outcomes;

// Measurement lines are indented under the criterion they belong to.
void note(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

void criterion(int id, const std::string& title, const std::function<bool()>& body) {
    std::printf("criterion %d: %s\n", id, title.c_str());
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
        pass = body();
    } catch (const std::exception& ex) {
        note("unexpected exception: %s", ex.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    outcomes.push_back({id, title, pass, dt});
    std::printf("%s criterion %d (%.1f s)\n\n", pass ? "PASS" : "FAIL", id, dt);
    std::fflush(stdout);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return g;
}

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> C_on_grid(const ResonantFamily& f, const std::vector<double>& grid) {
    std::vector<double> out;
    for (double e : grid) out.push_back(compute_C(ResonantFamily::make(f.p, f.q, e, f.n_l, f.n_g, f.direction)).C);
    return out;
}

const std::vector<double> kSlopeGrid = geometric_grid(0.003, 0.03, 9);

bool slope_criterion(const std::vector<std::pair<int, int>>& pairs, Direction dir) {
    bool ok = true;
    for (const auto& [p, q] : pairs) {
        const int m = dir == Direction::direct ? std::abs(p - q) : p + q;
        const auto fams = canonical_families(p, q, 0.01, dir);
        std::vector<std::vector<double>> curves;
        for (const auto& f : fams) {
            curves.push_back(C_on_grid(f, kSlopeGrid));
            const double s = loglog_slope(kSlopeGrid, curves.back());
            const bool good = std::abs(s - m) <= 0.05;
            note("%-28s slope %.4f (expected %d)%s", f.label().c_str(), s, m, good ? "" : "  <-- off");
            ok = ok && good;
        }
        // Diagnostic only: the half difference drops the e^{2m} term the two families share.
        std::vector<double> odd(kSlopeGrid.size());
        for (std::size_t i = 0; i < odd.size(); ++i) odd[i] = 0.5 * (curves[0][i] - curves[1][i]);
        note("%28s half-difference slope %.4f", "", loglog_slope(kSlopeGrid, odd));
    }
    return ok;
}

// Multiplier-law runs shared by criteria 1 and 8.
struct VerifiedFamily {
    ResonantFamily family;
    double C = 0.0;
    Extrapolation fit;
};
std::vector<VerifiedFamily> verified;

const std::vector<double> kMuList{1e-4, 3e-5, 1e-5, 3e-6};

}  // namespace

int main() {
    criterion(1, "multiplier law: extrapolated C within 1%, mu = 1e-5 estimate within 5%", [] {
        bool ok = true;
        for (const auto& [p, q, e] : {std::tuple{1, 3, 0.3}, std::tuple{2, 7, 0.4}}) {
            for (const auto& f : canonical_families(p, q, e, Direction::direct)) {
                const double C = compute_C(f).C;
                const Extrapolation fit = extrapolate_C(f, kMuList);
                verified.push_back({f, C, fit});
                const auto at = std::find(fit.mu.begin(), fit.mu.end(), 1e-5) - fit.mu.begin();
                const double rel_fit = std::abs(fit.C - C) / std::abs(C);
                const double rel_mu = std::abs(fit.estimates[static_cast<std::size_t>(at)] - C) / std::abs(C);
                const bool good = rel_fit <= 0.01 && rel_mu <= 0.05;
                note("%-28s C %+.6e  fit %+.6e (rel %.2e)  mu=1e-5 rel %.2e%s", f.label().c_str(), C, fit.C,
                     rel_fit, rel_mu, good ? "" : "  <-- off");
                ok = ok && good;
            }
        }
        return ok;
    });

    criterion(2, "direct order of vanishing: slope |p - q| +- 0.05 on e in [0.003, 0.03]", [] {
        return slope_criterion({{1, 2}, {1, 3}, {2, 3}, {2, 7}, {3, 2}}, Direction::direct);
    });

    criterion(3, "retrograde order of vanishing: slope p + q +- 0.05 on e in [0.003, 0.03]", [] {
        return slope_criterion({{1, 2}, {1, 3}, {2, 3}}, Direction::retrograde);
    });

    criterion(4, "leading coefficients of the two families cancel; their sum decays one order faster", [] {
        bool ok = true;
        double worst = 0.0;
        int count = 0;
        for (int p = 1; p <= 9; ++p) {
            for (int q = 1; q <= 9; ++q) {
                if (p == q || std::gcd(p, q) != 1) continue;
                for (auto dir : {Direction::direct, Direction::retrograde}) {
                    const auto fams = canonical_families(p, q, 0.1, dir);
                    const double a = leading_coefficient(fams[0]).value;
                    const double b = leading_coefficient(fams[1]).value;
                    const double rel = std::abs(a + b) / std::max(std::abs(a), std::abs(b));
                    worst = std::max(worst, rel);
                    ++count;
                    if (!(rel <= 1e-12) || a == 0.0) {
                        note("p/q = %d/%d %s: %+.6e + %+.6e (rel %.2e)", p, q, to_string(dir).c_str(), a, b, rel);
                        ok = false;
                    }
                }
            }
        }
        note("%d resonances, worst relative leading sum %.2e", count, worst);

        const std::vector<std::tuple<int, int, Direction>> sums{
            {1, 2, Direction::direct}, {1, 3, Direction::direct},     {2, 3, Direction::direct},
            {2, 7, Direction::direct}, {3, 2, Direction::direct},     {1, 2, Direction::retrograde},
            {1, 3, Direction::retrograde}, {2, 3, Direction::retrograde}};
        // The sum is O(e^{2m}); below e ~ 0.03 it sinks under the quadrature floor for the
        // larger m, so its slope is taken where it is resolved.
        const std::vector<double> grid = geometric_grid(0.03, 0.15, 7);
        for (const auto& [p, q, dir] : sums) {
            const auto fams = canonical_families(p, q, 0.01, dir);
            const int m = leading_coefficient(fams[0]).exponent;
            const auto c0 = C_on_grid(fams[0], grid);
            const auto c1 = C_on_grid(fams[1], grid);
            std::vector<double> sum(c0.size());
            double resolved = 1e300;
            for (std::size_t i = 0; i < c0.size(); ++i) {
                sum[i] = c0[i] + c1[i];
                resolved = std::min(resolved, std::abs(sum[i]) / (1e-10 * std::abs(c0[i]) + 1e-15));
            }
            const double s_sum = loglog_slope(grid, sum);
            const bool good = s_sum >= m + 1 - 0.05 && resolved > 10.0;
            note("p/q = %d/%d %-10s terms vanish like e^%d, their sum with slope %.3f (resolved %.0ex)%s", p, q,
                 to_string(dir).c_str(), m, s_sum, resolved, good ? "" : "  <-- off");
            ok = ok && good;
        }
        return ok;
    });

    criterion(5, "C(e)/e^m extrapolated to e -> 0 matches the leading series coefficient within 2%", [] {
        const std::vector<std::tuple<int, int, Direction>> set{
            {1, 2, Direction::direct},     {1, 3, Direction::direct},     {2, 3, Direction::direct},
            {2, 7, Direction::direct},     {3, 2, Direction::direct},     {2, 1, Direction::direct},
            {1, 2, Direction::retrograde}, {1, 3, Direction::retrograde}, {2, 3, Direction::retrograde}};
        bool ok = true;
        for (const auto& [p, q, dir] : set) {
            for (const auto& f : canonical_families(p, q, 0.01, dir)) {
                const LeadingCoefficient lead = leading_coefficient(f);
                const int m = lead.exponent;
                auto ratio = [&](double e) {
                    return compute_C(ResonantFamily::make(f.p, f.q, e, f.n_l, f.n_g, f.direction)).C / std::pow(e, m);
                };
                // m = 1 carries an e^{m+1} correction, so it needs the three-point form.
                const double limit = m >= 2 ? (4 * ratio(0.01) - ratio(0.02)) / 3
                                            : (8 * ratio(0.005) - 6 * ratio(0.01) + ratio(0.02)) / 3;
                const double rel = std::abs(limit - lead.value) / std::abs(lead.value);
                const bool good = rel <= 0.02;
                note("%-28s m=%d series %+.6e  quadrature %+.6e  rel %.2e%s", f.label().c_str(), m, lead.value, limit,
                     rel, good ? "" : "  <-- off");
                ok = ok && good;
            }
        }
        return ok;
    });

    criterion(6, "sweep curves for 1/3 and 2/7 vanish at e = 0, have opposite signs and are node-converged", [] {
        std::vector<double> grid;
        for (int i = 1; i <= 12; ++i) grid.push_back(0.05 * i);
        bool ok = true;
        for (const auto& [p, q] : {std::pair{1, 3}, std::pair{2, 7}}) {
            const auto rows = sweep_e(p, q, Direction::direct, grid);
            double peak = 0.0, worst_doubling = 0.0;
            bool signs = true;
            for (const auto& row : rows) {
                for (std::size_t k = 0; k < 2; ++k) {
                    const FamilyOutcome& fam = row.families[k];
                    if (fam.status != "ok") {
                        note("p/q = %d/%d e = %.2f family %zu: %s", p, q, row.e, k, fam.status.c_str());
                        signs = false;
                        continue;
                    }
                    peak = std::max(peak, std::abs(fam.result->C));
                    const auto f = canonical_families(p, q, row.e, Direction::direct)[k];
                    const double doubled = trapezoid_C(f, 2 * fam.result->nodes).C;
                    worst_doubling = std::max(worst_doubling, std::abs(doubled - fam.result->C) / std::abs(fam.result->C));
                }
                if (signs) signs = row.families[0].result->C * row.families[1].result->C < 0.0;
            }
            // Approach to e = 0: |C| shrinks like e^m, so it must drop by at least 10^m per decade.
            const int m = std::abs(p - q);
            double vanish = 0.0;
            bool decay = true;
            for (const auto& f : canonical_families(p, q, 0.05, Direction::direct)) {
                const auto c = C_on_grid(f, {0.05, 0.005, 0.0005});
                vanish = std::max(vanish, std::abs(c[2]) / peak);
                decay = decay && std::abs(c[1]) <= 1.1 * std::abs(c[0]) * std::pow(0.1, m) &&
                        std::abs(c[2]) <= 1.1 * std::abs(c[1]) * std::pow(0.1, m);
            }
            const bool good = signs && decay && vanish <= 1e-6 && worst_doubling <= 1e-9;
            note("p/q = %d/%d: opposite signs %s, |C(5e-4)|/max|C| %.1e, decay per decade %s, node doubling %.1e", p,
                 q, signs ? "yes" : "no", vanish, decay ? "ok" : "off", worst_doubling);
            ok = ok && good;
        }
        return ok;
    });

    criterion(7, "the three formulations of C agree to 1e-8", [] {
        const std::vector<ResonantFamily> fams{ResonantFamily::make(1, 3, 0.3, 0, 0, Direction::direct),
                                               ResonantFamily::make(2, 7, 0.4, 0, 1, Direction::direct),
                                               ResonantFamily::make(1, 2, 0.2, 0, 0, Direction::retrograde)};
        bool ok = true;
        for (const auto& f : fams) {
            const double polar = compute_C(f, 1e-13).C;
            const double ll = oracle::C_from_omega_ll(f);
            const double gg = oracle::C_from_omega_gg(f);
            const double worst = std::max(std::abs(ll - polar), std::abs(gg - polar)) / std::abs(polar);
            const bool good = worst <= 1e-8;
            note("%-28s polar %+.12e  l-l %+.12e  g-g %+.12e  rel %.1e%s", f.label().c_str(), polar, ll, gg, worst,
                 good ? "" : "  <-- off");
            ok = ok && good;
        }
        return ok;
    });

    criterion(8, "monodromy: det 1 +- 1e-8, multipliers {1, 1, lambda, 1/lambda}, stability follows sign C", [] {
        // Retrograde 1/2 joins the families verified under criterion 1.
        for (const auto& f : canonical_families(1, 2, 0.2, Direction::retrograde)) {
            verified.push_back({f, compute_C(f).C, extrapolate_C(f, kMuList)});
        }
        bool ok = !verified.empty();
        for (const auto& v : verified) {
            double det = 0.0, trivial = 0.0, recip = 0.0;
            bool classes = true;
            for (const auto& r : v.fit.reports) {
                det = std::max(det, std::abs(r.determinant - 1.0));
                trivial = std::max(trivial, r.trivial_pair_error);
                recip = std::max(recip, r.reciprocal_error);
                classes = classes && r.hyperbolic == (v.C > 0.0);
            }
            const bool good = det <= 1e-8 && trivial <= 1e-6 && recip <= 1e-9 && classes;
            note("%-28s C %+.3e %s  |det-1| %.1e  trivial pair %.1e  lambda*mu-1 %.1e%s", v.family.label().c_str(),
                 v.C, v.C > 0 ? "hyperbolic" : "elliptic  ", det, trivial, recip, good ? "" : "  <-- off");
            ok = ok && good;
        }
        return ok;
    });

    criterion(9, "Levi-Civita: canonical map, conserved K and G, frequencies, cycles, corrected chart needed", [] {
        constexpr double kC = -1.5;
        bool ok = true;

        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> pos(-1.5, 1.5), mom(-1.0, 1.0);
        double symp = 0.0;
        for (int made = 0; made < 50;) {
            const RtbpState s{mom(rng), mom(rng), pos(rng), pos(rng)};
            if (std::hypot(s.x + 0.01, s.y) < 0.1 || (s.x + 0.01 < 0.0 && std::abs(s.y) < 0.1)) continue;
            ++made;
            symp = std::max(symp, lc_checks::symplectic_error(s, 0.01));
        }
        note("symplecticity, 50 random states: %.1e (tol 1e-9)", symp);
        ok = ok && symp <= 1e-9;

        for (double G : {0.3, -0.3}) {
            const RegularizedState s0 = state_from_action_angle(0.55, G, 0.4, 1.0, kC);
            const ActionAngle a0 = action_angle_from_state(s0);
            std::vector<double> taus;
            for (int i = 1; i <= 400; ++i) taus.push_back(10 * kTwoPi / a0.omega * i / 400);
            double dk = 0.0, dg = 0.0;
            for (const auto& pt : k_flow_samples(s0, 0.0, taus)) {
                dk = std::max(dk, std::abs(k_value(pt.state, 0.0) - a0.K));
                dg = std::max(dg, std::abs(lc_angular_momentum(pt.state) - G));
            }
            const double freq = lc_checks::frequency_error(s0, AngleFormula::corrected);
            const AngleCycleReport cyc = angle_consistency_check(s0);
            const bool sign_ok = cyc.sign == (G > 0 ? 1 : -1);
            const double sin_variant = lc_checks::frequency_error(s0, AngleFormula::uncorrected_sin_factor);
            const double abs_variant =
                std::max(lc_checks::frequency_error(s0, AngleFormula::uncorrected_abs_g),
                         angle_consistency_check(s0, AngleFormula::uncorrected_abs_g).max_error);
            const bool good = dk <= 1e-11 && dg <= 1e-11 && freq <= 1e-8 && cyc.max_error <= 1e-9 && sign_ok &&
                              sin_variant > 1e-8 && (G > 0 || abs_variant > 1e-8);
            note("G = %+.1f: K drift %.1e, G drift %.1e, frequency error %.1e, cycle error %.1e (dl %+.4f, dh %+.4f)",
                 G, dk, dg, freq, cyc.max_error, cyc.r_cycle_dl, cyc.theta_cycle_dh);
            note("         uncorrected sin l factor: frequency error %.1e (must exceed 1e-8)%s", sin_variant,
                 good ? "" : "  <-- off");
            if (G < 0) note("         |G| in place of G: error %.1e (must exceed 1e-8)", abs_variant);
            ok = ok && good;
        }
        return ok;
    });

    criterion(10, "10^4 randomized coordinate round trips at 1e-12, Kepler residuals at 1e-14", [] {
        std::mt19937_64 rng(314159);
        std::uniform_real_distribution<double> ecc(0.0, 0.95), angle(-kTwoPi, kTwoPi), size(0.3, 2.0);
        constexpr int kCases = 20000;
        double residual = 0.0, action = 0.0, angles = 0.0, cart = 0.0;
        auto gap = [](double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); };
        for (int i = 0; i < kCases; ++i) {
            const double e = ecc(rng);
            const double l = angle(rng);
            const double E = solve_kepler(l, e);
            residual = std::max(residual, std::abs(E - e * std::sin(E) - l));

            if (e < 1e-3) continue;  // perihelion is undefined on the circle
            const double L = (i % 2 == 0 ? 1.0 : -1.0) * size(rng);
            const DelaunayState d{L, L * std::sqrt(1.0 - e * e), l, angle(rng)};
            const PolarState p = delaunay_to_polar(d);
            const DelaunayState back = polar_to_delaunay(p);
            action = std::max({action, std::abs(back.L - d.L), std::abs(back.G - d.G)});
            angles = std::max({angles, gap(back.l, d.l), gap(back.g, d.g)});
            const RtbpState x = polar_to_cartesian_rotating(p);
            const RtbpState x2 = polar_to_cartesian_rotating(cartesian_rotating_to_polar(x));
            cart = std::max({cart, std::abs(x2.px - x.px), std::abs(x2.py - x.py), std::abs(x2.x - x.x),
                             std::abs(x2.y - x.y)});
        }
        note("%d cases: Kepler residual %.1e, actions %.1e, angles %.1e, Cartesian %.1e", kCases, residual, action,
             angles, cart);
        return residual <= 1e-14 && action <= 1e-12 && angles <= 1e-12 && cart <= 1e-12;
    });

    int failed = 0;
    std::printf("summary\n");
    for (const auto& o : outcomes) {
        std::printf("  %s  %2d  %s\n", o.pass ? "PASS" : "FAIL", o.id, o.title.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(outcomes.size()) - failed, outcomes.size());
    return failed == 0 ? 0 : 1;
}
