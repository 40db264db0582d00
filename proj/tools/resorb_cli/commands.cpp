#include "resorb_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "resorb/coefficient.hpp"
#include "resorb/errors.hpp"
#include "resorb/levi_civita.hpp"
#include "resorb/series.hpp"
#include "resorb/verifier.hpp"
#include "resorb_cli/cache.hpp"

namespace resorb::cli {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ResonantFamily> selected_families(const RunConfig& c, double e) {
    const auto all = canonical_families(c.p, c.q, e, c.direction);
    std::vector<ResonantFamily> out;
    for (int k : c.families) out.push_back(all[static_cast<std::size_t>(k)]);
    return out;
}

json family_json(const ResonantFamily& f) {
    return json{{"p", f.p}, {"q", f.q}, {"e", f.e}, {"n_l", f.n_l}, {"n_g", f.n_g}, {"direction", to_string(f.direction)}};
}

json leading_json(const LeadingCoefficient& lc) {
    return json{{"exponent", lc.exponent}, {"value", lc.value}, {"c1_part", lc.c1_part}, {"c2_part", lc.c2_part}};
}

json coefficient_json(const CoefficientResult& r) {
    return json{{"C", r.C},         {"C1", r.C1},
                {"C2", r.C2},       {"nodes", r.nodes},
                {"err_estimate", r.err_estimate}, {"min_delta1", r.min_delta1}};
}

IntegratorOptions integrator_options(const RunConfig& c) {
    IntegratorOptions o;
    o.abs_tol = c.integrator_tol;
    o.rel_tol = c.integrator_tol;
    return o;
}

double wrap(double d) { return d - kTwoPi * std::round(d / kTwoPi); }

// Runs work(i) for i in [0, n) on up to `threads` workers.
template <class Work>
void parallel_for(std::size_t n, unsigned threads, Work work) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) work(i);
        });
    }
}

json verify_point(const ResonantFamily& f, double mu, const RunConfig& c) {
    json j{{"mu", mu}};
    try {
        const auto opts = integrator_options(c);
        const PeriodicOrbit o = refine_periodic_orbit(f, mu, c.corrector_tol, opts);
        const MonodromyReport r = monodromy(o, opts);
        json ev = json::array();
        for (const auto& z : r.eigenvalues) ev.push_back(json::array({z.real(), z.imag()}));
        j["status"] = "ok";
        j["C_estimate"] = r.C_estimate;
        j["trace"] = r.trace;
        j["determinant"] = r.determinant;
        j["eigenvalues"] = ev;
        j["trivial_pair_error"] = r.trivial_pair_error;
        j["reciprocal_error"] = r.reciprocal_error;
        j["hyperbolic"] = r.hyperbolic;
        j["period"] = o.period;
        j["x0"] = o.initial.x;
        j["py0"] = o.initial.py;
        j["residual_y"] = o.residual_y;
        j["residual_px"] = o.residual_px;
        j["closure"] = o.closure;
        j["iterations"] = o.iterations;
    } catch (const ConvergenceError& ex) {
        j["status"] = "corrector_diverged";
        j["message"] = ex.what();
    } catch (const CollisionError& ex) {
        j["status"] = "collision";
        j["message"] = ex.what();
    }
    return j;
}

struct CheckTable {
    json checks = json::object();
    bool all_pass = true;
    void add(const std::string& name, double value, double tolerance, bool pass) {
        checks[name] = json{{"value", value}, {"tolerance", tolerance}, {"pass", pass}};
        all_pass = all_pass && pass;
    }
};

// Central-difference (dl/dtau, dg/dtau) at s, with g unwrapped through h = g + sign l / 2.
std::pair<double, double> measured_frequencies(const RegularizedState& s, AngleFormula formula,
                                               const IntegratorOptions& opts) {
    constexpr double h = 1e-3;
    const ActionAngle plus = action_angle_from_state(k_flow(s, 0.0, h, opts).state, formula);
    const ActionAngle minus = action_angle_from_state(k_flow(s, 0.0, -h, opts).state, formula);
    const double sign = plus.G > 0.0 ? 1.0 : -1.0;
    const double dl = wrap(plus.l - minus.l) / (2.0 * h);
    const double dh = wrap((plus.g + 0.5 * sign * plus.l) - (minus.g + 0.5 * sign * minus.l)) / (2.0 * h);
    return {dl, dh - 0.5 * sign * dl};
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json record_header(const std::string& command) {
    return json{{"schema_version", kSchemaVersion}, {"tool", "resorb"}, {"tool_version", RESORB_VERSION}, {"command", command}};
}

std::string verify_cache_key(const ResonantFamily& f, double mu, const RunConfig& c) {
    std::ostringstream k;
    k << "verify|v" << RESORB_VERSION << "|p=" << f.p << "|q=" << f.q << "|e=" << format_double(f.e) << "|n_l=" << f.n_l
      << "|n_g=" << f.n_g << "|dir=" << to_string(f.direction) << "|mu=" << format_double(mu)
      << "|itol=" << format_double(c.integrator_tol) << "|ctol=" << format_double(c.corrector_tol);
    return k.str();
}

CommandOutput cmd_coeff(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    json rec = record_header("coeff");
    rec["input"] = json{{"p", c.p},          {"q", c.q},
                        {"e", c.e},          {"direction", to_string(c.direction)},
                        {"families", c.families}, {"quad_tol", c.quad_tol}};
    json fams = json::array();
    bool failed = false;
    for (const auto& f : selected_families(c, c.e)) {
        json j{{"family", family_json(f)}};
        const LeadingCoefficient lc = leading_coefficient(f);
        j["leading"] = leading_json(lc);
        try {
            const CoefficientResult r = compute_C(f, c.quad_tol);
            j["status"] = "ok";
            j["result"] = coefficient_json(r);
            j["C_over_e_m"] = r.C / std::pow(f.e, lc.exponent);
        } catch (const CollisionError& ex) {
            j["status"] = "collision";
            j["message"] = ex.what();
            failed = true;
        } catch (const ConvergenceError& ex) {
            j["status"] = "no_convergence";
            j["message"] = ex.what();
            failed = true;
        }
        fams.push_back(j);
    }
    rec["outputs"] = json{{"families", fams}};
    rec["status"] = failed ? "failed" : "ok";
    rec["timings"] = json{{"wall_seconds", seconds_since(t0)}};
    out.record = rec;
    out.exit_code = failed ? kExitComputation : kExitOk;
    return out;
}

CommandOutput cmd_sweep(const RunConfig& c) {
    CommandOutput out;
    const auto grid = sweep_grid(c);
    const auto rows = sweep_e(c.p, c.q, c.direction, grid, c.quad_tol, c.threads);
    std::ostringstream csv;
    csv << kSweepHeader << '\n';
    bool any_ok = false;
    for (const auto& row : rows) {
        csv << format_double(row.e);
        for (const auto& fam : row.families) {
            csv << ',';
            if (fam.result) csv << format_double(fam.result->C);
        }
        for (const auto& fam : row.families) csv << ',' << format_double(fam.min_delta1);
        for (const auto& fam : row.families) {
            csv << ',' << fam.status;
            any_ok = any_ok || fam.status == "ok";
        }
        csv << '\n';
    }
    out.csv = csv.str();
    out.exit_code = (rows.empty() || any_ok) ? kExitOk : kExitComputation;
    return out;
}

CommandOutput cmd_series(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    json rec = record_header("series");
    rec["input"] = json{{"p", c.p}, {"q", c.q}, {"e", c.e}, {"direction", to_string(c.direction)}, {"order", c.order}};
    json fams = json::array();
    for (const auto& f : selected_families(c, c.e)) {
        const LeadingCoefficient lc = leading_coefficient(f);
        const int order = c.order >= 0 ? c.order : lc.exponent + 2;
        const CoefficientSeries s = coefficient_series(f, order);
        json j{{"family", family_json(f)}, {"leading", leading_json(lc)}, {"order", order},
               {"C_series", s.C},          {"C1_series", s.C1},           {"C2_series", s.C2}};
        if (f.direction == Direction::direct) {
            j["printed_closed_form_C1"] = closed_form_leading_c1(f);
        }
        if (f.q == 1) j["C2_bessel_sum"] = c2_bessel_sum(f);
        fams.push_back(j);
    }
    rec["outputs"] = json{{"families", fams}};
    rec["status"] = "ok";
    rec["timings"] = json{{"wall_seconds", seconds_since(t0)}};
    out.record = rec;
    return out;
}

CommandOutput cmd_verify(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    json rec = record_header("verify");
    rec["input"] = json{{"p", c.p},
                        {"q", c.q},
                        {"e", c.e},
                        {"direction", to_string(c.direction)},
                        {"families", c.families},
                        {"mu_list", c.mu_list},
                        {"quad_tol", c.quad_tol},
                        {"integrator_tol", c.integrator_tol},
                        {"corrector_tol", c.corrector_tol}};

    const ResultCache cache(c.cache_dir);
    const auto fams = selected_families(c, c.e);

    // One task per (family, mu); cached points skip integration.
    struct Task {
        std::size_t family;
        std::size_t mu;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < fams.size(); ++i)
        for (std::size_t k = 0; k < c.mu_list.size(); ++k) tasks.push_back({i, k});
    std::vector<json> points(tasks.size());
    std::atomic<int> hits{0};
    parallel_for(tasks.size(), c.threads, [&](std::size_t t) {
        const auto& f = fams[tasks[t].family];
        const double mu = c.mu_list[tasks[t].mu];
        const std::string key = verify_cache_key(f, mu, c);
        if (auto cached = cache.load(key)) {
            points[t] = *cached;
            ++hits;
            return;
        }
        points[t] = verify_point(f, mu, c);
        cache.store(key, points[t]);
    });

    json fam_out = json::array();
    int families_ok = 0;
    bool all_points_ok = true;
    for (std::size_t i = 0; i < fams.size(); ++i) {
        const auto& f = fams[i];
        json j{{"family", family_json(f)}};
        json per_mu = json::array();
        std::vector<double> mus, estimates;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].family != i) continue;
            per_mu.push_back(points[t]);
            if (points[t]["status"] == "ok") {
                mus.push_back(points[t]["mu"].get<double>());
                estimates.push_back(points[t]["C_estimate"].get<double>());
            } else {
                all_points_ok = false;
            }
        }
        j["per_mu"] = per_mu;

        double c_quad = 0.0;
        bool have_quad = false;
        try {
            c_quad = compute_C(f, c.quad_tol).C;
            have_quad = true;
            j["C_quadrature"] = c_quad;
        } catch (const Error& ex) {
            j["C_quadrature_status"] = ex.what();
        }

        if (mus.size() >= 2) {
            try {
                const Extrapolation ex = fit_multiplier_law(mus, estimates);
                json e{{"status", "ok"}, {"C", ex.C}, {"slope", ex.slope}, {"residual", ex.residual}};
                if (have_quad) e["relative_error"] = std::abs(ex.C - c_quad) / std::abs(c_quad);
                j["extrapolated"] = e;
                ++families_ok;
            } catch (const ConvergenceError& ex) {
                j["extrapolated"] = json{{"status", "non_monotone"}, {"message", ex.what()}};
            }
        } else if (mus.size() == 1) {
            json e{{"status", "single_mu"}, {"C", estimates[0]}};
            if (have_quad) e["relative_error"] = std::abs(estimates[0] - c_quad) / std::abs(c_quad);
            j["extrapolated"] = e;
            ++families_ok;
        } else {
            j["extrapolated"] = json{{"status", "no_converged_points"}};
        }
        fam_out.push_back(j);
    }
    rec["outputs"] = json{{"families", fam_out}};
    const bool ok = families_ok == static_cast<int>(fams.size());
    rec["status"] = ok ? (all_points_ok ? "ok" : "partial") : "failed";
    rec["timings"] = json{{"wall_seconds", seconds_since(t0)}, {"cache_hits", hits.load()}};
    out.record = rec;
    out.exit_code = ok ? kExitOk : kExitComputation;
    return out;
}

CommandOutput cmd_regularize(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    const double C = c.jacobi_c;
    const double G = c.lc_g_action;
    if (G == 0.0) throw DomainError("action-angle chart invalid at G=0");
    if (!(G + 2.0 * C < 0.0)) throw DomainError("condition G + 2C < 0 violated");
    const double omega = std::sqrt(-G - 2.0 * C);
    const double L = c.lc_l_action.value_or(1.0 / omega);  // K = L omega - 1
    const RegularizedState s0 = state_from_action_angle(L, G, c.lc_l_angle, c.lc_g_angle, C);
    const ActionAngle a0 = action_angle_from_state(s0);
    const IntegratorOptions opts = integrator_options(c);

    json rec = record_header("regularize");
    rec["input"] = json{{"C", C}, {"G", G}, {"L", L}, {"l", c.lc_l_angle}, {"g", c.lc_g_angle}, {"cycles", c.cycles},
                        {"integrator_tol", c.integrator_tol}};
    rec["initial_state"] = json{{"p_xi", s0.p_xi}, {"p_nu", s0.p_nu}, {"xi", s0.xi}, {"nu", s0.nu}, {"K", a0.K}};

    constexpr int kSamples = 200;
    const double sign = G > 0.0 ? 1.0 : -1.0;
    const double tau_total = c.cycles * kTwoPi / omega;
    std::vector<double> taus;
    for (int i = 1; i <= kSamples; ++i) taus.push_back(tau_total * i / kSamples);
    const auto traj = k_flow_samples(s0, 0.0, taus, opts);

    CheckTable table;
    double dk = 0.0, dg_action = 0.0, lc_rt = 0.0, act = 0.0, ang = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const RegularizedState& s = traj[i].state;
        dk = std::max(dk, std::abs(k_value(s, 0.0) - a0.K));
        dg_action = std::max(dg_action, std::abs(lc_angular_momentum(s) - G));
        // forward(inverse(s)) is s up to the sign of the branch.
        const RegularizedState back = lc_forward(lc_inverse(s, 0.0), 0.0, C);
        const double flip = (back.xi * s.xi + back.nu * s.nu) >= 0.0 ? 1.0 : -1.0;
        lc_rt = std::max({lc_rt, std::abs(flip * back.xi - s.xi), std::abs(flip * back.nu - s.nu),
                          std::abs(flip * back.p_xi - s.p_xi), std::abs(flip * back.p_nu - s.p_nu)});
        const ActionAngle a = action_angle_from_state(s);
        act = std::max({act, std::abs(a.L - L), std::abs(a.G - G)});
        const double l_exp = c.lc_l_angle + omega * taus[i];
        const double h_exp = c.lc_g_angle - L / (2.0 * omega) * taus[i] + 0.5 * sign * l_exp;
        ang = std::max({ang, std::abs(wrap(a.l - l_exp)), std::abs(wrap(a.g + 0.5 * sign * a.l - h_exp))});
    }
    table.add("K_conservation", dk, 1e-11, dk <= 1e-11);
    table.add("G_conservation", dg_action, 1e-11, dg_action <= 1e-11);
    table.add("lc_round_trip", lc_rt, 1e-12, lc_rt <= 1e-12);
    table.add("action_round_trip", act, 1e-10, act <= 1e-10);
    table.add("angle_round_trip", ang, 1e-8, ang <= 1e-8);

    auto frequency_error = [&](AngleFormula formula) {
        double err = 0.0;
        for (std::size_t i = 0; i < traj.size(); i += traj.size() / 5) {
            const auto [dl, dg] = measured_frequencies(traj[i].state, formula, opts);
            err = std::max({err, std::abs(dl - omega), std::abs(dg + L / (2.0 * omega))});
        }
        return err;
    };
    const double freq = frequency_error(AngleFormula::corrected);
    table.add("frequencies", freq, 1e-8, freq <= 1e-8);
    const double cyc = angle_consistency_check(s0).max_error;
    table.add("cycle_consistency", cyc, 1e-9, cyc <= 1e-9);

    // The uncorrected formulas must be rejected by the same checks.
    const double freq_sin = frequency_error(AngleFormula::uncorrected_sin_factor);
    table.add("uncorrected_sin_factor_rejected", freq_sin, 1e-8, freq_sin > 1e-8);
    const double abs_g = std::max(frequency_error(AngleFormula::uncorrected_abs_g),
                                  angle_consistency_check(s0, AngleFormula::uncorrected_abs_g).max_error);
    if (G < 0.0) table.add("uncorrected_abs_g_rejected", abs_g, 1e-8, abs_g > 1e-8);

    if (std::abs(a0.K) <= 1e-12) {
        // K = 0 orbits are H = C orbits in physical time t. Checked over one l-period: the
        // unregularized flow near the large primary is the less accurate side, so it runs
        // two decades tighter.
        IntegratorOptions fine = opts;
        fine.abs_tol *= 1e-2;
        fine.rel_tol *= 1e-2;
        const RtbpState x0 = lc_inverse(s0, 0.0);
        std::vector<double> cycle_taus;
        for (int i = 1; i <= 8; ++i) cycle_taus.push_back(kTwoPi / omega * i / 8.0);
        double corr = 0.0;
        for (const auto& pt : k_flow_samples(s0, 0.0, cycle_taus, opts)) {
            const RtbpState expect = rtbp_flow(x0, 0.0, pt.t, false, fine).state;
            const RtbpState got = lc_inverse(pt.state, 0.0);
            const double scale = std::max(1.0, std::hypot(expect.px, expect.py));
            corr = std::max({corr, std::abs(got.x - expect.x), std::abs(got.y - expect.y),
                             std::abs(got.px - expect.px) / scale, std::abs(got.py - expect.py) / scale});
        }
        table.add("k0_correspondence", corr, 1e-9, corr <= 1e-9);
    }

    rec["outputs"] = json{{"action_angle", json{{"L", a0.L}, {"G", a0.G}, {"l", a0.l}, {"g", a0.g}, {"a", a0.a},
                                                 {"e", a0.e}, {"L_star", a0.L_star}, {"omega", a0.omega}}},
                          {"checks", table.checks}};
    rec["status"] = table.all_pass ? "ok" : "failed";
    rec["timings"] = json{{"wall_seconds", seconds_since(t0)}};
    out.record = rec;
    out.exit_code = table.all_pass ? kExitOk : kExitComputation;
    return out;
}

CommandOutput run_command(const RunConfig& c) {
    validate(c);
    if (c.command == "coeff") return cmd_coeff(c);
    if (c.command == "sweep") return cmd_sweep(c);
    if (c.command == "series") return cmd_series(c);
    if (c.command == "verify") return cmd_verify(c);
    if (c.command == "regularize") return cmd_regularize(c);
    throw DomainError("unknown command '" + c.command + "'");
}

}  // namespace resorb::cli
