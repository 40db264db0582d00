#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resorb/errors.hpp"
#include "resorb_cli/commands.hpp"

namespace {

using resorb::cli::RunConfig;

// Splices the key=value pairs of every `--config FILE` in front of the remaining flags
// of the subcommand, so explicit flags (parsed later, last one wins) override them.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> head{argv[0]};
    std::vector<std::string> from_file;
    std::vector<std::string> rest;
    bool seen_command = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) {
            const auto extra = resorb::cli::config_file_arguments(argv[++i]);
            from_file.insert(from_file.end(), extra.begin(), extra.end());
        } else if (a.rfind("--config=", 0) == 0) {
            const auto extra = resorb::cli::config_file_arguments(a.substr(9));
            from_file.insert(from_file.end(), extra.begin(), extra.end());
        } else if (!seen_command && !a.empty() && a[0] != '-') {
            head.push_back(a);
            seen_command = true;
        } else if (!seen_command) {
            head.push_back(a);
        } else {
            rest.push_back(a);
        }
    }
    head.insert(head.end(), from_file.begin(), from_file.end());
    head.insert(head.end(), rest.begin(), rest.end());
    return head;
}

void add_family_options(CLI::App* sub, RunConfig& c, std::string& direction, std::string& families) {
    sub->add_option("--p", c.p, "resonance numerator p")->capture_default_str();
    sub->add_option("--q", c.q, "resonance denominator q")->capture_default_str();
    sub->add_option("--direction", direction, "direct or retrograde")->capture_default_str();
    sub->add_option("--families", families, "canonical family indices, e.g. 0,1")->capture_default_str();
}

void add_common_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--output,-o", c.output, "write the record/CSV to this file instead of stdout");
    sub->add_option("--threads", c.threads, "worker threads (0 = available cores)")->capture_default_str();
    sub->add_option("--config", "key=value file; explicit flags override it");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    std::string direction = "direct";
    std::string families = "0,1";
    std::string e_list;
    std::string mu_list = "1e-4,3e-5,1e-5,3e-6";

    CLI::App app{"Resonance stability coefficients of restricted three-body periodic orbits"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", std::string(RESORB_VERSION));

    auto* coeff = app.add_subcommand("coeff", "C(e,p,q) by quadrature plus the leading series coefficient");
    add_family_options(coeff, c, direction, families);
    coeff->add_option("--e", c.e, "eccentricity")->capture_default_str();
    coeff->add_option("--quad-tol", c.quad_tol, "relative quadrature tolerance")->capture_default_str();
    add_common_options(coeff, c);

    auto* sweep = app.add_subcommand("sweep", "C for both families over an eccentricity grid (CSV)");
    add_family_options(sweep, c, direction, families);
    sweep->add_option("--e-min", c.e_min, "first grid value")->capture_default_str();
    sweep->add_option("--e-max", c.e_max, "last grid value (inclusive)")->capture_default_str();
    sweep->add_option("--e-step", c.e_step, "grid spacing")->capture_default_str();
    sweep->add_option("--e-list", e_list, "explicit comma-separated grid (overrides min/max/step; 'none' = empty)");
    sweep->add_option("--quad-tol", c.quad_tol, "relative quadrature tolerance")->capture_default_str();
    add_common_options(sweep, c);

    auto* series = app.add_subcommand("series", "e-series of C from the Laplace/Bessel expansion");
    add_family_options(series, c, direction, families);
    series->add_option("--e", c.e, "eccentricity for the finite-e C2 sum (q = 1)")->capture_default_str();
    series->add_option("--order", c.order, "highest power of e (default: leading exponent + 2)");
    add_common_options(series, c);

    auto* verify = app.add_subcommand("verify", "multiplier law from full-problem periodic orbits");
    add_family_options(verify, c, direction, families);
    verify->add_option("--e", c.e, "eccentricity")->capture_default_str();
    verify->add_option("--mu-list", mu_list, "strictly decreasing mass ratios")->capture_default_str();
    verify->add_option("--quad-tol", c.quad_tol, "relative quadrature tolerance")->capture_default_str();
    verify->add_option("--integrator-tol", c.integrator_tol, "integrator abs/rel tolerance")->capture_default_str();
    verify->add_option("--corrector-tol", c.corrector_tol, "shooting residual tolerance")->capture_default_str();
    verify->add_option("--cache-dir", c.cache_dir, "directory for cached per-mu results");
    add_common_options(verify, c);

    auto* regularize = app.add_subcommand("regularize", "Levi-Civita action-angle checks at mu = 0");
    regularize->add_option("--C", c.jacobi_c, "Jacobi constant")->capture_default_str();
    regularize->add_option("--G", c.lc_g_action, "action G (twice the angular momentum)")->capture_default_str();
    regularize->add_option("--L", c.lc_l_action, "action L (default: the value giving K = 0)");
    regularize->add_option("--l", c.lc_l_angle, "initial angle l")->capture_default_str();
    regularize->add_option("--g", c.lc_g_angle, "initial angle g")->capture_default_str();
    regularize->add_option("--cycles", c.cycles, "flow length in periods of l")->capture_default_str();
    regularize->add_option("--integrator-tol", c.integrator_tol, "integrator abs/rel tolerance")->capture_default_str();
    add_common_options(regularize, c);

    try {
        const auto args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? resorb::cli::kExitOk : resorb::cli::kExitValidation;
    } catch (const resorb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return resorb::cli::kExitValidation;
    }

    resorb::cli::CommandOutput out;
    try {
        c.command = app.get_subcommands().front()->get_name();
        c.direction = resorb::direction_from_string(direction);
        c.families = resorb::cli::parse_int_list(families);
        if (!e_list.empty()) {
            c.explicit_grid = true;
            if (e_list != "none") c.e_list = resorb::cli::parse_double_list(e_list);
        }
        c.mu_list = resorb::cli::parse_double_list(mu_list);
        out = resorb::cli::run_command(c);
    } catch (const resorb::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return resorb::cli::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "computation failed: " << e.what() << '\n';
        return resorb::cli::kExitComputation;
    }

    const std::string text = out.record.is_null() ? out.csv : out.record.dump(2) + "\n";
    if (c.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.output);
        f << text;
        if (!f) {
            std::cerr << "error: cannot write " << c.output << '\n';
            return resorb::cli::kExitComputation;
        }
    }
    return out.exit_code;
}
