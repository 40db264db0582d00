#include "resorb_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "resorb/errors.hpp"

namespace resorb::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t used = 0;
        T v{};
        try {
            v = parse(item, &used);
        } catch (const std::exception&) {
            throw DomainError("cannot parse list element '" + item + "'");
        }
        if (used != item.size()) throw DomainError("cannot parse list element '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& s) {
    return parse_list<double>(s, [](const std::string& x, std::size_t* n) { return std::stod(x, n); });
}

std::vector<int> parse_int_list(const std::string& s) {
    return parse_list<int>(s, [](const std::string& x, std::size_t* n) { return std::stoi(x, n); });
}

std::vector<double> sweep_grid(const RunConfig& c) {
    if (c.explicit_grid) return c.e_list;
    std::vector<double> grid;
    if (c.e_step <= 0.0) return grid;
    // Integer stepping avoids accumulated drift in the grid values.
    const long n = static_cast<long>(std::floor((c.e_max - c.e_min) / c.e_step + 1e-9));
    for (long i = 0; i <= n; ++i) grid.push_back(c.e_min + static_cast<double>(i) * c.e_step);
    return grid;
}

void validate(const RunConfig& c) {
    const bool needs_family = c.command == "coeff" || c.command == "sweep" || c.command == "series" || c.command == "verify";
    if (needs_family) {
        if (c.p <= 0 || c.q <= 0) throw DomainError("p and q must be positive integers");
        if (c.p == c.q) throw DomainError("p/q = 1/1 is excluded");
        (void)ResonantFamily::make(c.p, c.q, 0.5, 0, 0, c.direction);  // coprimality
        if (c.families.empty()) throw DomainError("at least one family index is required");
        for (int k : c.families) {
            if (k != 0 && k != 1) throw DomainError("family indices must be 0 or 1");
        }
    }
    if (c.command == "coeff" || c.command == "verify") {
        if (!(c.e > 0.0 && c.e < 1.0)) throw DomainError("eccentricity must lie in (0, 1)");
    }
    if (c.command == "series" && c.order < -1) throw DomainError("order must be nonnegative");
    if (c.command == "sweep") {
        if (!c.explicit_grid && !(c.e_step > 0.0)) throw DomainError("e_step must be positive");
        for (double e : sweep_grid(c)) {
            if (!(e > 0.0 && e < 1.0)) throw DomainError("grid values must lie in (0, 1)");
        }
    }
    if (c.command == "verify") {
        if (c.mu_list.empty()) throw DomainError("mu list must not be empty");
        for (std::size_t i = 0; i < c.mu_list.size(); ++i) {
            if (!(c.mu_list[i] > 0.0 && c.mu_list[i] < 0.5)) throw DomainError("mu values must lie in (0, 0.5)");
            if (i > 0 && !(c.mu_list[i] < c.mu_list[i - 1])) throw DomainError("mu list must be strictly decreasing");
        }
    }
    for (double t : {c.quad_tol, c.integrator_tol, c.corrector_tol}) {
        if (!(t > 0.0)) throw DomainError("tolerances must be positive");
    }
    if (c.command == "regularize" && !(c.cycles > 0.0)) throw DomainError("cycles must be positive");
}

std::vector<std::string> config_file_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DomainError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw DomainError(path + ":" + std::to_string(lineno) + ": empty key");
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

}  // namespace resorb::cli
