#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resorb/perturbation.hpp"

namespace resorb::cli {

inline constexpr int kSchemaVersion = 1;

/// Everything a subcommand needs; filled from flags (which override the key=value
/// config file) and validated before dispatch.
struct RunConfig {
    std::string command;

    int p = 1;
    int q = 3;
    double e = 0.3;
    Direction direction = Direction::direct;
    std::vector<int> families{0, 1};  ///< canonical family indices to run

    // sweep grid: explicit list, or [e_min, e_max] with e_step
    std::vector<double> e_list;
    bool explicit_grid = false;  ///< use e_list (possibly empty) instead of the range
    double e_min = 0.05;
    double e_max = 0.6;
    double e_step = 0.05;

    std::vector<double> mu_list{1e-4, 3e-5, 1e-5, 3e-6};
    double quad_tol = 1e-10;
    double integrator_tol = 1e-12;
    double corrector_tol = 1e-10;

    int order = -1;  ///< series truncation; -1 means leading exponent + 2

    // regularize
    double jacobi_c = -1.5;
    double lc_g_action = 0.3;       ///< G
    std::optional<double> lc_l_action;  ///< L; default puts the state on K = 0
    double lc_l_angle = 0.0;
    double lc_g_angle = 0.0;
    double cycles = 10.0;

    std::string output;     ///< file for the record / CSV; stdout when empty
    std::string cache_dir;  ///< verify cache; disabled when empty
    unsigned threads = 0;   ///< 0 = available cores
};

/// Grid of a sweep: e_list when explicit_grid, else e_min, e_min + e_step, ... <= e_max.
std::vector<double> sweep_grid(const RunConfig& c);

/// Throws DomainError on any invalid field for c.command.
void validate(const RunConfig& c);

std::vector<double> parse_double_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

/// Reads key=value lines ('#' comments, blank lines ignored) and returns them as
/// "--key" "value" argument pairs.
std::vector<std::string> config_file_arguments(const std::string& path);

}  // namespace resorb::cli
