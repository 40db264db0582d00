#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "resorb_cli/config.hpp"

namespace resorb::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitComputation = 2 };

/// A finished subcommand: either a JSON record or CSV text, plus its exit status.
struct CommandOutput {
    nlohmann::json record;  ///< null for sweep
    std::string csv;        ///< sweep only
    int exit_code = kExitOk;
};

/// Fields common to every record: schema_version, tool, tool_version, command.
nlohmann::json record_header(const std::string& command);

/// `%.17g`; always round-trips through strtod.
std::string format_double(double v);

CommandOutput cmd_coeff(const RunConfig& c);
CommandOutput cmd_sweep(const RunConfig& c);
CommandOutput cmd_series(const RunConfig& c);
CommandOutput cmd_verify(const RunConfig& c);
CommandOutput cmd_regularize(const RunConfig& c);

/// Validates c and dispatches on c.command. DomainError propagates (exit 1).
CommandOutput run_command(const RunConfig& c);

/// Canonical cache key text of one verify computation.
std::string verify_cache_key(const ResonantFamily& f, double mu, const RunConfig& c);

/// Header line of the sweep CSV.
inline constexpr const char* kSweepHeader = "e,C_family1,C_family2,min_delta1_1,min_delta1_2,status_1,status_2";

}  // namespace resorb::cli
