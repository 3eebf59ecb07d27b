#pragma once

#include <stdexcept>
#include <string>

namespace polylearn {

// Exit codes used by the CLI so scripted pipelines can branch on failure class.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_starvation = 2,
    exit_thin_body = 3,
    exit_boost_stall = 4,
    exit_acceptance = 5,
};

/// Invalid or unsatisfiable configuration (bad parameter values, unknown
/// config keys, unachievable generator targets, missing overrides).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A rejection-filtered stream exceeded its consecutive-rejection budget.
struct StarvationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sampling body is empty or too thin to work with (no interior point with
/// the requested slack, or repeated degenerate chords).
struct ThinBodyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Boosting could not find any weak hypothesis with sufficient edge.
struct BoostStallError : std::runtime_error {
    int round;
    BoostStallError(const std::string& msg, int round_in)
        : std::runtime_error(msg), round(round_in) {}
};

}  // namespace polylearn
