#pragma once

#include <string>

#include "csl/cli/config.hpp"

// Study dispatch: each study renders one table (or report), stamps the
// provenance header and writes the requested artifact formats.

namespace csl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;    // schema or invariant violations
inline constexpr int kExitNumerics = 3;  // regime aborts (truncation, non-finite)
inline constexpr int kExitIo = 4;

struct RunOptions {
    std::string out_override;  // overrides config.output.directory when set
    int threads = 1;
    bool timestamp = false;    // header timestamps are opt-in
};

// --threads wins, then the SIM_THREADS env var, then 1.
int resolve_threads(int cli_threads);

// Runs the configured study and emits artifacts under the output
// directory.  Nonzero exits print a machine-readable error JSON on
// stdout and a plain message on stderr.
int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

// Parse-only check; prints a JSON report of violations and warnings.
int validate_config(const std::string& path);

}  // namespace csl::cli
