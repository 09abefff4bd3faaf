#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csl/clump_states.hpp"
#include "csl/units_modes.hpp"

// Scenario configs: one strict JSON document drives every study.
// Unknown keys are rejected and all module invariants are re-checked at
// load time, so an accepted config reproduces the same run anywhere.

namespace csl::cli {

enum class Study { decoherence, production, kernel, field_exponent, oracle_check };

const char* study_name(Study s);
std::optional<Study> study_from_name(const std::string& name);

struct TimesSpec {
    double t_final = 0.0;
    int samples = 0;
    bool stroboscopic = false;  // sample at multiples of 2 pi / m
};

struct Tolerances {
    double element = 1e-5;   // kernel lattice agreement
    double moment = 1e-6;    // integrator vs closed-form moments
    double residual = 1e-3;  // eigenstate residual at n_max = 40
    double trace = 1e-9;     // trace drift per unit time
};

struct NumericsSpec {
    int n_max = 0;    // 0: occupancy heuristic picks the truncation
    double dt = 0.0;  // 0: stability rule picks the step
    Tolerances tolerances;
};

struct OutputSpec {
    std::string directory = "out";
    std::vector<std::string> formats{"csv"};  // subset of {csv, json}
};

struct ScenarioConfig {
    ModelParams model;
    ClumpPair clumps;
    TimesSpec times;
    Study study = Study::decoherence;
    NumericsSpec numerics;
    OutputSpec output;
};

struct ConfigReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

struct ConfigError : std::runtime_error {
    ConfigReport report;
    explicit ConfigError(const ConfigReport& rep);
};

// Parse-only mode: every violation is collected, nothing runs.  *out is
// filled only when the report carries no errors.
ConfigReport check_config(const std::string& path, ScenarioConfig* out = nullptr);

// Strict load; throws ConfigError carrying the full report.
ScenarioConfig load_config(const std::string& path);

// Flattened dotted-key echo in a fixed order, numbers at full round-trip
// precision; used verbatim in artifact headers.
std::vector<std::pair<std::string, std::string>> config_echo_flat(const ScenarioConfig& cfg);

}  // namespace csl::cli
