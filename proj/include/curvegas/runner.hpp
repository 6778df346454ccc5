#pragma once

#include "curvegas/curve.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace curvegas {

// One experiment = one self-describing config file. The `params` block is
// command-specific and strictly validated: unknown keys are rejected so a
// typo cannot silently fall back to a default.
struct ExperimentConfig {
    std::string command;            // simulate | sample | fekete | capacity |
                                    // rate | hydro | diagnose
    CurveSpec curve;
    nlohmann::json params = nlohmann::json::object();
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;
    std::string format = "csv";     // bulk-series format: csv | json
    int threads = 0;                // 0 = keep runtime default / env setting

    void validate() const;          // throws ConfigError naming the field
};

// Parses the config file (throws ConfigError on unreadable/invalid input).
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

// Curve block of the config: {"kind":"circle","radius":1.0} etc.
CurveSpec parse_curve_spec(const nlohmann::json& j);
nlohmann::json curve_spec_to_json(const CurveSpec& spec);

// threads > 0 pins the worker count; threads == 0 defers to CURVEGAS_THREADS
// when set, otherwise leaves the runtime default.
void apply_thread_setting(int threads);

// Executes the experiment and writes its artifacts under output_dir
// (atomically: temp file + rename). Returns 0; failures are thrown
// (ConfigError for bad inputs, other curvegas errors for numeric failures).
int run(const ExperimentConfig& cfg);

// Full command-line entry: parses flags (--config, --seed, --output,
// --format, --threads), runs, and maps errors to exit codes
// 0 = ok, 2 = config error, 3 = numeric failure.
int main_entry(int argc, const char* const* argv);

} // namespace curvegas
