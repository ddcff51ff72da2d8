#pragma once

// Scenario catalogue, frequency sweeps and result emission.
//
// Every scenario resolves to a LatticeConfig plus run parameters (the
// defaults below), runs, and writes CSV data, JSON result records and
// a manifest.json listing every file with its SHA-256.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fswitch/model.hpp"
#include "fswitch/observables.hpp"

namespace fswitch {

inline constexpr double kDefaultJ0 = 0.1;                  // units of g
inline constexpr double kLabStepPeriods = 5e-3;             // dt = 5e-3 T, T = pi/g
inline constexpr double kPropagatorStepPeriods = 1.25e-5;   // dt = 1.25e-5 T, T = 2 pi / Omega
inline constexpr double kLocalRecordStepLambda = 0.005;     // record every 0.005 / lambda0
inline constexpr double kSweepSpacing = 0.0151;             // units of g

// Names in catalogue order.
std::vector<std::string> scenario_names();

// Parameter defaults of a scenario, keyed by override name.
std::map<std::string, double> scenario_defaults(const std::string& name);

struct ScenarioResult {
    std::string name;
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
    double wall_seconds = 0.0;
};

struct RunnerOptions {
    int workers = 0;  // 0: std::thread::hardware_concurrency()
    bool quiet = true;
};

// Overrides are "key=value" with keys from scenario_defaults(name).
ScenarioResult run_scenario(const std::string& name, const std::vector<std::string>& overrides,
                            const std::filesystem::path& output_dir, const RunnerOptions& options = {});

struct SweepRow {
    double omega = 0.0;
    double max_abs_corr = 0.0;
    SwitchMode mode = SwitchMode::On;
    std::optional<std::string> error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int bond = 0;
    double threshold = kSwitchThreshold;
};

struct SweepOptions {
    double omega_min = 0.0;
    double omega_max = 3.0;
    double d_omega = kSweepSpacing;
    double t_final = 0.0;   // 0: 100 / J0 of the modulated bond
    double dt = 0.0;        // 0: 5e-3 pi / g
    double threshold = kSwitchThreshold;
    int workers = 0;
};

// Uniform grid omega_min + k d_omega <= omega_max (+1e-9 slack).
std::vector<double> sweep_grid(double omega_min, double omega_max, double d_omega);

// For each grid frequency, drive bond L/2 of `base` as J0 cos(omega t) (J0
// taken from the base bond amplitude), evolve, and classify
// max |C_{L/2,L/2+1}| over [0, t_final]. Failed points become error rows.
SweepResult sweep_switch(const LatticeConfig& base, const SweepOptions& options);

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

// Writes manifest.json (scenario, parameters, wall time, tolerances and
// file hashes) into `dir`; returns its path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const std::string& scenario,
                                     const nlohmann::json& config, const nlohmann::json& tolerances,
                                     double wall_seconds, const std::vector<std::filesystem::path>& files);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace fswitch
