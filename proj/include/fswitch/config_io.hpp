#pragma once

// JSON configuration files.
//
//   {
//     "L": 6,
//     "g": 1.0,
//     "model": "bond_driven",            // or "local_driven"
//     "bonds": [                          // bond_driven: exactly L-1 entries
//       {"kind": "constant", "amplitude": 0.1},
//       {"kind": "cosine", "amplitude": 0.1, "frequency": 2.0, "phase": 0.0},
//       {"kind": "bessel", "amplitude": 0.1, "frequency": 2.0, "x1": 2.0, "x2": 2.84787695}
//     ],
//     "lambda0": 0.01,                    // local_driven only
//     "local_drives": [{"site": 5, "epsilon": 3.6072, "nu": 3.0}],
//     "initial": "uuuuud",                // site 1 first; u = up, d = down
//     "dt": 0.0157, "t_final": 1000.0, "record_stride": 1
//   }
//
// Unknown keys are rejected at every level.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fswitch/model.hpp"

namespace fswitch {

struct RunConfig {
    LatticeConfig lattice;
    std::optional<double> dt;
    std::optional<double> t_final;
    std::optional<int> record_stride;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const LatticeConfig& config);

RunConfig load_run_config(const std::filesystem::path& path);

// Applies a "key=value" override (same keys as the file; "bonds.N.field" and
// "local_drives.N.field" address list entries, N 0-based).
void apply_override(RunConfig& config, const std::string& assignment);

}  // namespace fswitch
