#pragma once

// JSON config files and the built-in massive-scale scenario generators.

#include <filesystem>
#include <string>

#include "aoisched/core.hpp"

namespace aoi {

/// {"sources": [{"mean_service", "scov", "drop_prob", "weight", "dist"}]}.
/// Missing `scov` defaults from `dist`; missing `dist` defaults to gamma
/// unless scov is 0 (deterministic) or 1 (exponential).
SystemConfig parse_config_json(const std::string& text);
SystemConfig load_config(const std::filesystem::path& path);
std::string dump_config_json(const SystemConfig& config);

/// MS1..MS4 with N sources: s = 1 deterministic, p = 0, w_n proportional
/// to n; MS2 sets p_n = 1/(2n); MS3 sets s_n = (n mod 4) + 1; MS4 makes the
/// services exponential.
SystemConfig scenario_config(int scenario, std::size_t num_sources);

}  // namespace aoi
