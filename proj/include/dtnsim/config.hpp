#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/scenario.hpp"

// Scenario config files are line-oriented `key = value` text. `#` starts a
// comment. Dimensional values carry unit suffixes ("15km", "30min", "2h",
// "20km/h"); ranges are written "lo..hi". Example:
//
//   duration = 48h
//   num_routes = 32
//   bus_velocity = 17.47..21.47km/h
//   pedestrian_to_bus = lognormal(median=32h, sigma=1.2)
//
// The full key list is returned by config_keys().
namespace dtnsim {

std::vector<std::string> config_keys();

/// Applies one setting. Throws ConfigError (naming the key) for unknown keys
/// or unparsable values.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Parses config text on top of `base`. Errors carry the line number.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});

ScenarioConfig load_config_file(const std::filesystem::path& path, ScenarioConfig base = {});

/// Canonical `key = value` rendering in config_keys() order.
std::string serialize_config(const ScenarioConfig& config);

/// 16-hex-digit FNV-1a digest of the canonical config with the seed left out,
/// so runs that differ only by seed share a hash.
std::string config_hash(const ScenarioConfig& config);

}  // namespace dtnsim
