#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "itw/scenario.hpp"

namespace itw {

/// Parses a scenario document. Structural problems (malformed JSON, missing
/// or unknown keys, wrong value types) throw ConfigError with the offending
/// key path; semantic problems are left to validate_scenario.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Inverse of parse_scenario; parse(serialize(cfg)) == cfg key-by-key.
nlohmann::json serialize_scenario(const ScenarioConfig& cfg);

/// Stable hash of the canonical serialized config (master seed included).
std::uint64_t scenario_fingerprint(const ScenarioConfig& cfg);
std::string scenario_fingerprint_hex(const ScenarioConfig& cfg);

}  // namespace itw
