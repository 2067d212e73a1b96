#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "verimark/simnet.hpp"

namespace verimark {

/// Raised for unreadable, malformed, or unknown-key configuration input
/// (CLI exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses a scenario description (JSON, schema documented in the README).
/// Unknown keys are rejected; every field has a default.
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig scenario_from_json_file(const std::string& path);

/// Canonical JSON dump of a scenario config (defaults included).
std::string scenario_to_json(const ScenarioConfig& config);

}  // namespace verimark
