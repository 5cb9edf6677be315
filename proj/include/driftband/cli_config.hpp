#pragma once

#include <string>
#include <vector>

#include "driftband/harness.hpp"

namespace driftband {

inline constexpr const char* kArtifactVersion = "driftband 0.1.0";

// Line-based `key = value` config text: '#' starts a comment, blank lines
// are ignored, unknown keys are errors. Keys mirror the ExperimentConfig
// fields in snake_case.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Applies one key/value pair; shared between the file parser and the CLI
// flag layer so flags override file values with identical validation.
void apply_config_key(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

// Canonical normalized form: every key, fixed order, normalized values.
// parse(serialize(c)) == c for any valid config.
std::string serialize_config(const ExperimentConfig& config);

// '# key = value' comment lines for output-file headers: artifact version,
// master seed, then the canonical config echo.
std::vector<std::string> config_preamble(const ExperimentConfig& config);

} // namespace driftband
