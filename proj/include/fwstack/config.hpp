#pragma once

#include <string>

#include "fwstack/pipeline.hpp"

namespace fwstack {

/// Flat key = value config file ('#' comments, blank lines ignored).
/// Unknown keys raise ConfigError. Keys mirror the RunConfig fields; the
/// documented schema lives in the README.
RunConfig parse_config_file(const std::string& path);

/// Apply one key=value pair (used by both the file parser and CLI overrides).
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

} // namespace fwstack
