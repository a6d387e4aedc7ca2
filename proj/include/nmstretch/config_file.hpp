#pragma once

// Flat key/value configuration files:
//
//   # comment
//   alpha = 4
//   mode = nm
//   stn.stage1.window = 8192
//
// Keys are listed by config_keys(). Unknown keys and malformed values are
// reported as ConfigError with the offending line number.

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "nmstretch/pipeline.hpp"

namespace nmstretch {

/// Applies every assignment in `in` on top of `config`; returns the keys set.
std::vector<std::string> apply_config(std::istream& in, StretchConfig& config, const std::string& source = "<config>");
std::vector<std::string> apply_config_file(const std::filesystem::path& path, StretchConfig& config);

/// Sets one key; throws ConfigError for unknown keys or unparsable values.
void set_config_value(StretchConfig& config, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

}  // namespace nmstretch
