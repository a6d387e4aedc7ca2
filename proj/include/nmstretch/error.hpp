#pragma once

#include <stdexcept>
#include <string>

namespace nmstretch {

/// Invalid parameters, shapes or framing metadata.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read, decoded or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nmstretch
