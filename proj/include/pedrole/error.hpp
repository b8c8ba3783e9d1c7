#pragma once

#include <stdexcept>
#include <string>

namespace pedrole {

/// Bad or inconsistent input data: unreadable files, unknown ids, malformed records.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration: missing prerequisites, out-of-range parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pedrole
