#pragma once

#include <stdexcept>
#include <string>

namespace mh {

// Base class for every failure this library raises on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user-supplied configuration: bad CLI arguments, malformed config
// files, rejected method combinations. The CLI maps this to exit code 1,
// everything else to 2.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace mh
