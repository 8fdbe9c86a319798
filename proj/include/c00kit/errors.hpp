#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace c00 {

// Error taxonomy, mirrored by the CLI exit codes:
//   0  success
//   1  failed check / internal invariant breach
//   2  malformed input or inconsistent configuration
//   3  a resource cap was exceeded (universe, support, enumeration, iterations)
//   4  rank extrapolation could not certify a pattern
struct ParseError : std::runtime_error {
  std::size_t position;
  explicit ParseError(const std::string& what, std::size_t pos = 0)
      : std::runtime_error(what), position(pos) {}
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndecidedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace c00
