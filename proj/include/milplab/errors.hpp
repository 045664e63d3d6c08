#pragma once

#include <stdexcept>
#include <string>

namespace milplab {

// Exit-code taxonomy used by the CLI: 0 success, 1 invariant violation,
// 2 I/O, 3 limits.
struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct LimitError : std::runtime_error {
  explicit LimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace milplab
