#pragma once

#include <stdexcept>
#include <string>

namespace texfuse {

// Validated-input problems: bad files, bad parameters, degenerate data.
// The CLI maps these to exit code 1.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Internal numerical failures: factorization breakdown, solver
// non-convergence, diverging training loss. CLI exit code 2.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace texfuse
