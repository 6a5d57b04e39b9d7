#pragma once

#include <stdexcept>
#include <string>

namespace mpmm {

/// Invalid parameters or a violated precondition. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of budget or stagnated. Exit code 3.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File-system or parse failure on an artifact. Exit code 4.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace detail
}  // namespace mpmm
