#pragma once

#include <stdexcept>
#include <string>

namespace sonar3d {

/// Bad parameters or malformed input files. The CLI maps this to its
/// configuration exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Failure while processing data that was well-formed.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sonar3d
