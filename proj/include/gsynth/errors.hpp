#pragma once

#include <stdexcept>
#include <string>

namespace gsynth {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. The message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or stream failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A precondition or internal invariant did not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsynth
