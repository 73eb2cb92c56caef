#pragma once

#include <stdexcept>
#include <string>

namespace tmon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad index, schema violation, unmet precondition).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configured size or search cap would be exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace tmon
