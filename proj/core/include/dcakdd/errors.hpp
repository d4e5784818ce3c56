#pragma once

#include <stdexcept>
#include <string>

namespace dcakdd {

// Base of every error the library throws. The CLI maps each subclass to its
// own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (wrong field count, non-numeric column, ...).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or configuration files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Arguments outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Unreadable inputs or unwritable outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcakdd
