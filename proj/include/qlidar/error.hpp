#pragma once

#include <stdexcept>
#include <string>

namespace qlidar {

// Base for every error raised by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter, state or grid violates its documented contract.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A formula is singular or a numerical procedure failed its own accuracy gate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlidar
