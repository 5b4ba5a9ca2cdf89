#pragma once

#include <stdexcept>
#include <string>

namespace mcyc {

/// Root of every library error; the CLI maps these to nonzero exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace mcyc
