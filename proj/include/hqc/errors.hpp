#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by hbar_div when a term carries no factor of hbar.
class NonQuantizedResidual : public Error {
 public:
  using Error::Error;
};

/// Caller supplied malformed input (bad grammar, bad config, violated precondition).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace hqc
