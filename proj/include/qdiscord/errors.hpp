#pragma once

#include <stdexcept>
#include <string>

namespace qdiscord {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape, range, normalization).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The coefficients or matrix do not describe a positive semidefinite state.
class InvalidStateError : public Error {
 public:
  InvalidStateError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// The requested system size is outside what an operation supports.
class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

class FileError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdiscord
