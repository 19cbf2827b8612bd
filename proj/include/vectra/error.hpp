#pragma once

#include <stdexcept>
#include <string>

namespace vectra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed documents, contract violations.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Zero-size inputs where data is required.
class EmptyInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// File or codec failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vectra
