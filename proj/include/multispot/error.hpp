#pragma once

#include <stdexcept>
#include <string>

namespace multispot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or precondition was violated (bad count, out-of-range value).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed: the matrix is not Hermitian positive definite.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// Input data is degenerate for the requested statistic (e.g. an all-zero column).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Configuration file or CLI option problem. `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace multispot
