#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace labelforge {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (rates out of range, bad radii, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data problems. The CLI maps every DataError to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedGeometry : public DataError {
 public:
  using DataError::DataError;
};

class MissingLabel : public DataError {
 public:
  using DataError::DataError;
};

class InvalidGeometry : public DataError {
 public:
  using DataError::DataError;
};

// A polygon whose slicing lines produce fewer than two chords.
class DegenerateSkeleton : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidWorkerCount : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class WorkerFailure : public Error {
 public:
  WorkerFailure(std::size_t worker, const std::string& what)
      : Error("worker " + std::to_string(worker) + " failed: " + what), worker_(worker) {}

  std::size_t worker() const noexcept { return worker_; }

 private:
  std::size_t worker_;
};

class ExchangeTimeout : public Error {
 public:
  using Error::Error;
};

}  // namespace labelforge
