#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pricelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (non-finite price, lambda <= 0, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An inflation series ran out of values while a shock was requested.
class SeriesExhausted : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Forced-equilibrium growth factor drifted away from the market price index.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Observation requested before the history buffers are full.
class NotReady : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PoolTooSmall : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MissingArtifact : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  enum class Kind { kIo, kBadMagic, kVersionMismatch, kDimensionMismatch, kTruncated };
  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace pricelab
