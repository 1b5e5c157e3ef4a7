#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isingmkt {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter or input violates a documented precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Matrix or panel dimensions do not agree.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A series has zero variance where a normalized quantity is required.
class DegenerateSeries : public Error {
public:
  DegenerateSeries(std::size_t asset, const std::string& what)
      : Error(what), asset_(asset) {}

  std::size_t asset() const noexcept { return asset_; }

private:
  std::size_t asset_;
};

/// The self-consistent autocorrelation window search found no window.
class WindowSearchFailure : public Error {
public:
  using Error::Error;
};

/// The symmetric eigensolver rejected its input or failed to converge.
class EigenFailure : public Error {
public:
  EigenFailure(long window_end, const std::string& what)
      : Error(what), window_end_(window_end) {}

  long window_end() const noexcept { return window_end_; }

private:
  long window_end_;
};

/// Malformed file content while loading a persisted artifact.
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace isingmkt
