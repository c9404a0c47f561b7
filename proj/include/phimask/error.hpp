#pragma once

#include <stdexcept>
#include <string>

namespace phimask {

/// Base for every error raised by the library. The CLI maps any of these to a
/// nonzero exit without writing results.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, preset, template, or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Geometry precondition failure (rect outside page, wrong grid, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or parse failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace phimask
