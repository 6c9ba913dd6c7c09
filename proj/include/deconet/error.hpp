#pragma once

#include <stdexcept>
#include <string>

namespace deconet {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or counts that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, truncation, overflow).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter values outside the dimension checks.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A NaN or Inf appeared during a numerical loop.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A forward cache that does not match the arguments given to backward.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration file or override.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem trouble: unwritable path, refusing to overwrite.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace deconet
