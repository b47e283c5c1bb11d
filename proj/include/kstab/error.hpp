#pragma once

#include <stdexcept>
#include <string>

namespace kstab {

/// Base of every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data. `path()` locates the offending field, e.g. "tasks[2].kind".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A geometric precondition failed (class not big, basis mismatch, unbounded polytope, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Raised by Zariski decomposition when the input has no valid decomposition.
class NotPseudoeffective : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A numerical routine ran out of budget before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace kstab
