#pragma once

#include <stdexcept>
#include <string>

namespace lenslab {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorCategory : int {
  usage = 1,
  validation = 2,
  constraint = 3,
  accuracy = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Input outside an operation's domain (bad parameter, wrong endpoint, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::validation, "domain error: " + what) {}
};

/// Malformed geometry or data that violates a type invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::validation, "validation error: " + what) {}
};

/// Slope bounds required by an estimate do not hold.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorCategory::validation, "precondition error: " + what) {}
};

/// Area (volume) constraint or admissibility violated.
class ConstraintError : public Error {
 public:
  explicit ConstraintError(const std::string& what)
      : Error(ErrorCategory::constraint, "constraint error: " + what) {}
};

/// Area projection would break g1 >= g2; callers regenerate.
class ProjectionError : public Error {
 public:
  explicit ProjectionError(const std::string& what)
      : Error(ErrorCategory::constraint, "projection error: " + what) {}
};

/// Every ensemble member was excluded.
class EmptyEnsembleError : public Error {
 public:
  explicit EmptyEnsembleError(const std::string& what)
      : Error(ErrorCategory::constraint, "empty ensemble: " + what) {}
};

/// Quadrature did not reach the requested tolerance. Carries the best
/// estimate that was obtained.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best, double error)
      : Error(ErrorCategory::accuracy, "accuracy error: " + what),
        best_(best),
        error_(error) {}

  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double best_;
  double error_;
};

/// Invalid run configuration; names the offending field.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& field, const std::string& what)
      : Error(ErrorCategory::usage, "invalid " + field + ": " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace lenslab
