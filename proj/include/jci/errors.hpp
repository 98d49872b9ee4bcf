#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jci {

// Every library failure derives from Error. The category drives the CLI's
// exit code: data errors exit 2, numerical failures exit 3.
enum class ErrorCategory { data, numerical };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

// Malformed input text (wrong column count, non-numeric field, bad header).
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCategory::data,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Well-formed input that violates a field invariant (negative count, year
// outside [1800, 2200], ...).
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorCategory::data, message), line_(0) {}
  ValidationError(std::size_t line, const std::string& message)
      : Error(ErrorCategory::data,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  // 0 when the error did not originate from a text source.
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class DuplicateKeyError : public Error {
public:
  explicit DuplicateKeyError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

class NotFoundError : public Error {
public:
  explicit NotFoundError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

// Sequence lengths do not match.
class ShapeError : public Error {
public:
  explicit ShapeError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

// Too few or constant observations; a correlation is undefined.
class DegenerateSampleError : public Error {
public:
  explicit DegenerateSampleError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

// An index whose defining ratio has a zero denominator.
class UndefinedIndexError : public Error {
public:
  explicit UndefinedIndexError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

class EmptyDataError : public Error {
public:
  explicit EmptyDataError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

class InsufficientDataError : public Error {
public:
  explicit InsufficientDataError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

// Input outside the mathematical domain of an operation (log of a
// non-positive value, exponent at or below 1, ...).
class DomainError : public Error {
public:
  explicit DomainError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

class DisjointSupportError : public Error {
public:
  explicit DisjointSupportError(const std::string& message)
      : Error(ErrorCategory::data, message) {}
};

// Iterative fit ran out of budget. Carries the best parameters seen so the
// caller can inspect how far the search got.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& message, std::vector<double> best_params,
                   double best_objective)
      : Error(ErrorCategory::numerical, message),
        best_params_(std::move(best_params)),
        best_objective_(best_objective) {}

  const std::vector<double>& best_params() const noexcept {
    return best_params_;
  }
  double best_objective() const noexcept { return best_objective_; }

private:
  std::vector<double> best_params_;
  double best_objective_;
};

}  // namespace jci
