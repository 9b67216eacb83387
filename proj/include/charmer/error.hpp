#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace charmer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sentence violates its invariants (contains the reserved character or
/// exceeds the maximum length), or input text is not valid UTF-8.
class InvalidSentence : public Error {
 public:
  using Error::Error;
};

/// Edit-ball enumeration would exceed the configured candidate budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t budget, const std::string& what)
      : Error(what), budget_(budget) {}
  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t budget_;
};

/// An integer result does not fit the 64-bit range.
class Overflow : public Error {
 public:
  using Error::Error;
};

/// Shapes of vectors/matrices disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The selected attack needs gradients the oracle cannot provide.
class GradientUnavailable : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (dataset rows, model files).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  /// 1-based line number, 0 when not applicable.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Failure talking to a remote scoring server. The raw payload (response
/// body or transport message) is kept for diagnostics.
class RemoteError : public Error {
 public:
  enum class Kind { Transport, HttpStatus, Schema };

  RemoteError(Kind kind, const std::string& what, std::string payload,
              int status = 0)
      : Error(what), kind_(kind), payload_(std::move(payload)), status_(status) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& payload() const noexcept { return payload_; }
  int status() const noexcept { return status_; }

 private:
  Kind kind_;
  std::string payload_;
  int status_;
};

}  // namespace charmer
