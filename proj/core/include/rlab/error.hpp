#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input supplied by a caller (unknown names, bad parameters,
/// violated preconditions that the caller controls).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Syntax error in an expression string, positioned at a byte offset.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// An identifier that is neither a coordinate, a constant nor a function.
class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(std::size_t offset, std::string identifier);

  const std::string& identifier() const noexcept { return identifier_; }

 private:
  std::string identifier_;
};

/// Evaluation left the domain of an elementary function (log of a
/// nonpositive number, division by zero, non-finite result, ...).
class DomainError : public Error {
 public:
  DomainError(std::string subexpression, const std::string& reason);

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// The metric is not positive definite where it was evaluated.
class MetricError : public Error {
 public:
  MetricError(const std::string& message, std::vector<double> eigenvalues);

  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<double> eigenvalues_;
};

/// A pointwise numerical precondition fails (degenerate or ambiguous Ricci
/// spectrum, sign flip on a stencil, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical procedure failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual);

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace rlab
