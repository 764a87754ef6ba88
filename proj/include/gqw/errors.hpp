#pragma once

#include <cstddef>
#include <utility>
#include <stdexcept>
#include <string>

namespace gqw {

/// Base class of every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(std::string symbol)
      : Error("unknown symbol '" + symbol + "'"), symbol_(std::move(symbol)) {}
  [[nodiscard]] const std::string& symbol() const noexcept { return symbol_; }

 private:
  std::string symbol_;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Raised when an expression cannot be evaluated at a point (pole, branch cut).
class EvalError : public Error {
 public:
  using Error::Error;
};

class ChartMismatchError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegreeError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotAQuantomorphismError : public Error {
 public:
  NotAQuantomorphismError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConventionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateParameterError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFieldError : public Error {
 public:
  using Error::Error;
};

}  // namespace gqw
