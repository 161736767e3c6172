#pragma once

#include <stdexcept>
#include <string>

namespace jetsym {

/// Root of every error raised by the library. Callers that only need to
/// distinguish "input problem" from "analysis outcome" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedExpressionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class DegreeError : public Error {
 public:
  using Error::Error;
};

class DegenerateSystemError : public Error {
 public:
  using Error::Error;
};

class UnsupportedBaseError : public Error {
 public:
  using Error::Error;
};

class InvalidSplittingError : public Error {
 public:
  InvalidSplittingError(const std::string& what, std::string residual)
      : Error(what), residual_(std::move(residual)) {}
  const std::string& residual() const { return residual_; }

 private:
  std::string residual_;
};

class NotTangentError : public Error {
 public:
  NotTangentError(const std::string& what, std::string residue)
      : Error(what), residue_(std::move(residue)) {}
  const std::string& residue() const { return residue_; }

 private:
  std::string residue_;
};

/// Unknown command, transform or splitting name, or a bad flag value.
class UsageError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised by the spec parser; carries a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace jetsym
