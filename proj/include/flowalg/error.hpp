#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowalg {

enum class ErrorKind {
  TypeMismatch,
  SyntaxError,
  TypeError,
  ArityError,
  DivisionByZero,
  Overflow,
  InvalidValue,
  EmptyReduce,
  NotEnabled,
  NegativeIterations,
  NonQuiescent,
  InvalidProgram,
  BaselineFailure,
  Io,
};

std::string_view errorKindName(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so that
// callers (the CLI, the mutation runner) can classify it without string
// matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(ErrorKind::SyntaxError,
              std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace flowalg
