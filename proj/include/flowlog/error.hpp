#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowlog {

enum class ErrorKind {
  SyntaxError,
  ArityMismatch,
  UndeclaredRelation,
  UnsafeRule,
  InvalidProgram,
  UnstratifiableProgram,
  SearchSpaceExceeded,
  NotApplicable,
  MonoidMismatch,
  UnsupportedMonoid,
  UnsupportedLift,
  NonTermination,
  MalformedRow,
  IoError,
  NegativeWeight,
  InvalidArgument,
};

std::string_view error_kind_name(ErrorKind kind);

// Process exit code used by the command-line driver for each error kind.
// 0 is success and 1 is reserved for unexpected failures.
int exit_code_for(ErrorKind kind);

struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  Error(ErrorKind kind, const std::string& message, SourceLocation where);

  ErrorKind kind() const noexcept { return kind_; }
  const SourceLocation& where() const noexcept { return where_; }
  bool has_location() const noexcept { return where_.line != 0; }

 private:
  ErrorKind kind_;
  SourceLocation where_;
};

}  // namespace flowlog
