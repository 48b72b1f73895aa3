#include "flowlog/error.hpp"

namespace flowlog {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::UndeclaredRelation: return "UndeclaredRelation";
    case ErrorKind::UnsafeRule: return "UnsafeRule";
    case ErrorKind::InvalidProgram: return "InvalidProgram";
    case ErrorKind::UnstratifiableProgram: return "UnstratifiableProgram";
    case ErrorKind::SearchSpaceExceeded: return "SearchSpaceExceeded";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::MonoidMismatch: return "MonoidMismatch";
    case ErrorKind::UnsupportedMonoid: return "UnsupportedMonoid";
    case ErrorKind::UnsupportedLift: return "UnsupportedLift";
    case ErrorKind::NonTermination: return "NonTermination";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return 2;
    case ErrorKind::SyntaxError: return 3;
    case ErrorKind::ArityMismatch: return 4;
    case ErrorKind::UndeclaredRelation: return 5;
    case ErrorKind::UnsafeRule: return 6;
    case ErrorKind::InvalidProgram: return 7;
    case ErrorKind::UnstratifiableProgram: return 8;
    case ErrorKind::SearchSpaceExceeded: return 9;
    case ErrorKind::NotApplicable: return 10;
    case ErrorKind::MonoidMismatch: return 11;
    case ErrorKind::UnsupportedMonoid: return 12;
    case ErrorKind::UnsupportedLift: return 13;
    case ErrorKind::NonTermination: return 14;
    case ErrorKind::MalformedRow: return 15;
    case ErrorKind::IoError: return 16;
    case ErrorKind::NegativeWeight: return 17;
  }
  return 1;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, SourceLocation where)
    : std::runtime_error(std::to_string(where.line) + ":" + std::to_string(where.column) +
                         ": " + message),
      kind_(kind),
      where_(where) {}

}  // namespace flowlog
