#pragma once

#include <stdexcept>
#include <string>

namespace vbscan {

enum class ErrorCode {
  Syntax,
  Range,
  NoSuchVb,
  OutOfRange,
  AccessDenied,
  SnapshotMismatch,
  DuplicateVb,
  Schema,
  UnresolvedAddress,
  Mode,
  MalformedFrame,
  Protocol,
  ConnectionFailed,
  Timeout,
  SafeState,
  Config,
  Integrity,
  ShapeMismatch,
  UnknownScenario,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "syntax error";
    case ErrorCode::Range: return "range error";
    case ErrorCode::NoSuchVb: return "no such VB";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::AccessDenied: return "access denied";
    case ErrorCode::SnapshotMismatch: return "snapshot mismatch";
    case ErrorCode::DuplicateVb: return "duplicate VB";
    case ErrorCode::Schema: return "schema error";
    case ErrorCode::UnresolvedAddress: return "unresolvable address";
    case ErrorCode::Mode: return "mode error";
    case ErrorCode::MalformedFrame: return "malformed frame";
    case ErrorCode::Protocol: return "protocol error";
    case ErrorCode::ConnectionFailed: return "connection failed";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::SafeState: return "safe state not confirmed";
    case ErrorCode::Config: return "invalid configuration";
    case ErrorCode::Integrity: return "integrity error";
    case ErrorCode::ShapeMismatch: return "shape mismatch";
    case ErrorCode::UnknownScenario: return "unknown scenario";
  }
  return "error";
}

// Every failure raised by the library carries a code so callers (the wire
// server, the CLI) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t column, const std::string& what)
      : Error(ErrorCode::Syntax, "column " + std::to_string(column) + ": " + what), column_(column) {}

  /// 1-based column of the offending character.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace vbscan
