#include "gmtannot/diagnostics.hpp"

#include <sstream>

namespace gmtannot {

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  out << (severity == Severity::Error ? "error" : "warning") << ':' << file
      << ':' << line << ':' << col << ':' << code << ':' << message;
  return out.str();
}

bool has_errors(const Diagnostics& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

std::size_t count_errors(const Diagnostics& diags) {
  std::size_t n = 0;
  for (const auto& d : diags)
    if (d.severity == Severity::Error) ++n;
  return n;
}

std::string render(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) {
    out += d.to_string();
    out += '\n';
  }
  return out;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DuplicateIdentifier: return "duplicate-identifier";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::UnresolvedReference: return "unresolved-reference";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::UnknownDocument: return "unknown-document";
    case ErrorCode::CyclicAnchor: return "cyclic-anchor";
    case ErrorCode::UnitMismatch: return "unit-mismatch";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::UnknownElement: return "unknown-element";
    case ErrorCode::ConflictingAnchor: return "conflicting-anchor";
    case ErrorCode::SerializationRefused: return "serialization-refused";
    case ErrorCode::AlignmentError: return "alignment-error";
    case ErrorCode::FormatError: return "format-error";
    case ErrorCode::AmbiguityError: return "ambiguity-error";
    case ErrorCode::IncompatibleLayers: return "incompatible-layers";
    case ErrorCode::NotTextual: return "not-textual";
    case ErrorCode::InvalidCategory: return "invalid-category";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      message_(message) {}

Error Error::parse(int line, int col, const std::string& message) {
  Error e(ErrorCode::ParseError,
          message + " at line " + std::to_string(line) + ", column " +
              std::to_string(col));
  e.line_ = line;
  e.col_ = col;
  return e;
}

Error Error::unresolved(const std::string& fragment) {
  Error e(ErrorCode::UnresolvedReference,
          "no node or mark named \"" + fragment + "\"");
  e.fragment_ = fragment;
  return e;
}

Error Error::alignment(std::size_t record_index, const std::string& message) {
  Error e(ErrorCode::AlignmentError,
          message + " (record " + std::to_string(record_index) + ")");
  e.record_index_ = record_index;
  return e;
}

}  // namespace gmtannot
