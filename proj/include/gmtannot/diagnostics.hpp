#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gmtannot {

enum class Severity { Warning, Error };

/// One finding from parsing or validation. Findings are reported, not
/// thrown; a document may accumulate any number of them.
///
/// Rendered line format: "severity:file:line:col:code:message".
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string file;
  int line = 0;
  int col = 0;
  std::string code;
  std::string message;

  std::string to_string() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);
std::size_t count_errors(const Diagnostics& diags);
std::string render(const Diagnostics& diags);

enum class ErrorCode {
  InvalidArgument,
  DuplicateIdentifier,
  NotFound,
  UnresolvedReference,
  OutOfRange,
  UnknownDocument,
  CyclicAnchor,
  UnitMismatch,
  ParseError,
  UnknownElement,
  ConflictingAnchor,
  SerializationRefused,
  AlignmentError,
  FormatError,
  AmbiguityError,
  IncompatibleLayers,
  NotTextual,
  InvalidCategory,
};

const char* error_code_name(ErrorCode code);

/// Exception type for unrecoverable operation failures. Recoverable
/// findings go through Diagnostic instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  /// The message without the code prefix that what() carries.
  const std::string& message() const { return message_; }

  /// The unresolvable fragment, for UnresolvedReference.
  const std::string& fragment() const { return fragment_; }
  /// Input position, for ParseError.
  int line() const { return line_; }
  int col() const { return col_; }
  /// Failing record, for AlignmentError.
  std::size_t record_index() const { return record_index_; }

  static Error parse(int line, int col, const std::string& message);
  static Error unresolved(const std::string& fragment);
  static Error alignment(std::size_t record_index, const std::string& message);

 private:
  ErrorCode code_;
  std::string message_;
  std::string fragment_;
  int line_ = 0;
  int col_ = 0;
  std::size_t record_index_ = 0;
};

}  // namespace gmtannot
