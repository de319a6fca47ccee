#pragma once

#include <string>
#include <string_view>

#include "gmtannot/model.hpp"

namespace gmtannot {

/// Surface conventions of a GMT file. Both span-attribute spellings and
/// both pointer spellings are always accepted on input; the dialect
/// governs what the serializer writes and how picky the reader is.
struct GmtDialect {
  enum class SpanAttrs { StartsAtEndsAt, StartEndPosition };
  enum class PointerStyle { HashPrefixed, Bare };

  SpanAttrs span_attrs = SpanAttrs::StartsAtEndsAt;
  PointerStyle pointers = PointerStyle::HashPrefixed;
  bool strict = false;

  static GmtDialect canonical() { return GmtDialect{}; }
  static GmtDialect lenient() { return GmtDialect{}; }
  static GmtDialect strict_mode() {
    GmtDialect d;
    d.strict = true;
    return d;
  }
};

struct ParseResult {
  AnnotationDocument doc;
  Diagnostics diagnostics;
};

/// Reads GMT markup into a document.
///
/// Element mapping: struct -> node, feat -> feature (text content is the
/// value), seg -> anchor, alt -> alternative group (an embedded
/// confidence feature is lifted onto the group), rel -> relation.
/// Document order is preserved throughout.
///
/// In lenient mode structural slips are repaired and reported as
/// warnings: a seg wrapping elements is closed in place and its content
/// re-attached to the enclosing node, stray end tags are dropped, and
/// several top-level structs are wrapped under a synthetic root. In
/// strict mode those are hard parse errors.
///
/// Throws Error(ParseError) with line/column on malformed markup;
/// recoverable findings are reported in ParseResult::diagnostics.
ParseResult parse_gmt(std::string_view text, const GmtDialect& dialect = {},
                      std::string_view source_name = "");

/// Writes UTF-8 GMT markup, 2-space indent per depth. parse(serialize(d))
/// is structurally equal to d. Throws Error(SerializationRefused) when
/// the document violates model invariants.
std::string serialize_gmt(const AnnotationDocument& doc,
                          const GmtDialect& dialect = {});

/// Normal form for comparison and diffing: features sorted by
/// (category, value) within each holder, values whitespace-trimmed.
/// Idempotent. Serialization of the result under the canonical dialect
/// gives the canonical bytes.
AnnotationDocument canonicalize(const AnnotationDocument& doc);

std::string canonical_form(const AnnotationDocument& doc);

/// Content comparison: roots compared after canonicalization (document
/// identity aside).
bool canonically_equal(const AnnotationDocument& a, const AnnotationDocument& b);

}  // namespace gmtannot
