#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <tuple>

#include "gmtannot/model.hpp"

namespace gmtannot {

struct Mark {
  std::int64_t starts_at = 0;
  std::int64_t ends_at = 0;

  bool operator==(const Mark&) const = default;
};

/// A primary data document: a character text or an opaque timed medium,
/// optionally with pre-identified marks (named spans) that annotations
/// point at.
class PrimaryDoc {
 public:
  static PrimaryDoc text(std::string doc_id, std::string content);
  static PrimaryDoc timed(std::string doc_id, std::int64_t length);

  std::string doc_id;
  std::string content;  // empty for timed media
  bool is_timed = false;
  std::int64_t length = 0;
  std::map<std::string, Mark> marks;

  SpanUnit unit() const {
    return is_timed ? SpanUnit::TimeUnit : SpanUnit::CharOffset;
  }

  /// Throws out-of-range when the span exceeds [0, length], and
  /// duplicate-identifier when the mark name is taken.
  void add_mark(const std::string& id, std::int64_t starts_at,
                std::int64_t ends_at);
  const Mark* find_mark(std::string_view id) const;
  void remove_mark(const std::string& id);

  /// Substring covered by [starts_at, ends_at); text documents only.
  std::string slice(std::int64_t starts_at, std::int64_t ends_at) const;
};

/// A resolved location in primary data.
struct Extent {
  std::string doc_id;
  std::int64_t starts_at = 0;
  std::int64_t ends_at = 0;
  SpanUnit unit = SpanUnit::CharOffset;

  bool operator==(const Extent&) const = default;
  friend bool operator<(const Extent& a, const Extent& b) {
    return std::tie(a.doc_id, a.starts_at, a.ends_at) <
           std::tie(b.doc_id, b.starts_at, b.ends_at);
  }
};

/// A primary document plus the annotation documents layered over it (or
/// over each other), addressable by document id. Pointer resolution for a
/// given annotation document searches, in order: the documents named by
/// its primary_refs, then the set-wide default_target, then every
/// document in the set (node ids before marks).
class LayerSet {
 public:
  PrimaryDoc& add_primary(PrimaryDoc doc);
  AnnotationDocument& add_annotation(AnnotationDocument doc);

  const PrimaryDoc* primary(std::string_view id) const;
  PrimaryDoc* primary(std::string_view id);
  const AnnotationDocument* annotation(std::string_view id) const;
  AnnotationDocument* annotation(std::string_view id);
  bool has_doc(std::string_view id) const;

  const std::map<std::string, PrimaryDoc>& primaries() const {
    return primaries_;
  }
  const std::map<std::string, AnnotationDocument>& annotations() const {
    return annotations_;
  }

  /// Annotation document owning the given node, or null.
  const AnnotationDocument* doc_of(const StructNode& node) const;

  std::string default_target;

 private:
  std::map<std::string, PrimaryDoc> primaries_;
  std::map<std::string, AnnotationDocument> annotations_;
};

}  // namespace gmtannot
