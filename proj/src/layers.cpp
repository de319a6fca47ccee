#include "gmtannot/layers.hpp"

namespace gmtannot {

PrimaryDoc PrimaryDoc::text(std::string doc_id, std::string content) {
  PrimaryDoc doc;
  doc.doc_id = std::move(doc_id);
  doc.length = static_cast<std::int64_t>(content.size());
  doc.content = std::move(content);
  return doc;
}

PrimaryDoc PrimaryDoc::timed(std::string doc_id, std::int64_t length) {
  if (length < 0)
    throw Error(ErrorCode::InvalidArgument, "negative medium length");
  PrimaryDoc doc;
  doc.doc_id = std::move(doc_id);
  doc.is_timed = true;
  doc.length = length;
  return doc;
}

void PrimaryDoc::add_mark(const std::string& id, std::int64_t starts_at,
                          std::int64_t ends_at) {
  if (id.empty())
    throw Error(ErrorCode::InvalidArgument, "mark id must not be empty");
  if (starts_at < 0 || starts_at > ends_at || ends_at > length)
    throw Error(ErrorCode::OutOfRange,
                "mark \"" + id + "\" outside document bounds");
  if (marks.count(id))
    throw Error(ErrorCode::DuplicateIdentifier,
                "mark \"" + id + "\" already defined");
  marks[id] = Mark{starts_at, ends_at};
}

const Mark* PrimaryDoc::find_mark(std::string_view id) const {
  auto it = marks.find(std::string(id));
  return it == marks.end() ? nullptr : &it->second;
}

void PrimaryDoc::remove_mark(const std::string& id) { marks.erase(id); }

std::string PrimaryDoc::slice(std::int64_t starts_at,
                              std::int64_t ends_at) const {
  if (is_timed)
    throw Error(ErrorCode::NotTextual, "document \"" + doc_id +
                                           "\" is a timed medium, not text");
  if (starts_at < 0 || starts_at > ends_at ||
      ends_at > static_cast<std::int64_t>(content.size()))
    throw Error(ErrorCode::OutOfRange, "slice outside document bounds");
  return content.substr(static_cast<std::size_t>(starts_at),
                        static_cast<std::size_t>(ends_at - starts_at));
}

PrimaryDoc& LayerSet::add_primary(PrimaryDoc doc) {
  if (doc.doc_id.empty())
    throw Error(ErrorCode::InvalidArgument, "document id must not be empty");
  if (has_doc(doc.doc_id))
    throw Error(ErrorCode::DuplicateIdentifier,
                "document id \"" + doc.doc_id + "\" already used");
  auto [it, ok] = primaries_.emplace(doc.doc_id, std::move(doc));
  (void)ok;
  return it->second;
}

AnnotationDocument& LayerSet::add_annotation(AnnotationDocument doc) {
  if (doc.doc_id.empty())
    throw Error(ErrorCode::InvalidArgument, "document id must not be empty");
  if (has_doc(doc.doc_id))
    throw Error(ErrorCode::DuplicateIdentifier,
                "document id \"" + doc.doc_id + "\" already used");
  auto [it, ok] = annotations_.emplace(doc.doc_id, std::move(doc));
  (void)ok;
  return it->second;
}

const PrimaryDoc* LayerSet::primary(std::string_view id) const {
  auto it = primaries_.find(std::string(id));
  return it == primaries_.end() ? nullptr : &it->second;
}

PrimaryDoc* LayerSet::primary(std::string_view id) {
  auto it = primaries_.find(std::string(id));
  return it == primaries_.end() ? nullptr : &it->second;
}

const AnnotationDocument* LayerSet::annotation(std::string_view id) const {
  auto it = annotations_.find(std::string(id));
  return it == annotations_.end() ? nullptr : &it->second;
}

AnnotationDocument* LayerSet::annotation(std::string_view id) {
  auto it = annotations_.find(std::string(id));
  return it == annotations_.end() ? nullptr : &it->second;
}

bool LayerSet::has_doc(std::string_view id) const {
  return primaries_.count(std::string(id)) ||
         annotations_.count(std::string(id));
}

const AnnotationDocument* LayerSet::doc_of(const StructNode& node) const {
  for (const auto& [id, doc] : annotations_) {
    bool found = false;
    doc.visit_all([&](const StructNode& n) {
      if (&n == &node) found = true;
    });
    if (found) return &doc;
  }
  return nullptr;
}

}  // namespace gmtannot
