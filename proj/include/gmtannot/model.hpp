#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gmtannot/diagnostics.hpp"

namespace gmtannot {

/// Reference to a node or marked span, optionally qualified with the
/// identifier of the document that defines it. An empty doc_ref means the
/// pointer resolves against the owning document's declared target
/// documents (see anchoring.hpp).
struct Pointer {
  std::string doc_ref;
  std::string fragment;

  bool operator==(const Pointer&) const = default;
};

/// Parses "doc#frag", "#frag" or a bare "frag".
Pointer parse_pointer(std::string_view text);

enum class SpanUnit { CharOffset, TimeUnit };

struct Span {
  std::int64_t starts_at = 0;
  std::int64_t ends_at = 0;
  SpanUnit unit = SpanUnit::CharOffset;

  bool operator==(const Span&) const = default;
};

/// Anchor of a structural node into primary data or into another layer.
/// Exactly one of the two forms is populated: a non-empty target list, or
/// an explicit span.
struct Seg {
  std::vector<Pointer> targets;
  std::optional<Span> span;

  bool is_span() const { return span.has_value(); }

  /// Target-list form; throws invalid-argument when pointers is empty.
  static Seg at(std::vector<Pointer> pointers);
  /// Span form; throws invalid-argument when starts_at > ends_at.
  static Seg over(std::int64_t starts_at, std::int64_t ends_at,
                  SpanUnit unit = SpanUnit::CharOffset);

  bool operator==(const Seg&) const = default;
};

/// One information unit: a data-category name with a string value and/or
/// nested sub-features. A feature with neither a value nor children is
/// ill-formed (reported by check_document, not prevented here).
struct Feature {
  std::string category;
  std::string value;
  std::vector<Feature> children;

  bool operator==(const Feature&) const = default;
};

struct StructNode;

/// One mutually exclusive reading of a node: a bundle of features and/or
/// an alternative substructure, optionally weighted with a confidence.
struct AltGroup {
  std::vector<Feature> features;
  std::vector<std::unique_ptr<StructNode>> children;
  std::optional<double> confidence;

  AltGroup() = default;
  explicit AltGroup(std::vector<Feature> feats,
                    std::optional<double> conf = std::nullopt);

  bool empty() const { return features.empty() && children.empty(); }
};

/// Typed relation between nodes, explicit counterpart to the implicit
/// containment hierarchy. source defaults to the owning node when absent.
struct Relation {
  std::string rel_type;
  std::optional<Pointer> source;
  std::vector<Pointer> targets;
  bool directed = true;

  bool operator==(const Relation&) const = default;
};

/// Elementary structural node of an annotation: a typed tree node
/// carrying features, alternative readings, relations and an anchor.
struct StructNode {
  std::string id;  // empty when anonymous
  std::string node_type;
  std::vector<Feature> features;
  std::vector<AltGroup> alternatives;
  std::vector<Relation> relations;
  std::optional<Seg> seg;
  std::vector<std::unique_ptr<StructNode>> children;
  StructNode* parent = nullptr;  // maintained by AnnotationDocument

  const Feature* find_feature(std::string_view category) const;
  /// Value of the first feature with the given category, or "".
  std::string feature_value(std::string_view category) const;
  bool is_landmark() const { return node_type == "landmark"; }
};

/// Deep copy; the copy's root has a null parent.
std::unique_ptr<StructNode> clone_node(const StructNode& node);

bool equal(const StructNode& a, const StructNode& b);
bool equal(const AltGroup& a, const AltGroup& b);

enum class TraversalOrder { Pre, Post };

/// One annotation layer: a tree of structural nodes plus the identity of
/// the layer and of the documents it anchors into. Node identifiers are
/// unique within the document; use the member functions (not direct field
/// edits) for anything touching ids or tree shape so the index stays
/// consistent.
///
/// Thread safety: freely shareable for concurrent reads once built;
/// callers serialize mutation.
class AnnotationDocument {
 public:
  AnnotationDocument(std::string doc_id, std::string level,
                     std::string root_type);

  AnnotationDocument(AnnotationDocument&&) noexcept = default;
  AnnotationDocument& operator=(AnnotationDocument&&) noexcept = default;
  AnnotationDocument(const AnnotationDocument&) = delete;
  AnnotationDocument& operator=(const AnnotationDocument&) = delete;

  std::string doc_id;
  std::string level;
  std::vector<std::string> primary_refs;

  StructNode& root() { return *root_; }
  const StructNode& root() const { return *root_; }

  /// Appends a new leaf under parent. Throws duplicate-identifier when id
  /// is taken, not-found when parent is not part of this document.
  StructNode& add_child(StructNode& parent, std::string node_type,
                        std::string id = "");
  /// Adopts an externally built subtree (e.g. a landmark). All ids in the
  /// subtree must be unused.
  StructNode& adopt_child(StructNode& parent, std::unique_ptr<StructNode> node);

  /// Appends a feature; repeated categories are allowed here (the
  /// registry decides legality). Throws invalid-argument on empty category.
  void set_feature(StructNode& node, std::string category, std::string value);
  void add_feature(StructNode& node, Feature feature);

  /// Appends alternative groups. Throws invalid-argument when groups is
  /// empty, a group is empty, or a confidence lies outside [0,1].
  void add_alternatives(StructNode& node, std::vector<AltGroup> groups);

  void add_relation(StructNode& node, Relation relation);
  void set_seg(StructNode& node, Seg seg);
  void set_id(StructNode& node, std::string id);

  StructNode* find(std::string_view id);
  const StructNode* find(std::string_view id) const;

  /// Nodes of the main tree in pre- or post-order (root included).
  std::vector<const StructNode*> nodes(
      TraversalOrder order = TraversalOrder::Pre) const;
  std::vector<StructNode*> nodes(TraversalOrder order = TraversalOrder::Pre);

  /// Visits the main tree plus every node nested inside alternative
  /// groups, pre-order.
  void visit_all(const std::function<void(const StructNode&)>& fn) const;

  /// Assigns fresh ids ("n1", "n2", ... in pre-order, skipping taken
  /// names) to anonymous nodes of the main tree.
  void assign_ids();

  bool owns(const StructNode& node) const;
  AnnotationDocument clone() const;

 private:
  std::unique_ptr<StructNode> root_;
  std::unordered_map<std::string, StructNode*> by_id_;

  void index_subtree(StructNode& node, StructNode* parent);
  void check_subtree_ids(const StructNode& node) const;
};

/// Checked constructor mirroring the library surface: all three arguments
/// must be non-empty.
AnnotationDocument new_document(const std::string& doc_id,
                                const std::string& level,
                                const std::string& root_type);

bool equal(const AnnotationDocument& a, const AnnotationDocument& b);

/// Structural well-formedness report: ill-formed features, confidence
/// range violations, and alternative-confidence sums above 1 (warning,
/// tolerance 1e-9).
Diagnostics check_document(const AnnotationDocument& doc,
                           const std::string& source_name = "");

}  // namespace gmtannot
