#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gmtannot/layers.hpp"
#include "gmtannot/model.hpp"

namespace gmtannot {

/// Result of resolving one pointer or span: either a structural node in
/// some annotation document (object-based and event-based anchoring) or
/// an extent of primary data (temporal/offset anchoring and marks).
struct ResolvedAnchor {
  const StructNode* node = nullptr;
  std::string node_doc;  // owning document of node
  std::optional<Extent> extent;

  bool is_node() const { return node != nullptr; }
};

/// Resolves a seg owned by document owner_doc. A span form yields a
/// single extent; a target list yields one anchor per pointer, in pointer
/// order. Throws unresolved-reference, unknown-document, out-of-range or
/// unit-mismatch.
std::vector<ResolvedAnchor> resolve(const Seg& seg, const std::string& owner_doc,
                                    const LayerSet& layers);

/// Follows anchor chains (node -> nodes -> ... -> marks/spans) down to
/// primary data and returns the covered extents in document order with
/// duplicates removed. A node without a seg projects through its
/// children. Throws cyclic-anchor on circular chains.
std::vector<Extent> project_to_primary(const StructNode& node,
                                       const std::string& owner_doc,
                                       const LayerSet& layers);

/// A span-anchored node of type "landmark" that other annotations can
/// reference, for annotating read-only or milestone-marked data.
std::unique_ptr<StructNode> make_landmark(std::int64_t starts_at,
                                          std::int64_t ends_at, SpanUnit unit,
                                          std::string id);

/// Corpus-wide anchor audit: dangling pointers, unknown documents,
/// out-of-range spans, unit mismatches, ambiguous fragments, cyclic
/// chains and landmark misuse. An empty report means the lattice is fully
/// resolvable.
Diagnostics validate_anchors(const LayerSet& layers);

}  // namespace gmtannot
