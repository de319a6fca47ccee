#pragma once

#include <string>
#include <vector>

#include "gmtannot/layers.hpp"
#include "gmtannot/model.hpp"

namespace gmtannot {

enum class MergePolicy { Union, PreferA, AsAlternatives };

/// Combines two parallel annotation layers over the same primary data.
/// Nodes are matched when their primary projections are identical extent
/// sets; matched pairs are unified per policy (union of features, a's
/// value per category, or conflicting feature sets as two alternative
/// groups, a-side first). Unmatched nodes are kept from both inputs in
/// primary order. Throws incompatible-layers when the inputs anchor into
/// different primary documents.
AnnotationDocument merge(const AnnotationDocument& a,
                         const AnnotationDocument& b, const LayerSet& layers,
                         MergePolicy policy);

struct DiffEntry {
  enum class Kind { OnlyInA, OnlyInB, MatchEqual, Conflict };
  Kind kind = Kind::Conflict;
  std::string node_a;
  std::string node_b;
  std::string category;
  std::string value_a;
  std::string value_b;
};

struct DiffReport {
  std::vector<DiffEntry> entries;
  std::size_t only_in_a = 0;
  std::size_t only_in_b = 0;
  std::size_t matched = 0;
  std::size_t matched_equal = 0;
  std::size_t conflicts = 0;
  double agreement = 1.0;  // equal-feature matches / total matches

  /// Header line with the counts, then one tab-separated line per entry:
  /// kind, node-a, node-b, category, value-a, value-b.
  std::string to_string() const;
};

struct DiffOptions {
  /// Compare alternative groups positionally instead of as unordered
  /// sets of feature bundles. Alternative mismatches are reported either
  /// way but never count against the agreement ratio.
  bool positional_alternatives = false;
};

DiffReport diff(const AnnotationDocument& a, const AnnotationDocument& b,
                const LayerSet& layers, const DiffOptions& options = {});

struct CoveredText {
  std::string text;
  bool lemma_fallback = false;  // some part was rendered from its lemma
};

/// Primary text covered by a node: the substrings of its projected
/// extents in document order, single-space joined across gaps. A
/// sub-token node with no extent of its own (a fusion component sharing
/// its parent's span) is rendered through its lemma feature instead, and
/// the fallback is flagged. Throws not-textual over timed media.
CoveredText covered_text(const StructNode& node, const std::string& owner_doc,
                         const LayerSet& layers);

}  // namespace gmtannot
