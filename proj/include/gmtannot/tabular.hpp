#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmtannot/layers.hpp"
#include "gmtannot/model.hpp"

namespace gmtannot {

/// One line of a tagger-style tabular file: token, optional lemma and
/// part of speech, and further category=value pairs.
struct TabularRecord {
  std::string token;
  std::string lemma;
  std::string pos;
  std::vector<std::pair<std::string, std::string>> morph;

  bool operator==(const TabularRecord&) const = default;
};

using Sentence = std::vector<TabularRecord>;

/// Tab-separated, 1-4 columns (token, lemma, pos, morph as
/// semicolon-joined key=value pairs); a blank line separates sentences.
/// Throws format-error on malformed lines.
std::vector<Sentence> parse_tabular(std::string_view text);

std::string format_tabular(const std::vector<TabularRecord>& records);
std::string format_tabular(const std::vector<Sentence>& sentences);

struct ImportOptions {
  std::string primary_id = "primary";
  std::string doc_id_prefix = "msa";
  std::string level = "MSAnnot";
  std::string root_type = "MSAnnot";
};

/// Builds a layer set from tagger records: a primary document (the given
/// text, or the tokens joined by single spaces) with marks w1..wN, plus
/// one annotation document per sentence whose word-level nodes carry the
/// record features and point at their marks.
///
/// The importer never tokenizes: tokens are aligned against the text by
/// forward exact matching, skipping only whitespace. Throws
/// alignment-error when a token does not match.
LayerSet import_tabular(const std::vector<Sentence>& sentences,
                        const std::optional<std::string>& text = std::nullopt,
                        const ImportOptions& options = {});

enum class CompoundPolicy { Leaves, Parent };
enum class Disambiguation { None, HighestConfidence };

struct ExportOptions {
  CompoundPolicy compound = CompoundPolicy::Leaves;
  Disambiguation disambiguation = Disambiguation::None;
};

/// Flattens an annotation document back into records, one per surface
/// token in primary order. Fused tokens (one mark, several sub-token
/// nodes) yield one record with "+"-joined fields; compounds follow the
/// compound policy. Alternatives require the highest-confidence policy,
/// otherwise ambiguity-error. Throws unresolved-reference for nodes
/// without a resolvable extent.
std::vector<TabularRecord> export_tabular(const LayerSet& layers,
                                          const std::string& doc_id,
                                          const ExportOptions& options = {});

}  // namespace gmtannot
