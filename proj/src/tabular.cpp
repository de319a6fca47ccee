#include "gmtannot/tabular.hpp"

#include <algorithm>

#include "gmtannot/anchoring.hpp"

namespace gmtannot {

namespace {

bool is_blank(std::string_view line) {
  for (char c : line)
    if (c != ' ' && c != '\t' && c != '\r') return false;
  return true;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(std::string(line));
      start = i + 1;
    }
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      out.push_back(std::string(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<Sentence> parse_tabular(std::string_view text) {
  std::vector<Sentence> sentences;
  Sentence current;
  int line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) {
      if (!current.empty()) sentences.push_back(std::move(current));
      current.clear();
      continue;
    }
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() > 4)
      throw Error(ErrorCode::FormatError,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields (at most 4)");
    TabularRecord rec;
    rec.token = fields[0];
    if (rec.token.empty())
      throw Error(ErrorCode::FormatError,
                  "line " + std::to_string(line_no) + " has an empty token");
    if (fields.size() > 1) rec.lemma = fields[1];
    if (fields.size() > 2) rec.pos = fields[2];
    if (fields.size() > 3 && !fields[3].empty()) {
      std::size_t start = 0;
      const std::string& morph = fields[3];
      for (std::size_t i = 0; i <= morph.size(); ++i) {
        if (i != morph.size() && morph[i] != ';') continue;
        std::string_view pair(morph.data() + start, i - start);
        start = i + 1;
        if (pair.empty()) continue;
        auto eq = pair.find('=');
        if (eq == std::string_view::npos || eq == 0)
          throw Error(ErrorCode::FormatError,
                      "line " + std::to_string(line_no) +
                          ": morph field is not key=value");
        rec.morph.emplace_back(std::string(pair.substr(0, eq)),
                               std::string(pair.substr(eq + 1)));
      }
    }
    current.push_back(std::move(rec));
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

std::string format_tabular(const std::vector<TabularRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    std::string morph;
    for (const auto& [key, value] : rec.morph) {
      if (!morph.empty()) morph += ';';
      morph += key + "=" + value;
    }
    std::vector<const std::string*> fields = {&rec.token, &rec.lemma, &rec.pos,
                                              &morph};
    std::size_t last = 0;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (!fields[i]->empty()) last = i;
    for (std::size_t i = 0; i <= last; ++i) {
      if (i) out += '\t';
      out += *fields[i];
    }
    out += '\n';
  }
  return out;
}

std::string format_tabular(const std::vector<Sentence>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out += '\n';
    out += format_tabular(sentences[i]);
  }
  return out;
}

LayerSet import_tabular(const std::vector<Sentence>& sentences,
                        const std::optional<std::string>& text,
                        const ImportOptions& options) {
  std::string content;
  if (text) {
    content = *text;
  } else {
    for (const auto& sentence : sentences)
      for (const auto& rec : sentence) {
        if (!content.empty()) content += ' ';
        content += rec.token;
      }
  }
  PrimaryDoc primary = PrimaryDoc::text(options.primary_id, content);

  // Align tokens left to right; only whitespace may sit between them.
  std::size_t pos = 0;
  std::size_t record_index = 0;
  std::vector<std::vector<std::string>> mark_ids(sentences.size());
  int next_mark = 1;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& rec : sentences[s]) {
      while (pos < content.size() &&
             (content[pos] == ' ' || content[pos] == '\t' ||
              content[pos] == '\n' || content[pos] == '\r'))
        ++pos;
      if (content.compare(pos, rec.token.size(), rec.token) != 0)
        throw Error::alignment(record_index, "token \"" + rec.token +
                                                 "\" not found in the text");
      std::string id = "w" + std::to_string(next_mark++);
      primary.add_mark(id, static_cast<std::int64_t>(pos),
                       static_cast<std::int64_t>(pos + rec.token.size()));
      mark_ids[s].push_back(std::move(id));
      pos += rec.token.size();
      ++record_index;
    }
  }

  LayerSet layers;
  layers.add_primary(std::move(primary));

  std::size_t doc_count = sentences.empty() ? 1 : sentences.size();
  for (std::size_t s = 0; s < doc_count; ++s) {
    AnnotationDocument doc(options.doc_id_prefix + std::to_string(s + 1),
                           options.level, options.root_type);
    doc.primary_refs = {options.primary_id};
    if (s < sentences.size()) {
      for (std::size_t i = 0; i < sentences[s].size(); ++i) {
        const TabularRecord& rec = sentences[s][i];
        StructNode& node = doc.add_child(doc.root(), "W-level");
        if (!rec.lemma.empty()) doc.set_feature(node, "lemma", rec.lemma);
        if (!rec.pos.empty()) doc.set_feature(node, "pos", rec.pos);
        for (const auto& [key, value] : rec.morph)
          doc.set_feature(node, key, value);
        doc.set_seg(node, Seg::at({Pointer{"", mark_ids[s][i]}}));
      }
    }
    layers.add_annotation(std::move(doc));
  }
  return layers;
}

namespace {

struct Exporter {
  const LayerSet& layers;
  const std::string& doc_id;
  const ExportOptions& options;

  std::vector<Extent> project(const StructNode& node) const {
    return project_to_primary(node, doc_id, layers);
  }

  std::string surface(const std::vector<Extent>& extents,
                      const StructNode& node) const {
    if (extents.empty())
      throw Error::unresolved(node.id.empty() ? node.node_type : node.id);
    std::string out;
    const Extent* prev = nullptr;
    for (const auto& e : extents) {
      if (e.unit != SpanUnit::CharOffset)
        throw Error(ErrorCode::NotTextual,
                    "node covers timed media, not text");
      const PrimaryDoc* doc = layers.primary(e.doc_id);
      if (!doc) throw Error::unresolved(e.doc_id);
      if (prev && (prev->doc_id != e.doc_id || e.starts_at > prev->ends_at))
        out += ' ';
      out += doc->slice(e.starts_at, e.ends_at);
      prev = &e;
    }
    return out;
  }

  // Features of the node with alternatives resolved per policy.
  std::vector<Feature> effective_features(const StructNode& node) const {
    std::vector<Feature> features = node.features;
    if (node.alternatives.empty()) return features;
    if (options.disambiguation != Disambiguation::HighestConfidence)
      throw Error(ErrorCode::AmbiguityError,
                  "node has alternative readings; no disambiguation policy");
    const AltGroup* best = nullptr;
    for (const auto& g : node.alternatives) {
      if (!g.confidence)
        throw Error(ErrorCode::AmbiguityError,
                    "alternative without a confidence; cannot disambiguate");
      if (!best || *g.confidence > *best->confidence) best = &g;
    }
    features.insert(features.end(), best->features.begin(),
                    best->features.end());
    return features;
  }

  static TabularRecord record_from(const std::vector<Feature>& features,
                                   std::string token) {
    TabularRecord rec;
    rec.token = std::move(token);
    for (const auto& f : features) {
      if (!f.children.empty()) continue;
      if (f.category == "lemma" && rec.lemma.empty())
        rec.lemma = f.value;
      else if (f.category == "pos" && rec.pos.empty())
        rec.pos = f.value;
      else if (f.category != "lemma" && f.category != "pos" &&
               !f.value.empty())
        rec.morph.emplace_back(f.category, f.value);
    }
    return rec;
  }

  static std::string join_plus(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += '+';
      out += parts[i];
    }
    return out;
  }

  void flatten(const StructNode& node, std::vector<TabularRecord>& out) const {
    std::vector<Feature> features = effective_features(node);
    if (node.children.empty()) {
      out.push_back(record_from(features, surface(project(node), node)));
      return;
    }
    std::vector<Extent> own = project(node);
    bool fused = true;
    for (const auto& child : node.children) {
      std::vector<Extent> ce = project(*child);
      if (!ce.empty() && ce != own) {
        fused = false;
        break;
      }
    }
    if (fused) {
      // One surface token analysed into sub-token nodes.
      std::vector<std::string> lemmas, tags;
      std::vector<std::pair<std::string, std::string>> extra;
      for (const auto& child : node.children) {
        std::vector<Feature> cf = effective_features(*child);
        TabularRecord part = record_from(cf, "");
        lemmas.push_back(part.lemma);
        tags.push_back(part.pos);
        extra.insert(extra.end(), part.morph.begin(), part.morph.end());
      }
      TabularRecord rec = record_from(features, surface(own, node));
      rec.lemma = join_plus(lemmas);
      rec.pos = join_plus(tags);
      rec.morph.insert(rec.morph.end(), extra.begin(), extra.end());
      out.push_back(std::move(rec));
      return;
    }
    // Multi-token compound: one record per child token.
    TabularRecord parent = record_from(features, "");
    for (const auto& child : node.children) {
      std::size_t first = out.size();
      flatten(*child, out);
      if (options.compound == CompoundPolicy::Parent) {
        for (std::size_t i = first; i < out.size(); ++i) {
          if (!parent.lemma.empty()) out[i].lemma = parent.lemma;
          if (!parent.pos.empty()) out[i].pos = parent.pos;
        }
      }
    }
  }
};

}  // namespace

std::vector<TabularRecord> export_tabular(const LayerSet& layers,
                                          const std::string& doc_id,
                                          const ExportOptions& options) {
  const AnnotationDocument* doc = layers.annotation(doc_id);
  if (!doc)
    throw Error(ErrorCode::UnknownDocument,
                "no annotation document named \"" + doc_id + "\"");
  Exporter exporter{layers, doc_id, options};

  // A bare container root contributes its children as units; a root that
  // itself carries an anchor or content is the unit.
  std::vector<const StructNode*> units;
  const StructNode& root = doc->root();
  if (root.seg || !root.features.empty() || !root.alternatives.empty()) {
    units.push_back(&root);
  } else {
    for (const auto& child : root.children) units.push_back(child.get());
  }

  // Emit in primary order.
  std::vector<std::pair<std::vector<Extent>, const StructNode*>> keyed;
  keyed.reserve(units.size());
  for (const StructNode* unit : units)
    keyed.emplace_back(exporter.project(*unit), unit);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first.empty() || b.first.empty())
                       return !a.first.empty() && b.first.empty();
                     return a.first.front() < b.first.front();
                   });

  std::vector<TabularRecord> out;
  for (const auto& [extents, unit] : keyed) exporter.flatten(*unit, out);
  return out;
}

}  // namespace gmtannot
