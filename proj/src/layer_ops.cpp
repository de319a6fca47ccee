#include "gmtannot/layer_ops.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "gmtannot/anchoring.hpp"

namespace gmtannot {

namespace {

std::set<std::string> primary_doc_set(const AnnotationDocument& doc,
                                      const LayerSet& layers) {
  std::set<std::string> out;
  for (const Extent& e : project_to_primary(doc.root(), doc.doc_id, layers))
    out.insert(e.doc_id);
  return out;
}

std::vector<Extent> project_or_throw(const StructNode& node,
                                     const std::string& owner,
                                     const LayerSet& layers) {
  return project_to_primary(node, owner, layers);
}

bool contains_feature(const std::vector<Feature>& features, const Feature& f) {
  return std::find(features.begin(), features.end(), f) != features.end();
}

bool has_category(const std::vector<Feature>& features,
                  const std::string& category) {
  for (const auto& f : features)
    if (f.category == category) return true;
  return false;
}

bool contains_group(const std::vector<AltGroup>& groups, const AltGroup& g) {
  for (const auto& existing : groups)
    if (equal(existing, g)) return true;
  return false;
}

AltGroup copy_group(const AltGroup& g, StructNode* owner) {
  AltGroup out(g.features, g.confidence);
  for (const auto& child : g.children) {
    out.children.push_back(clone_node(*child));
    out.children.back()->parent = owner;
  }
  return out;
}

void strip_conflicting_ids(const AnnotationDocument& doc, StructNode& node) {
  if (!node.id.empty() && doc.find(node.id)) node.id.clear();
  for (auto& g : node.alternatives)
    for (auto& child : g.children) strip_conflicting_ids(doc, *child);
  for (auto& child : node.children) strip_conflicting_ids(doc, *child);
}

class Merger {
 public:
  Merger(const AnnotationDocument& a, const AnnotationDocument& b,
         const LayerSet& layers, MergePolicy policy)
      : a_(a), b_(b), layers_(layers), policy_(policy) {}

  AnnotationDocument run() {
    std::set<std::string> pa = primary_doc_set(a_, layers_);
    std::set<std::string> pb = primary_doc_set(b_, layers_);
    if (!pa.empty() && !pb.empty() && pa != pb)
      throw Error(ErrorCode::IncompatibleLayers,
                  "inputs anchor into different primary documents");

    AnnotationDocument result = a_.clone();
    for (const auto& ref : b_.primary_refs) {
      if (std::find(result.primary_refs.begin(), result.primary_refs.end(),
                    ref) == result.primary_refs.end())
        result.primary_refs.push_back(ref);
    }
    merge_node(result, result.root(), b_.root());
    return result;
  }

 private:
  const AnnotationDocument& a_;
  const AnnotationDocument& b_;
  const LayerSet& layers_;
  MergePolicy policy_;

  void merge_features(AnnotationDocument& result, StructNode& ra,
                      const StructNode& nb) {
    switch (policy_) {
      case MergePolicy::Union:
        for (const auto& f : nb.features)
          if (!contains_feature(ra.features, f)) ra.features.push_back(f);
        break;
      case MergePolicy::PreferA:
        for (const auto& f : nb.features)
          if (!has_category(ra.features, f.category)) ra.features.push_back(f);
        break;
      case MergePolicy::AsAlternatives: {
        if (ra.features == nb.features) break;
        if (ra.features.empty()) {
          ra.features = nb.features;
          break;
        }
        if (nb.features.empty()) break;
        // Conflicting bundles become two readings, a-side first.
        std::vector<AltGroup> groups;
        groups.emplace_back(std::move(ra.features));
        groups.emplace_back(nb.features);
        ra.features.clear();
        result.add_alternatives(ra, std::move(groups));
        break;
      }
    }
  }

  void merge_alternatives(StructNode& ra, const StructNode& nb) {
    if (policy_ == MergePolicy::PreferA && !ra.alternatives.empty()) return;
    for (const auto& g : nb.alternatives)
      if (!contains_group(ra.alternatives, g))
        ra.alternatives.push_back(copy_group(g, &ra));
  }

  void merge_node(AnnotationDocument& result, StructNode& ra,
                  const StructNode& nb) {
    merge_alternatives(ra, nb);
    merge_features(result, ra, nb);
    for (const auto& rel : nb.relations)
      if (std::find(ra.relations.begin(), ra.relations.end(), rel) ==
          ra.relations.end())
        ra.relations.push_back(rel);
    if (!ra.seg && nb.seg) ra.seg = nb.seg;
    if (ra.id.empty() && !nb.id.empty() && !result.find(nb.id))
      result.set_id(ra, nb.id);
    merge_children(result, ra, nb);
  }

  void merge_children(AnnotationDocument& result, StructNode& ra,
                      const StructNode& nb) {
    std::vector<std::vector<Extent>> a_keys, b_keys;
    for (const auto& child : ra.children)
      a_keys.push_back(project_or_throw(*child, a_.doc_id, layers_));
    for (const auto& child : nb.children)
      b_keys.push_back(project_or_throw(*child, b_.doc_id, layers_));

    std::vector<bool> a_used(ra.children.size(), false);
    std::vector<int> pair_of_b(nb.children.size(), -1);
    for (std::size_t j = 0; j < nb.children.size(); ++j) {
      if (b_keys[j].empty()) continue;
      for (std::size_t i = 0; i < ra.children.size(); ++i) {
        if (a_used[i] || a_keys[i].empty()) continue;
        if (a_keys[i] == b_keys[j]) {
          a_used[i] = true;
          pair_of_b[j] = static_cast<int>(i);
          break;
        }
      }
    }
    // Nodes without anchors pair up positionally among themselves.
    {
      std::size_t i = 0;
      for (std::size_t j = 0; j < nb.children.size(); ++j) {
        if (!b_keys[j].empty() || pair_of_b[j] >= 0) continue;
        while (i < ra.children.size() && (a_used[i] || !a_keys[i].empty())) ++i;
        if (i == ra.children.size()) break;
        a_used[i] = true;
        pair_of_b[j] = static_cast<int>(i);
      }
    }

    bool adopted = false;
    for (std::size_t j = 0; j < nb.children.size(); ++j) {
      if (pair_of_b[j] >= 0) {
        merge_node(result, *ra.children[static_cast<std::size_t>(pair_of_b[j])],
                   *nb.children[j]);
      } else {
        auto copy = clone_node(*nb.children[j]);
        strip_conflicting_ids(result, *copy);
        result.adopt_child(ra, std::move(copy));
        adopted = true;
      }
    }
    if (adopted) {
      // Restore primary order now that both sides contribute children.
      std::vector<std::pair<std::vector<Extent>, std::unique_ptr<StructNode>>>
          keyed;
      for (auto& child : ra.children) {
        std::vector<Extent> key =
            project_or_throw(*child, a_.doc_id, layers_);
        keyed.emplace_back(std::move(key), std::move(child));
      }
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& x, const auto& y) {
                         if (x.first.empty() || y.first.empty())
                           return !x.first.empty() && y.first.empty();
                         return x.first.front() < y.first.front();
                       });
      ra.children.clear();
      for (auto& [key, child] : keyed) ra.children.push_back(std::move(child));
    }
  }
};

}  // namespace

AnnotationDocument merge(const AnnotationDocument& a,
                         const AnnotationDocument& b, const LayerSet& layers,
                         MergePolicy policy) {
  Merger merger(a, b, layers, policy);
  return merger.run();
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

namespace {

std::string format_ratio(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, static_cast<std::size_t>(p - buf));
}

std::string render_feature(const Feature& f) {
  std::string out = f.value;
  for (const auto& child : f.children) {
    out += out.empty() ? "" : " ";
    out += child.category + "=" + render_feature(child);
  }
  return out;
}

std::string render_group(const AltGroup& g) {
  std::vector<std::string> parts;
  for (const auto& f : g.features)
    parts.push_back(f.category + "=" + render_feature(f));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ",";
    out += p;
  }
  if (g.confidence) out += "@" + format_ratio(*g.confidence);
  if (!g.children.empty())
    out += "+" + std::to_string(g.children.size()) + "sub";
  return out;
}

struct SideInfo {
  std::vector<const StructNode*> nodes;
  std::map<const StructNode*, std::string> label;
  std::map<const StructNode*, std::vector<Extent>> projection;
  std::map<const StructNode*, const StructNode*> parent;
  std::map<const StructNode*, std::size_t> index_in_parent;

  void collect(const StructNode& node, const std::string& path,
               const std::string& owner, const LayerSet& layers) {
    nodes.push_back(&node);
    label[&node] = node.id.empty() ? path : node.id;
    projection[&node] = project_or_throw(node, owner, layers);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const StructNode* child = node.children[i].get();
      parent[child] = &node;
      index_in_parent[child] = i;
      collect(*child, path + "/" + std::to_string(i), owner, layers);
    }
  }
};

std::map<std::string, std::vector<std::string>> category_values(
    const StructNode& node) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& f : node.features) out[f.category].push_back(render_feature(f));
  return out;
}

std::string join_values(const std::vector<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += "|";
    out += v;
  }
  return out;
}

}  // namespace

std::string DiffReport::to_string() const {
  std::ostringstream out;
  out << "diff\tonly-a=" << only_in_a << "\tonly-b=" << only_in_b
      << "\tmatched=" << matched << "\tequal=" << matched_equal
      << "\tconflicts=" << conflicts << "\tagreement=" << format_ratio(agreement)
      << "\n";
  for (const auto& e : entries) {
    const char* kind = "conflict";
    switch (e.kind) {
      case DiffEntry::Kind::OnlyInA: kind = "only-in-a"; break;
      case DiffEntry::Kind::OnlyInB: kind = "only-in-b"; break;
      case DiffEntry::Kind::MatchEqual: kind = "match-equal"; break;
      case DiffEntry::Kind::Conflict: kind = "conflict"; break;
    }
    out << kind << '\t' << e.node_a << '\t' << e.node_b << '\t' << e.category
        << '\t' << e.value_a << '\t' << e.value_b << '\n';
  }
  return out.str();
}

DiffReport diff(const AnnotationDocument& a, const AnnotationDocument& b,
                const LayerSet& layers, const DiffOptions& options) {
  {
    std::set<std::string> pa = primary_doc_set(a, layers);
    std::set<std::string> pb = primary_doc_set(b, layers);
    if (!pa.empty() && !pb.empty() && pa != pb)
      throw Error(ErrorCode::IncompatibleLayers,
                  "inputs anchor into different primary documents");
  }
  SideInfo sa, sb;
  sa.collect(a.root(), "", a.doc_id, layers);
  sb.collect(b.root(), "", b.doc_id, layers);

  std::map<const StructNode*, const StructNode*> pair_a_to_b;
  std::map<const StructNode*, const StructNode*> pair_b_to_a;

  // Anchored nodes match on identical projections, in document order.
  {
    std::map<std::vector<Extent>, std::vector<const StructNode*>> b_by_key;
    for (const StructNode* nb : sb.nodes)
      if (!sb.projection[nb].empty()) b_by_key[sb.projection[nb]].push_back(nb);
    std::map<std::vector<Extent>, std::size_t> next;
    for (const StructNode* na : sa.nodes) {
      const auto& key = sa.projection[na];
      if (key.empty()) continue;
      auto it = b_by_key.find(key);
      if (it == b_by_key.end()) continue;
      std::size_t& cursor = next[key];
      if (cursor >= it->second.size()) continue;
      const StructNode* nb = it->second[cursor++];
      pair_a_to_b[na] = nb;
      pair_b_to_a[nb] = na;
    }
  }
  // Unanchored nodes match positionally under matched parents.
  for (const StructNode* na : sa.nodes) {
    if (pair_a_to_b.count(na) || !sa.projection[na].empty()) continue;
    auto pit = sa.parent.find(na);
    if (pit == sa.parent.end()) continue;
    auto paired = pair_a_to_b.find(pit->second);
    if (paired == pair_a_to_b.end()) continue;
    const StructNode* bp = paired->second;
    std::size_t idx = sa.index_in_parent[na];
    if (idx >= bp->children.size()) continue;
    const StructNode* nb = bp->children[idx].get();
    if (pair_b_to_a.count(nb) || !sb.projection[nb].empty()) continue;
    pair_a_to_b[na] = nb;
    pair_b_to_a[nb] = na;
  }

  DiffReport report;
  for (const StructNode* na : sa.nodes) {
    auto it = pair_a_to_b.find(na);
    if (it == pair_a_to_b.end()) {
      ++report.only_in_a;
      report.entries.push_back({DiffEntry::Kind::OnlyInA, sa.label[na], "",
                                "", "", ""});
      continue;
    }
    const StructNode* nb = it->second;
    ++report.matched;

    auto va = category_values(*na);
    auto vb = category_values(*nb);
    std::set<std::string> cats;
    for (const auto& [cat, vals] : va) cats.insert(cat);
    for (const auto& [cat, vals] : vb) cats.insert(cat);
    std::size_t category_conflicts = 0;
    for (const auto& cat : cats) {
      std::string left = join_values(va.count(cat) ? va[cat] : std::vector<std::string>{});
      std::string right = join_values(vb.count(cat) ? vb[cat] : std::vector<std::string>{});
      if (left == right) continue;
      ++category_conflicts;
      ++report.conflicts;
      report.entries.push_back({DiffEntry::Kind::Conflict, sa.label[na],
                                sb.label[nb], cat, left, right});
    }

    // Alternatives are reported but never counted against agreement.
    {
      std::vector<std::string> ga, gb;
      for (const auto& g : na->alternatives) ga.push_back(render_group(g));
      for (const auto& g : nb->alternatives) gb.push_back(render_group(g));
      if (!options.positional_alternatives) {
        std::sort(ga.begin(), ga.end());
        std::sort(gb.begin(), gb.end());
      }
      if (ga != gb) {
        ++report.conflicts;
        report.entries.push_back({DiffEntry::Kind::Conflict, sa.label[na],
                                  sb.label[nb], "(alternatives)",
                                  join_values(ga), join_values(gb)});
      }
    }

    if (category_conflicts == 0) {
      ++report.matched_equal;
      report.entries.push_back({DiffEntry::Kind::MatchEqual, sa.label[na],
                                sb.label[nb], "", "", ""});
    }
  }
  for (const StructNode* nb : sb.nodes) {
    if (pair_b_to_a.count(nb)) continue;
    ++report.only_in_b;
    report.entries.push_back(
        {DiffEntry::Kind::OnlyInB, "", sb.label[nb], "", "", ""});
  }
  report.agreement =
      report.matched == 0
          ? 1.0
          : static_cast<double>(report.matched_equal) /
                static_cast<double>(report.matched);
  return report;
}

// ---------------------------------------------------------------------------
// covered text
// ---------------------------------------------------------------------------

namespace {

struct TextItem {
  std::optional<Extent> pos;  // hull of the rendered extents
  std::string text;
  bool lemma = false;
};

struct TextRenderer {
  const LayerSet& layers;
  std::vector<TextItem> items;
  bool lemma_fallback = false;

  std::string slice(const Extent& e) const {
    if (e.unit != SpanUnit::CharOffset)
      throw Error(ErrorCode::NotTextual, "extent covers timed media, not text");
    const PrimaryDoc* doc = layers.primary(e.doc_id);
    if (!doc)
      throw Error::unresolved(e.doc_id.empty() ? "(primary)" : e.doc_id);
    return doc->slice(e.starts_at, e.ends_at);
  }

  static Extent hull(const std::vector<Extent>& extents) {
    Extent out = extents.front();
    out.ends_at = extents.back().ends_at;
    return out;
  }

  // A fusion component shares its whole span with the parent that
  // analyses one surface token into several nodes; it has no independent
  // surface of its own, so its lemma stands in.
  bool is_fusion_component(const StructNode& node, const std::string& doc,
                           const std::vector<Extent>& extents) const {
    if (extents.empty() || !node.parent) return false;
    if (node.parent->children.size() < 2) return false;
    return project_to_primary(*node.parent, doc, layers) == extents;
  }

  void add_lemma(const StructNode& node, std::optional<Extent> pos) {
    TextItem item;
    item.pos = std::move(pos);
    item.text = node.feature_value("lemma");
    item.lemma = true;
    lemma_fallback = true;
    items.push_back(std::move(item));
  }

  void walk(const StructNode& node, const std::string& doc) {
    if (!node.seg) {
      for (const auto& child : node.children) walk(*child, doc);
      return;
    }
    for (const ResolvedAnchor& anchor : resolve(*node.seg, doc, layers)) {
      if (!anchor.is_node()) {
        items.push_back({*anchor.extent, slice(*anchor.extent), false});
        continue;
      }
      const StructNode& target = *anchor.node;
      std::vector<Extent> extents =
          project_to_primary(target, anchor.node_doc, layers);
      if (extents.empty()) {
        add_lemma(target, std::nullopt);
      } else if (is_fusion_component(target, anchor.node_doc, extents)) {
        add_lemma(target, hull(extents));
      } else {
        walk(target, anchor.node_doc);
      }
    }
  }

  std::string render() {
    std::stable_sort(items.begin(), items.end(),
                     [](const TextItem& a, const TextItem& b) {
                       if (!a.pos || !b.pos) return a.pos && !b.pos;
                       return *a.pos < *b.pos;
                     });
    std::string out;
    const Extent* prev = nullptr;
    std::string prev_text;
    for (const auto& item : items) {
      if (prev && item.pos && *item.pos == *prev && item.text == prev_text)
        continue;  // duplicate anchor
      bool space = !out.empty() &&
                   (!item.pos || !prev || prev->doc_id != item.pos->doc_id ||
                    item.pos->starts_at > prev->ends_at);
      if (space) out += ' ';
      out += item.text;
      if (item.pos) {
        prev = &item.pos.value();
        prev_text = item.text;
      }
    }
    return out;
  }
};

}  // namespace

CoveredText covered_text(const StructNode& node, const std::string& owner_doc,
                         const LayerSet& layers) {
  TextRenderer renderer{layers, {}, false};
  renderer.walk(node, owner_doc);
  CoveredText out;
  out.text = renderer.render();
  out.lemma_fallback = renderer.lemma_fallback;
  return out;
}

}  // namespace gmtannot
