#include "gmtannot/anchoring.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gmtannot {

namespace {

Extent mark_extent(const PrimaryDoc& doc, const Mark& mark) {
  return Extent{doc.doc_id, mark.starts_at, mark.ends_at, doc.unit()};
}

// Search order for a pointer without an explicit document: the owning
// document's primary_refs, then the set-wide default target, then every
// document in the set. Annotation documents (node ids) are searched
// before primary documents (marks).
std::vector<std::string> scope_docs(const std::string& owner_doc,
                                    const LayerSet& layers,
                                    bool* whole_set_fallback) {
  *whole_set_fallback = false;
  std::vector<std::string> annots, prims;
  auto push = [&](const std::string& id) {
    if (layers.annotation(id))
      annots.push_back(id);
    else if (layers.primary(id))
      prims.push_back(id);
  };
  if (const AnnotationDocument* owner = layers.annotation(owner_doc)) {
    for (const auto& ref : owner->primary_refs) push(ref);
  }
  if (annots.empty() && prims.empty() && !layers.default_target.empty())
    push(layers.default_target);
  if (annots.empty() && prims.empty()) {
    *whole_set_fallback = true;
    for (const auto& [id, doc] : layers.annotations()) annots.push_back(id);
    for (const auto& [id, doc] : layers.primaries()) prims.push_back(id);
  }
  annots.insert(annots.end(), prims.begin(), prims.end());
  return annots;
}

struct PtrResolution {
  std::optional<ResolvedAnchor> anchor;
  bool ambiguous = false;
  // Unresolved, but the only searchable scope was the whole-set fallback
  // of a set without primary data: nothing to check against.
  bool unverifiable = false;
  std::string missing_doc;  // explicit doc_ref that is not in the set
};

PtrResolution resolve_pointer_impl(const Pointer& ptr,
                                   const std::string& owner_doc,
                                   const LayerSet& layers) {
  PtrResolution result;
  std::vector<std::string> docs;
  bool fallback = false;
  if (!ptr.doc_ref.empty()) {
    if (!layers.has_doc(ptr.doc_ref)) {
      result.missing_doc = ptr.doc_ref;
      return result;
    }
    docs.push_back(ptr.doc_ref);
  } else {
    docs = scope_docs(owner_doc, layers, &fallback);
  }
  std::vector<ResolvedAnchor> matches;
  for (const auto& id : docs) {
    if (const AnnotationDocument* doc = layers.annotation(id)) {
      if (const StructNode* node = doc->find(ptr.fragment)) {
        ResolvedAnchor a;
        a.node = node;
        a.node_doc = id;
        matches.push_back(std::move(a));
      }
    } else if (const PrimaryDoc* doc = layers.primary(id)) {
      if (const Mark* mark = doc->find_mark(ptr.fragment)) {
        ResolvedAnchor a;
        a.extent = mark_extent(*doc, *mark);
        matches.push_back(std::move(a));
      }
    }
  }
  if (matches.empty()) {
    result.unverifiable = fallback && layers.primaries().empty();
    return result;
  }
  result.ambiguous = matches.size() > 1;
  result.anchor = std::move(matches.front());
  return result;
}

struct SpanResolution {
  std::optional<Extent> extent;
  Diagnostics problems;
};

// A span is read against the first primary document reachable from the
// owner's declared targets; without one the extent is left unchecked.
SpanResolution resolve_span_impl(const Span& span, const std::string& owner_doc,
                                 const LayerSet& layers) {
  SpanResolution result;
  const PrimaryDoc* target = nullptr;
  if (const AnnotationDocument* owner = layers.annotation(owner_doc)) {
    for (const auto& ref : owner->primary_refs) {
      if (const PrimaryDoc* p = layers.primary(ref)) {
        target = p;
        break;
      }
    }
  }
  if (!target && !layers.default_target.empty())
    target = layers.primary(layers.default_target);
  if (!target && layers.primaries().size() == 1)
    target = &layers.primaries().begin()->second;

  Extent extent{target ? target->doc_id : std::string(), span.starts_at,
                span.ends_at, span.unit};
  if (target) {
    if (span.unit != target->unit())
      result.problems.push_back(
          {Severity::Error, "", 0, 0, "unit-mismatch",
           "span unit does not match document \"" + target->doc_id + "\""});
    if (span.starts_at < 0 || span.ends_at > target->length)
      result.problems.push_back(
          {Severity::Error, "", 0, 0, "out-of-range",
           "span outside document \"" + target->doc_id + "\""});
  }
  if (result.problems.empty()) result.extent = extent;
  return result;
}

[[noreturn]] void throw_span_problem(const Diagnostic& d) {
  if (d.code == "unit-mismatch") throw Error(ErrorCode::UnitMismatch, d.message);
  throw Error(ErrorCode::OutOfRange, d.message);
}

ResolvedAnchor resolve_pointer_or_throw(const Pointer& ptr,
                                        const std::string& owner_doc,
                                        const LayerSet& layers) {
  PtrResolution r = resolve_pointer_impl(ptr, owner_doc, layers);
  if (!r.missing_doc.empty())
    throw Error(ErrorCode::UnknownDocument,
                "no document named \"" + r.missing_doc + "\"");
  if (!r.anchor) throw Error::unresolved(ptr.fragment);
  return std::move(*r.anchor);
}

using NodeKey = const StructNode*;

std::vector<Extent> project_impl(const StructNode& node,
                                 const std::string& owner_doc,
                                 const LayerSet& layers,
                                 std::set<NodeKey>& path) {
  if (path.count(&node))
    throw Error(ErrorCode::CyclicAnchor,
                "anchor chain loops through node \"" +
                    (node.id.empty() ? node.node_type : node.id) + "\"");
  path.insert(&node);
  std::vector<Extent> out;
  if (node.seg) {
    if (node.seg->is_span()) {
      SpanResolution sr = resolve_span_impl(*node.seg->span, owner_doc, layers);
      if (!sr.problems.empty()) throw_span_problem(sr.problems.front());
      if (sr.extent) out.push_back(*sr.extent);
    } else {
      for (const auto& ptr : node.seg->targets) {
        ResolvedAnchor a = resolve_pointer_or_throw(ptr, owner_doc, layers);
        if (a.is_node()) {
          auto sub = project_impl(*a.node, a.node_doc, layers, path);
          out.insert(out.end(), sub.begin(), sub.end());
        } else {
          out.push_back(*a.extent);
        }
      }
    }
  } else {
    for (const auto& child : node.children) {
      auto sub = project_impl(*child, owner_doc, layers, path);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  path.erase(&node);
  return out;
}

}  // namespace

std::vector<ResolvedAnchor> resolve(const Seg& seg, const std::string& owner_doc,
                                    const LayerSet& layers) {
  std::vector<ResolvedAnchor> out;
  if (seg.is_span()) {
    SpanResolution sr = resolve_span_impl(*seg.span, owner_doc, layers);
    if (!sr.problems.empty()) throw_span_problem(sr.problems.front());
    if (sr.extent) {
      ResolvedAnchor a;
      a.extent = *sr.extent;
      out.push_back(std::move(a));
    }
    return out;
  }
  for (const auto& ptr : seg.targets)
    out.push_back(resolve_pointer_or_throw(ptr, owner_doc, layers));
  return out;
}

std::vector<Extent> project_to_primary(const StructNode& node,
                                       const std::string& owner_doc,
                                       const LayerSet& layers) {
  std::set<NodeKey> path;
  std::vector<Extent> out = project_impl(node, owner_doc, layers, path);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::unique_ptr<StructNode> make_landmark(std::int64_t starts_at,
                                          std::int64_t ends_at, SpanUnit unit,
                                          std::string id) {
  Seg seg = Seg::over(starts_at, ends_at, unit);  // validates the span
  auto node = std::make_unique<StructNode>();
  node->node_type = "landmark";
  node->id = std::move(id);
  node->seg = std::move(seg);
  return node;
}

namespace {

struct CycleScanner {
  const LayerSet& layers;
  Diagnostics& diags;
  std::map<NodeKey, int> color;  // 0 white, 1 gray, 2 black

  std::vector<std::pair<const StructNode*, std::string>> edges(
      const StructNode& node, const std::string& doc) {
    std::vector<std::pair<const StructNode*, std::string>> out;
    if (node.seg) {
      if (!node.seg->is_span()) {
        for (const auto& ptr : node.seg->targets) {
          PtrResolution r = resolve_pointer_impl(ptr, doc, layers);
          if (r.anchor && r.anchor->is_node())
            out.emplace_back(r.anchor->node, r.anchor->node_doc);
        }
      }
    } else {
      for (const auto& child : node.children) out.emplace_back(child.get(), doc);
    }
    return out;
  }

  void visit(const StructNode& node, const std::string& doc) {
    color[&node] = 1;
    for (auto& [next, next_doc] : edges(node, doc)) {
      int c = color[next];
      if (c == 1) {
        diags.push_back(
            {Severity::Error, "", 0, 0, "cyclic-anchor",
             "anchor chain loops through node \"" +
                 (next->id.empty() ? next->node_type : next->id) + "\""});
      } else if (c == 0) {
        visit(*next, next_doc);
      }
    }
    color[&node] = 2;
  }
};

}  // namespace

Diagnostics validate_anchors(const LayerSet& layers) {
  Diagnostics diags;

  auto resolve_and_report = [&](const Pointer& ptr, const std::string& doc_id,
                                const StructNode& node) {
    PtrResolution r = resolve_pointer_impl(ptr, doc_id, layers);
    std::string where = node.id.empty() ? node.node_type : node.id;
    if (!r.missing_doc.empty()) {
      diags.push_back({Severity::Error, doc_id, 0, 0, "unknown-document",
                       "pointer from node \"" + where +
                           "\" names missing document \"" + r.missing_doc +
                           "\""});
      return;
    }
    if (!r.anchor) {
      diags.push_back({r.unverifiable ? Severity::Warning : Severity::Error,
                       doc_id, 0, 0, "unresolved-reference",
                       "no node or mark named \"" + ptr.fragment +
                           "\" (from node \"" + where + "\")"});
      return;
    }
    if (r.ambiguous)
      diags.push_back({Severity::Warning, doc_id, 0, 0, "ambiguous-reference",
                       "fragment \"" + ptr.fragment +
                           "\" matches in more than one document"});
  };

  for (const auto& [doc_id, doc] : layers.annotations()) {
    for (const auto& ref : doc.primary_refs) {
      if (!layers.has_doc(ref))
        diags.push_back({Severity::Error, doc_id, 0, 0, "unknown-document",
                         "declared target document \"" + ref +
                             "\" is not in the layer set"});
    }
    doc.visit_all([&](const StructNode& node) {
      if (node.is_landmark()) {
        bool shape_ok = node.seg && node.seg->is_span() &&
                        node.features.empty() && node.children.empty() &&
                        node.alternatives.empty();
        if (!shape_ok)
          diags.push_back(
              {Severity::Error, doc_id, 0, 0, "landmark-shape",
               "landmark \"" + (node.id.empty() ? "(anonymous)" : node.id) +
                   "\" must carry a span seg and nothing else"});
      }
      if (node.seg) {
        if (node.seg->is_span()) {
          SpanResolution sr =
              resolve_span_impl(*node.seg->span, doc_id, layers);
          for (auto d : sr.problems) {
            d.file = doc_id;
            diags.push_back(std::move(d));
          }
        } else {
          for (const auto& ptr : node.seg->targets)
            resolve_and_report(ptr, doc_id, node);
        }
      }
      for (const auto& rel : node.relations) {
        if (rel.source) resolve_and_report(*rel.source, doc_id, node);
        for (const auto& ptr : rel.targets)
          resolve_and_report(ptr, doc_id, node);
      }
    });
  }

  CycleScanner scanner{layers, diags, {}};
  for (const auto& [doc_id, doc] : layers.annotations()) {
    doc.visit_all([&](const StructNode& node) {
      if (scanner.color[&node] == 0) scanner.visit(node, doc_id);
    });
  }
  return diags;
}

}  // namespace gmtannot
