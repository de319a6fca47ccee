#include "gmtannot/model.hpp"

#include <algorithm>
#include <cmath>

namespace gmtannot {

Pointer parse_pointer(std::string_view text) {
  Pointer p;
  auto hash = text.find('#');
  if (hash == std::string_view::npos) {
    p.fragment = std::string(text);
  } else {
    p.doc_ref = std::string(text.substr(0, hash));
    p.fragment = std::string(text.substr(hash + 1));
  }
  return p;
}

Seg Seg::at(std::vector<Pointer> pointers) {
  if (pointers.empty())
    throw Error(ErrorCode::InvalidArgument, "target list must not be empty");
  for (const auto& p : pointers)
    if (p.fragment.empty())
      throw Error(ErrorCode::InvalidArgument, "pointer fragment is empty");
  Seg s;
  s.targets = std::move(pointers);
  return s;
}

Seg Seg::over(std::int64_t starts_at, std::int64_t ends_at, SpanUnit unit) {
  if (starts_at < 0 || starts_at > ends_at)
    throw Error(ErrorCode::InvalidArgument,
                "span must satisfy 0 <= starts_at <= ends_at");
  Seg s;
  s.span = Span{starts_at, ends_at, unit};
  return s;
}

AltGroup::AltGroup(std::vector<Feature> feats, std::optional<double> conf)
    : features(std::move(feats)), confidence(conf) {}

const Feature* StructNode::find_feature(std::string_view category) const {
  for (const auto& f : features)
    if (f.category == category) return &f;
  return nullptr;
}

std::string StructNode::feature_value(std::string_view category) const {
  const Feature* f = find_feature(category);
  return f ? f->value : std::string();
}

std::unique_ptr<StructNode> clone_node(const StructNode& node) {
  auto copy = std::make_unique<StructNode>();
  copy->id = node.id;
  copy->node_type = node.node_type;
  copy->features = node.features;
  copy->relations = node.relations;
  copy->seg = node.seg;
  for (const auto& group : node.alternatives) {
    AltGroup g(group.features, group.confidence);
    for (const auto& child : group.children) {
      g.children.push_back(clone_node(*child));
      g.children.back()->parent = copy.get();
    }
    copy->alternatives.push_back(std::move(g));
  }
  for (const auto& child : node.children) {
    copy->children.push_back(clone_node(*child));
    copy->children.back()->parent = copy.get();
  }
  return copy;
}

bool equal(const AltGroup& a, const AltGroup& b) {
  if (a.features != b.features || a.confidence != b.confidence) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

bool equal(const StructNode& a, const StructNode& b) {
  if (a.id != b.id || a.node_type != b.node_type) return false;
  if (a.features != b.features || a.relations != b.relations ||
      a.seg != b.seg)
    return false;
  if (a.alternatives.size() != b.alternatives.size()) return false;
  for (std::size_t i = 0; i < a.alternatives.size(); ++i)
    if (!equal(a.alternatives[i], b.alternatives[i])) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

AnnotationDocument::AnnotationDocument(std::string doc_id_, std::string level_,
                                       std::string root_type)
    : doc_id(std::move(doc_id_)), level(std::move(level_)) {
  if (root_type.empty())
    throw Error(ErrorCode::InvalidArgument, "root node type must not be empty");
  root_ = std::make_unique<StructNode>();
  root_->node_type = std::move(root_type);
}

AnnotationDocument new_document(const std::string& doc_id,
                                const std::string& level,
                                const std::string& root_type) {
  if (doc_id.empty() || level.empty() || root_type.empty())
    throw Error(ErrorCode::InvalidArgument,
                "doc_id, level and root_type must all be non-empty");
  return AnnotationDocument(doc_id, level, root_type);
}

StructNode& AnnotationDocument::add_child(StructNode& parent,
                                          std::string node_type,
                                          std::string id) {
  if (node_type.empty())
    throw Error(ErrorCode::InvalidArgument, "node type must not be empty");
  if (!owns(parent))
    throw Error(ErrorCode::NotFound, "parent node is not part of this document");
  if (!id.empty() && by_id_.count(id))
    throw Error(ErrorCode::DuplicateIdentifier,
                "node id \"" + id + "\" already used");
  auto node = std::make_unique<StructNode>();
  node->node_type = std::move(node_type);
  node->id = std::move(id);
  node->parent = &parent;
  StructNode& ref = *node;
  parent.children.push_back(std::move(node));
  if (!ref.id.empty()) by_id_[ref.id] = &ref;
  return ref;
}

StructNode& AnnotationDocument::adopt_child(StructNode& parent,
                                            std::unique_ptr<StructNode> node) {
  if (!node) throw Error(ErrorCode::InvalidArgument, "null node");
  if (!owns(parent))
    throw Error(ErrorCode::NotFound, "parent node is not part of this document");
  check_subtree_ids(*node);
  StructNode& ref = *node;
  parent.children.push_back(std::move(node));
  index_subtree(ref, &parent);
  return ref;
}

void AnnotationDocument::set_feature(StructNode& node, std::string category,
                                     std::string value) {
  add_feature(node, Feature{std::move(category), std::move(value), {}});
}

void AnnotationDocument::add_feature(StructNode& node, Feature feature) {
  if (feature.category.empty())
    throw Error(ErrorCode::InvalidArgument, "feature category must not be empty");
  node.features.push_back(std::move(feature));
}

void AnnotationDocument::add_alternatives(StructNode& node,
                                          std::vector<AltGroup> groups) {
  if (groups.empty())
    throw Error(ErrorCode::InvalidArgument, "alternative group list is empty");
  for (const auto& g : groups) {
    if (g.empty())
      throw Error(ErrorCode::InvalidArgument, "alternative group is empty");
    if (g.confidence && (*g.confidence < 0.0 || *g.confidence > 1.0))
      throw Error(ErrorCode::InvalidArgument,
                  "confidence must lie in [0,1]");
  }
  for (auto& g : groups)
    for (auto& child : g.children) check_subtree_ids(*child);
  for (auto& g : groups) {
    for (auto& child : g.children) index_subtree(*child, &node);
    node.alternatives.push_back(std::move(g));
  }
}

void AnnotationDocument::add_relation(StructNode& node, Relation relation) {
  if (relation.targets.empty())
    throw Error(ErrorCode::InvalidArgument, "relation needs at least one target");
  node.relations.push_back(std::move(relation));
}

void AnnotationDocument::set_seg(StructNode& node, Seg seg) {
  node.seg = std::move(seg);
}

void AnnotationDocument::set_id(StructNode& node, std::string id) {
  if (!id.empty() && by_id_.count(id) && by_id_.at(id) != &node)
    throw Error(ErrorCode::DuplicateIdentifier,
                "node id \"" + id + "\" already used");
  if (!node.id.empty()) by_id_.erase(node.id);
  node.id = std::move(id);
  if (!node.id.empty()) by_id_[node.id] = &node;
}

StructNode* AnnotationDocument::find(std::string_view id) {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : it->second;
}

const StructNode* AnnotationDocument::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : it->second;
}

namespace {

template <typename NodePtr>
void collect(NodePtr node, TraversalOrder order, std::vector<NodePtr>& out) {
  if (order == TraversalOrder::Pre) out.push_back(node);
  for (const auto& child : node->children)
    collect<NodePtr>(child.get(), order, out);
  if (order == TraversalOrder::Post) out.push_back(node);
}

void visit_deep(const StructNode& node,
                const std::function<void(const StructNode&)>& fn) {
  fn(node);
  for (const auto& g : node.alternatives)
    for (const auto& child : g.children) visit_deep(*child, fn);
  for (const auto& child : node.children) visit_deep(*child, fn);
}

}  // namespace

std::vector<const StructNode*> AnnotationDocument::nodes(
    TraversalOrder order) const {
  std::vector<const StructNode*> out;
  collect<const StructNode*>(root_.get(), order, out);
  return out;
}

std::vector<StructNode*> AnnotationDocument::nodes(TraversalOrder order) {
  std::vector<StructNode*> out;
  collect<StructNode*>(root_.get(), order, out);
  return out;
}

void AnnotationDocument::visit_all(
    const std::function<void(const StructNode&)>& fn) const {
  visit_deep(*root_, fn);
}

void AnnotationDocument::assign_ids() {
  int next = 1;
  for (StructNode* node : nodes(TraversalOrder::Pre)) {
    if (!node->id.empty()) continue;
    std::string candidate;
    do {
      candidate = "n" + std::to_string(next++);
    } while (by_id_.count(candidate));
    node->id = candidate;
    by_id_[candidate] = node;
  }
}

bool AnnotationDocument::owns(const StructNode& node) const {
  const StructNode* n = &node;
  while (n->parent) n = n->parent;
  return n == root_.get();
}

AnnotationDocument AnnotationDocument::clone() const {
  AnnotationDocument copy(doc_id, level, root_->node_type);
  copy.primary_refs = primary_refs;
  copy.root_ = clone_node(*root_);
  copy.by_id_.clear();
  copy.index_subtree(*copy.root_, nullptr);
  return copy;
}

void AnnotationDocument::index_subtree(StructNode& node, StructNode* parent) {
  node.parent = parent;
  if (!node.id.empty()) by_id_[node.id] = &node;
  for (auto& g : node.alternatives)
    for (auto& child : g.children) index_subtree(*child, &node);
  for (auto& child : node.children) index_subtree(*child, &node);
}

void AnnotationDocument::check_subtree_ids(const StructNode& node) const {
  if (!node.id.empty() && by_id_.count(node.id))
    throw Error(ErrorCode::DuplicateIdentifier,
                "node id \"" + node.id + "\" already used");
  for (const auto& g : node.alternatives)
    for (const auto& child : g.children) check_subtree_ids(*child);
  for (const auto& child : node.children) check_subtree_ids(*child);
}

bool equal(const AnnotationDocument& a, const AnnotationDocument& b) {
  return a.doc_id == b.doc_id && a.level == b.level &&
         a.primary_refs == b.primary_refs && equal(a.root(), b.root());
}

namespace {

void check_feature(const Feature& f, const std::string& source,
                   Diagnostics& diags) {
  if (f.category.empty())
    diags.push_back({Severity::Error, source, 0, 0, "empty-category",
                     "feature without a category"});
  if (f.value.empty() && f.children.empty())
    diags.push_back({Severity::Error, source, 0, 0, "empty-feature",
                     "feature \"" + f.category +
                         "\" has neither a value nor sub-features"});
  for (const auto& child : f.children) check_feature(child, source, diags);
}

}  // namespace

Diagnostics check_document(const AnnotationDocument& doc,
                           const std::string& source_name) {
  Diagnostics diags;
  doc.visit_all([&](const StructNode& node) {
    for (const auto& f : node.features) check_feature(f, source_name, diags);
    double sum = 0.0;
    bool any_conf = false;
    for (const auto& g : node.alternatives) {
      for (const auto& f : g.features) check_feature(f, source_name, diags);
      if (g.confidence) {
        any_conf = true;
        sum += *g.confidence;
        if (*g.confidence < 0.0 || *g.confidence > 1.0)
          diags.push_back({Severity::Error, source_name, 0, 0,
                           "confidence-range",
                           "alternative confidence outside [0,1]"});
      }
    }
    if (any_conf && sum > 1.0 + 1e-9)
      diags.push_back({Severity::Warning, source_name, 0, 0, "confidence-sum",
                       "alternative confidences of node \"" +
                           (node.id.empty() ? node.node_type : node.id) +
                           "\" sum above 1"});
  });
  return diags;
}

}  // namespace gmtannot
