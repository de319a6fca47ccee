#include "gmtannot/gmt_xml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace gmtannot {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
         c == '-' || c == '.';
}

std::string collapse_ws(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_ws(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, static_cast<std::size_t>(p - buf));
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// raw element tree
// ---------------------------------------------------------------------------

struct Attr {
  std::string name;
  std::string value;
  int line = 0;
  int col = 0;
};

struct RawNode {
  std::string name;
  std::vector<Attr> attrs;
  std::string text;
  std::vector<RawNode> children;
  int line = 1;
  int col = 1;

  const Attr* attr(std::string_view attr_name) const {
    for (const auto& a : attrs)
      if (a.name == attr_name) return &a;
    return nullptr;
  }
};

// Tolerant reader for the small element vocabulary of the format. Tracks
// line/column for every diagnostic. In lenient mode it repairs the usual
// slips seen in hand-written files: segs left open around their
// neighbours, stray end tags, and missing outer wrappers.
class Reader {
 public:
  Reader(std::string_view input, bool strict, std::string_view source,
         Diagnostics& diags)
      : input_(input), strict_(strict), source_(source), diags_(diags) {}

  std::vector<RawNode> read_all() {
    while (true) {
      read_text_run();
      if (eof()) break;
      read_markup();
    }
    if (!frames_.empty()) {
      if (strict_)
        throw Error::parse(line_, col_, "element <" + frames_.back().name +
                                            "> is never closed");
      while (!frames_.empty()) {
        warn(line_, col_,
             "unclosed-element", "element <" + frames_.back().name +
                                     "> implicitly closed at end of input");
        close_top();
      }
    }
    return std::move(tops_);
  }

 private:
  std::string_view input_;
  bool strict_;
  std::string source_;
  Diagnostics& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<RawNode> frames_;
  std::vector<RawNode> tops_;

  bool eof() const { return pos_ >= input_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < input_.size() ? input_[pos_ + ahead] : '\0';
  }
  bool looking_at(std::string_view s) const {
    return input_.compare(pos_, s.size(), s) == 0;
  }

  char take() {
    char c = input_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip(std::size_t n) {
    for (std::size_t i = 0; i < n && !eof(); ++i) take();
  }

  void warn(int line, int col, const std::string& code,
            const std::string& message) {
    diags_.push_back({Severity::Warning, source_, line, col, code, message});
  }

  [[noreturn]] void fail(const std::string& message) {
    throw Error::parse(line_, col_, message);
  }

  // Decodes one entity reference starting at '&'.
  std::string read_entity() {
    int eline = line_, ecol = col_;
    take();  // '&'
    std::string name;
    while (!eof() && peek() != ';' && name.size() < 12) name += take();
    if (eof() || peek() != ';') {
      warn(eline, ecol, "bad-entity", "unterminated entity reference");
      return "&" + name;
    }
    take();  // ';'
    if (name == "amp") return "&";
    if (name == "lt") return "<";
    if (name == "gt") return ">";
    if (name == "quot") return "\"";
    if (name == "apos") return "'";
    if (!name.empty() && name[0] == '#') {
      int base = 10;
      std::string_view digits(name);
      digits.remove_prefix(1);
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits.remove_prefix(1);
      }
      unsigned long code = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                     code, base);
      if (ec == std::errc() && p == digits.data() + digits.size() && code > 0 &&
          code < 0x110000) {
        // encode as UTF-8
        std::string out;
        if (code < 0x80) {
          out += static_cast<char>(code);
        } else if (code < 0x800) {
          out += static_cast<char>(0xC0 | (code >> 6));
          out += static_cast<char>(0x80 | (code & 0x3F));
        } else if (code < 0x10000) {
          out += static_cast<char>(0xE0 | (code >> 12));
          out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (code & 0x3F));
        } else {
          out += static_cast<char>(0xF0 | (code >> 18));
          out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
          out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
          out += static_cast<char>(0x80 | (code & 0x3F));
        }
        return out;
      }
    }
    warn(eline, ecol, "bad-entity", "unknown entity \"&" + name + ";\"");
    return "&" + name + ";";
  }

  void read_text_run() {
    std::string run;
    int rline = line_, rcol = col_;
    while (!eof() && peek() != '<') {
      if (peek() == '&')
        run += read_entity();
      else
        run += take();
    }
    if (run.empty()) return;
    if (!frames_.empty()) {
      frames_.back().text += run;
    } else if (!collapse_ws(run).empty()) {
      if (strict_)
        throw Error::parse(rline, rcol, "text outside of any element");
      warn(rline, rcol, "stray-text", "text outside of any element ignored");
    }
  }

  std::string read_name() {
    if (eof() || !is_name_start(peek())) fail("expected a name");
    std::string name;
    name += take();
    while (!eof() && is_name_char(peek())) name += take();
    return name;
  }

  void skip_ws() {
    while (!eof() && is_ws(peek())) take();
  }

  void read_markup() {
    int mline = line_, mcol = col_;
    if (looking_at("<?")) {
      std::string decl;
      skip(2);
      while (!eof() && !looking_at("?>")) decl += take();
      if (eof()) fail("unterminated processing instruction");
      skip(2);
      check_encoding(decl, mline, mcol);
      return;
    }
    if (looking_at("<!--")) {
      skip(4);
      while (!eof() && !looking_at("-->")) take();
      if (eof()) fail("unterminated comment");
      skip(3);
      return;
    }
    if (looking_at("<!")) {
      while (!eof() && peek() != '>') take();
      if (eof()) fail("unterminated markup declaration");
      take();
      warn(mline, mcol, "markup-declaration", "markup declaration ignored");
      return;
    }
    if (looking_at("</")) {
      skip(2);
      std::string name = read_name();
      skip_ws();
      if (eof() || peek() != '>') fail("malformed end tag");
      take();
      handle_end(name, mline, mcol);
      return;
    }
    take();  // '<'
    RawNode el;
    el.line = mline;
    el.col = mcol;
    el.name = read_name();
    while (true) {
      skip_ws();
      if (eof()) fail("unterminated start tag <" + el.name + ">");
      if (peek() == '>') {
        take();
        frames_.push_back(std::move(el));
        return;
      }
      if (looking_at("/>")) {
        skip(2);
        attach(std::move(el));
        return;
      }
      Attr attr;
      attr.line = line_;
      attr.col = col_;
      attr.name = read_name();
      skip_ws();
      if (eof() || peek() != '=')
        fail("attribute \"" + attr.name + "\" has no value");
      take();
      skip_ws();
      if (eof() || (peek() != '"' && peek() != '\''))
        fail("attribute value must be quoted");
      char quote = take();
      while (!eof() && peek() != quote) {
        if (peek() == '&')
          attr.value += read_entity();
        else
          attr.value += take();
      }
      if (eof()) fail("unterminated attribute value");
      take();
      if (el.attr(attr.name)) {
        warn(attr.line, attr.col, "duplicate-attribute",
             "attribute \"" + attr.name + "\" repeated; first value kept");
      } else {
        el.attrs.push_back(std::move(attr));
      }
    }
  }

  void check_encoding(const std::string& decl, int line, int col) {
    auto at = decl.find("encoding");
    if (at == std::string::npos) return;
    auto q1 = decl.find_first_of("\"'", at);
    if (q1 == std::string::npos) return;
    auto q2 = decl.find(decl[q1], q1 + 1);
    if (q2 == std::string::npos) return;
    std::string enc = decl.substr(q1 + 1, q2 - q1 - 1);
    std::transform(enc.begin(), enc.end(), enc.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (enc != "utf-8" && enc != "us-ascii")
      warn(line, col, "encoding",
           "declared encoding \"" + enc + "\" read as UTF-8");
  }

  void attach(RawNode&& el) {
    if (frames_.empty())
      tops_.push_back(std::move(el));
    else
      frames_.back().children.push_back(std::move(el));
  }

  // Closes the top frame implicitly. A seg never has element content, so
  // elements swallowed by an open seg belong to the enclosing node and
  // are re-attached there.
  void close_top() {
    RawNode top = std::move(frames_.back());
    frames_.pop_back();
    if (top.name == "seg" && !top.children.empty()) {
      std::vector<RawNode> content = std::move(top.children);
      top.children.clear();
      attach(std::move(top));
      for (auto& child : content) attach(std::move(child));
    } else {
      attach(std::move(top));
    }
  }

  void handle_end(const std::string& name, int line, int col) {
    if (!frames_.empty() && frames_.back().name == name) {
      close_top();
      return;
    }
    // Mismatch. Look for the matching open element deeper in the stack.
    std::size_t match = frames_.size();
    for (std::size_t i = frames_.size(); i-- > 0;) {
      if (frames_[i].name == name) {
        match = i;
        break;
      }
    }
    if (strict_) {
      if (frames_.empty())
        throw Error::parse(line, col, "end tag </" + name + "> matches nothing");
      throw Error::parse(line, col, "end tag </" + name + "> where <" +
                                        frames_.back().name + "> is open");
    }
    if (match == frames_.size()) {
      warn(line, col, "stray-end-tag", "end tag </" + name + "> ignored");
      return;
    }
    while (frames_.size() > match + 1) {
      warn(line, col, "unclosed-element",
           "element <" + frames_.back().name + "> implicitly closed by </" +
               name + ">");
      close_top();
    }
    close_top();
  }
};

// ---------------------------------------------------------------------------
// raw tree -> model
// ---------------------------------------------------------------------------

std::string derive_doc_id(std::string_view source_name) {
  auto slash = source_name.find_last_of("/\\");
  std::string_view base = slash == std::string_view::npos
                              ? source_name
                              : source_name.substr(slash + 1);
  auto dot = base.find('.');
  if (dot != std::string_view::npos) base = base.substr(0, dot);
  return std::string(base);
}

class Builder {
 public:
  Builder(const GmtDialect& dialect, std::string source, Diagnostics& diags)
      : dialect_(dialect), source_(std::move(source)), diags_(diags) {}

  AnnotationDocument build(std::vector<RawNode> tops,
                           std::string_view source_name) {
    if (tops.empty())
      throw Error::parse(0, 0, "input contains no annotation element");
    RawNode root_raw;
    if (tops.size() == 1) {
      root_raw = std::move(tops.front());
    } else {
      report(dialect_.strict ? Severity::Error : Severity::Warning,
             tops[1].line, tops[1].col, "multiple-roots",
             "more than one top-level element; wrapped under a synthetic root");
      root_raw.name = "struct";
      root_raw.attrs.push_back({"type", "root", 0, 0});
      root_raw.children = std::move(tops);
    }
    if (root_raw.name != "struct")
      throw Error::parse(root_raw.line, root_raw.col,
                         "top-level element must be <struct>, found <" +
                             root_raw.name + ">");

    std::string root_type = struct_type(root_raw);
    std::string doc_id, level;
    std::vector<std::string> refs;
    if (const Attr* a = root_raw.attr("doc")) doc_id = a->value;
    if (const Attr* a = root_raw.attr("level")) level = a->value;
    if (const Attr* a = root_raw.attr("base")) refs = split_ws(a->value);
    if (doc_id.empty()) doc_id = derive_doc_id(source_name);
    if (level.empty()) level = root_type;
    check_attrs(root_raw, {"type", "id", "doc", "level", "base"});

    AnnotationDocument doc(doc_id, level, root_type);
    doc.primary_refs = std::move(refs);
    if (const Attr* a = root_raw.attr("id"))
      if (!a->value.empty()) doc.set_id(doc.root(), a->value);

    // The document-level attributes are consumed; leave the node builder a
    // plain struct element so it does not re-report them.
    std::vector<Attr> node_attrs;
    node_attrs.push_back({"type", root_type, root_raw.line, root_raw.col});
    root_raw.attrs = std::move(node_attrs);
    fill_node(doc, doc.root(), root_raw);
    return doc;
  }

 private:
  const GmtDialect& dialect_;
  std::string source_;
  Diagnostics& diags_;

  void report(Severity sev, int line, int col, const std::string& code,
              const std::string& message) {
    diags_.push_back({sev, source_, line, col, code, message});
  }
  void problem(int line, int col, const std::string& code,
               const std::string& message) {
    report(Severity::Error, line, col, code, message);
  }
  // Lenient-mode tolerated, strict-mode error.
  void tolerated(int line, int col, const std::string& code,
                 const std::string& message) {
    report(dialect_.strict ? Severity::Error : Severity::Warning, line, col,
           code, message);
  }

  static std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (is_ws(c)) {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  void check_attrs(const RawNode& el,
                   std::initializer_list<std::string_view> known) {
    for (const auto& a : el.attrs) {
      bool ok = false;
      for (auto k : known)
        if (a.name == k) ok = true;
      if (!ok)
        tolerated(a.line, a.col, "unknown-attribute",
                  "attribute \"" + a.name + "\" not used on <" + el.name + ">");
    }
  }

  std::string struct_type(const RawNode& el) {
    if (const Attr* a = el.attr("type")) {
      if (!a->value.empty()) return a->value;
    }
    tolerated(el.line, el.col, "missing-type",
              "<" + el.name + "> without a type; \"unknown\" assumed");
    return "unknown";
  }

  Feature build_feature(const RawNode& el) {
    check_attrs(el, {"type"});
    Feature f;
    if (const Attr* a = el.attr("type"); a && !a->value.empty()) {
      f.category = a->value;
    } else {
      tolerated(el.line, el.col, "missing-type",
                "<feat> without a type; \"unknown\" assumed");
      f.category = "unknown";
    }
    f.value = collapse_ws(el.text);
    for (const auto& child : el.children) {
      if (child.name == "feat")
        f.children.push_back(build_feature(child));
      else
        tolerated(child.line, child.col, "unknown-element",
                  "<" + child.name + "> not allowed inside <feat>");
    }
    return f;
  }

  std::optional<Seg> build_seg(const RawNode& el) {
    check_attrs(el, {"target", "targets", "startsAt", "endsAt",
                     "startPosition", "endPosition", "unit"});
    if (!collapse_ws(el.text).empty())
      tolerated(el.line, el.col, "stray-text", "text inside <seg> ignored");

    std::vector<Pointer> pointers;
    bool both_forms = el.attr("target") && el.attr("targets");
    if (both_forms)
      tolerated(el.line, el.col, "seg-targets",
                "<seg> carries both target and targets");
    if (const Attr* a = el.attr("target")) {
      Pointer p = parse_pointer(a->value);
      if (p.fragment.empty())
        problem(a->line, a->col, "bad-pointer", "pointer without a fragment");
      else
        pointers.push_back(std::move(p));
    }
    if (const Attr* a = el.attr("targets")) {
      for (const auto& tok : split_ws(a->value)) {
        Pointer p = parse_pointer(tok);
        if (p.fragment.empty())
          problem(a->line, a->col, "bad-pointer", "pointer without a fragment");
        else
          pointers.push_back(std::move(p));
      }
    }

    const Attr* s1 = el.attr("startsAt");
    const Attr* s2 = el.attr("startPosition");
    const Attr* e1 = el.attr("endsAt");
    const Attr* e2 = el.attr("endPosition");
    bool has_span = s1 || s2 || e1 || e2;
    if ((s1 && e2) || (s2 && e1))
      report(Severity::Warning, el.line, el.col, "mixed-span-attributes",
             "span mixes startsAt/endsAt with startPosition/endPosition");

    if (!pointers.empty() && has_span) {
      problem(el.line, el.col, "conflicting-anchor",
              "<seg> carries both targets and a span; span ignored");
      has_span = false;
    }
    if (!pointers.empty()) {
      Seg seg;
      seg.targets = std::move(pointers);
      return seg;
    }
    if (has_span) {
      const Attr* start = s1 ? s1 : s2;
      const Attr* end = e1 ? e1 : e2;
      if (!start || !end) {
        problem(el.line, el.col, "bad-span",
                "span needs both a start and an end position");
        return std::nullopt;
      }
      std::int64_t from = 0, to = 0;
      if (!parse_int(start->value, from) || !parse_int(end->value, to)) {
        problem(el.line, el.col, "bad-span", "span positions must be integers");
        return std::nullopt;
      }
      if (from > to) {
        problem(el.line, el.col, "bad-span", "span start is after its end");
        return std::nullopt;
      }
      SpanUnit unit = SpanUnit::CharOffset;
      if (const Attr* u = el.attr("unit")) {
        if (u->value == "time")
          unit = SpanUnit::TimeUnit;
        else if (u->value != "char")
          report(Severity::Warning, u->line, u->col, "bad-unit",
                 "unknown unit \"" + u->value + "\"; character offsets assumed");
      }
      Seg seg;
      seg.span = Span{from, to, unit};
      return seg;
    }
    problem(el.line, el.col, "empty-seg", "<seg> without targets or span");
    return std::nullopt;
  }

  static bool parse_int(const std::string& text, std::int64_t& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last;
  }

  Relation build_rel(const RawNode& el) {
    check_attrs(el, {"type", "source", "targets", "target", "directed"});
    Relation rel;
    if (const Attr* a = el.attr("type"); a && !a->value.empty()) {
      rel.rel_type = a->value;
    } else {
      tolerated(el.line, el.col, "missing-type",
                "<rel> without a type; \"unknown\" assumed");
      rel.rel_type = "unknown";
    }
    if (const Attr* a = el.attr("source")) {
      Pointer p = parse_pointer(a->value);
      if (p.fragment.empty())
        problem(a->line, a->col, "bad-pointer", "pointer without a fragment");
      else
        rel.source = std::move(p);
    }
    for (const char* attr_name : {"targets", "target"}) {
      if (const Attr* a = el.attr(attr_name)) {
        for (const auto& tok : split_ws(a->value)) {
          Pointer p = parse_pointer(tok);
          if (p.fragment.empty())
            problem(a->line, a->col, "bad-pointer", "pointer without a fragment");
          else
            rel.targets.push_back(std::move(p));
        }
      }
    }
    if (const Attr* a = el.attr("directed")) {
      if (a->value == "false")
        rel.directed = false;
      else if (a->value != "true")
        report(Severity::Warning, a->line, a->col, "bad-flag",
               "directed must be \"true\" or \"false\"");
    }
    return rel;
  }

  std::unique_ptr<StructNode> build_free_struct(const RawNode& el) {
    auto node = std::make_unique<StructNode>();
    node->node_type = struct_type(el);
    check_attrs(el, {"type", "id"});
    if (const Attr* a = el.attr("id")) node->id = a->value;
    if (!collapse_ws(el.text).empty())
      tolerated(el.line, el.col, "stray-text", "text inside <struct> ignored");
    for (const auto& child : el.children) {
      if (child.name == "struct") {
        auto sub = build_free_struct(child);
        sub->parent = node.get();
        node->children.push_back(std::move(sub));
      } else if (child.name == "feat") {
        node->features.push_back(build_feature(child));
      } else if (child.name == "seg") {
        if (node->seg) {
          problem(child.line, child.col, "duplicate-seg",
                  "node already has a seg; extra one ignored");
        } else {
          node->seg = build_seg(child);
        }
      } else if (child.name == "alt") {
        if (auto group = build_alt(child, node.get()))
          node->alternatives.push_back(std::move(*group));
      } else if (child.name == "rel") {
        Relation rel = build_rel(child);
        if (rel.targets.empty())
          problem(child.line, child.col, "missing-targets",
                  "<rel> without targets dropped");
        else
          node->relations.push_back(std::move(rel));
      } else {
        tolerated(child.line, child.col, "unknown-element",
                  "element <" + child.name + "> is not part of the format");
      }
    }
    return node;
  }

  std::optional<AltGroup> build_alt(const RawNode& el, StructNode* owner) {
    check_attrs(el, {});
    AltGroup group;
    for (const auto& child : el.children) {
      if (child.name == "feat") {
        group.features.push_back(build_feature(child));
      } else if (child.name == "struct") {
        auto sub = build_free_struct(child);
        sub->parent = owner;
        group.children.push_back(std::move(sub));
      } else {
        tolerated(child.line, child.col, "unknown-element",
                  "<" + child.name + "> not allowed inside <alt>");
      }
    }
    // A confidence feature weights the whole group; lift it.
    for (auto it = group.features.begin(); it != group.features.end(); ++it) {
      if (it->category != "confidence" || !it->children.empty()) continue;
      double value = 0.0;
      const char* first = it->value.data();
      const char* last = first + it->value.size();
      auto [p, ec] = std::from_chars(first, last, value);
      if (ec == std::errc() && p == last && value >= 0.0 && value <= 1.0) {
        group.confidence = value;
        group.features.erase(it);
      }
      break;
    }
    if (group.empty()) {
      problem(el.line, el.col, "empty-alt", "<alt> without content dropped");
      return std::nullopt;
    }
    return group;
  }

  // Adopts a free-built subtree, clearing ids that clash with ones
  // already indexed so the rest of the document still loads.
  void strip_duplicate_ids(AnnotationDocument& doc, StructNode& node,
                           std::set<std::string>& seen) {
    if (!node.id.empty()) {
      if (doc.find(node.id) || seen.count(node.id)) {
        problem(0, 0, "duplicate-id",
                "node id \"" + node.id + "\" already used; dropped");
        node.id.clear();
      } else {
        seen.insert(node.id);
      }
    }
    for (auto& g : node.alternatives)
      for (auto& child : g.children) strip_duplicate_ids(doc, *child, seen);
    for (auto& child : node.children) strip_duplicate_ids(doc, *child, seen);
  }

  void fill_node(AnnotationDocument& doc, StructNode& node, const RawNode& el) {
    auto built = build_free_struct(el);
    node.features = std::move(built->features);
    node.relations = std::move(built->relations);
    node.seg = std::move(built->seg);
    std::set<std::string> seen;
    if (!doc.root().id.empty()) seen.insert(doc.root().id);
    for (auto& child : built->children) strip_duplicate_ids(doc, *child, seen);
    for (auto& g : built->alternatives)
      for (auto& child : g.children) strip_duplicate_ids(doc, *child, seen);
    for (auto& child : built->children)
      doc.adopt_child(node, std::move(child));
    if (!built->alternatives.empty())
      doc.add_alternatives(node, std::move(built->alternatives));
  }
};

}  // namespace

ParseResult parse_gmt(std::string_view text, const GmtDialect& dialect,
                      std::string_view source_name) {
  Diagnostics diags;
  Reader reader(text, dialect.strict, source_name, diags);
  std::vector<RawNode> tops = reader.read_all();
  Builder builder(dialect, std::string(source_name), diags);
  AnnotationDocument doc = builder.build(std::move(tops), source_name);
  return ParseResult{std::move(doc), std::move(diags)};
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attr(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void refuse(const std::string& why) {
  throw Error(ErrorCode::SerializationRefused, why);
}

void check_feature_writable(const Feature& f) {
  if (f.category.empty()) refuse("feature without a category");
  if (f.value.empty() && f.children.empty())
    refuse("feature \"" + f.category + "\" has neither value nor sub-features");
  for (const auto& child : f.children) check_feature_writable(child);
}

void check_node_writable(const StructNode& node, std::set<std::string>& ids) {
  if (node.node_type.empty()) refuse("node without a type");
  if (!node.id.empty() && !ids.insert(node.id).second)
    refuse("duplicate node id \"" + node.id + "\"");
  for (const auto& f : node.features) check_feature_writable(f);
  for (const auto& g : node.alternatives) {
    if (g.empty()) refuse("empty alternative group");
    if (g.confidence && (*g.confidence < 0.0 || *g.confidence > 1.0))
      refuse("alternative confidence outside [0,1]");
    for (const auto& f : g.features) check_feature_writable(f);
    for (const auto& child : g.children) check_node_writable(*child, ids);
  }
  for (const auto& rel : node.relations) {
    if (rel.targets.empty()) refuse("relation without targets");
  }
  if (node.seg) {
    bool has_targets = !node.seg->targets.empty();
    bool has_span = node.seg->span.has_value();
    if (has_targets == has_span)
      refuse("seg must carry either targets or a span");
    if (has_span && node.seg->span->starts_at > node.seg->span->ends_at)
      refuse("seg span start is after its end");
  }
  for (const auto& child : node.children) check_node_writable(*child, ids);
}

class Writer {
 public:
  explicit Writer(const GmtDialect& dialect) : dialect_(dialect) {}

  std::string write(const AnnotationDocument& doc) {
    std::set<std::string> ids;
    check_node_writable(doc.root(), ids);
    write_node(doc.root(), 0, &doc);
    return std::move(out_);
  }

 private:
  const GmtDialect& dialect_;
  std::string out_;

  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 2, ' '); }

  std::string pointer_text(const Pointer& p) const {
    if (!p.doc_ref.empty()) return p.doc_ref + "#" + p.fragment;
    if (dialect_.pointers == GmtDialect::PointerStyle::HashPrefixed)
      return "#" + p.fragment;
    return p.fragment;
  }

  void write_seg(const Seg& seg, int depth) {
    indent(depth);
    out_ += "<seg";
    if (seg.is_span()) {
      const Span& span = *seg.span;
      bool modern =
          dialect_.span_attrs == GmtDialect::SpanAttrs::StartsAtEndsAt;
      out_ += ' ';
      out_ += modern ? "startsAt" : "startPosition";
      out_ += "=\"" + format_int(span.starts_at) + "\" ";
      out_ += modern ? "endsAt" : "endPosition";
      out_ += "=\"" + format_int(span.ends_at) + "\"";
      if (span.unit == SpanUnit::TimeUnit) out_ += " unit=\"time\"";
    } else if (seg.targets.size() == 1) {
      out_ += " target=\"" + escape_attr(pointer_text(seg.targets[0])) + "\"";
    } else {
      std::string joined;
      for (const auto& p : seg.targets) {
        if (!joined.empty()) joined += ' ';
        joined += pointer_text(p);
      }
      out_ += " targets=\"" + escape_attr(joined) + "\"";
    }
    out_ += "/>\n";
  }

  void write_feature(const Feature& f, int depth) {
    indent(depth);
    out_ += "<feat type=\"" + escape_attr(f.category) + "\">";
    if (f.children.empty()) {
      out_ += escape_text(f.value);
      out_ += "</feat>\n";
      return;
    }
    if (!f.value.empty()) out_ += escape_text(f.value);
    out_ += '\n';
    for (const auto& child : f.children) write_feature(child, depth + 1);
    indent(depth);
    out_ += "</feat>\n";
  }

  void write_relation(const Relation& rel, int depth) {
    indent(depth);
    out_ += "<rel type=\"" + escape_attr(rel.rel_type) + "\"";
    if (rel.source)
      out_ += " source=\"" + escape_attr(pointer_text(*rel.source)) + "\"";
    std::string joined;
    for (const auto& p : rel.targets) {
      if (!joined.empty()) joined += ' ';
      joined += pointer_text(p);
    }
    out_ += " targets=\"" + escape_attr(joined) + "\"";
    if (!rel.directed) out_ += " directed=\"false\"";
    out_ += "/>\n";
  }

  void write_alt(const AltGroup& group, int depth) {
    indent(depth);
    out_ += "<alt>\n";
    for (const auto& f : group.features) write_feature(f, depth + 1);
    for (const auto& child : group.children) write_node(*child, depth + 1);
    if (group.confidence) {
      indent(depth + 1);
      out_ += "<feat type=\"confidence\">" + format_number(*group.confidence) +
              "</feat>\n";
    }
    indent(depth);
    out_ += "</alt>\n";
  }

  void write_node(const StructNode& node, int depth,
                  const AnnotationDocument* doc = nullptr) {
    indent(depth);
    out_ += "<struct type=\"" + escape_attr(node.node_type) + "\"";
    if (!node.id.empty()) out_ += " id=\"" + escape_attr(node.id) + "\"";
    if (doc) {
      if (!doc->doc_id.empty())
        out_ += " doc=\"" + escape_attr(doc->doc_id) + "\"";
      if (!doc->level.empty() && doc->level != node.node_type)
        out_ += " level=\"" + escape_attr(doc->level) + "\"";
      if (!doc->primary_refs.empty()) {
        std::string joined;
        for (const auto& ref : doc->primary_refs) {
          if (!joined.empty()) joined += ' ';
          joined += ref;
        }
        out_ += " base=\"" + escape_attr(joined) + "\"";
      }
    }
    bool empty = node.features.empty() && !node.seg &&
                 node.alternatives.empty() && node.relations.empty() &&
                 node.children.empty();
    if (empty) {
      out_ += "/>\n";
      return;
    }
    out_ += ">\n";
    for (const auto& f : node.features) write_feature(f, depth + 1);
    if (node.seg) write_seg(*node.seg, depth + 1);
    for (const auto& g : node.alternatives) write_alt(g, depth + 1);
    for (const auto& rel : node.relations) write_relation(rel, depth + 1);
    for (const auto& child : node.children) write_node(*child, depth + 1);
    indent(depth);
    out_ += "</struct>\n";
  }
};

}  // namespace

std::string serialize_gmt(const AnnotationDocument& doc,
                          const GmtDialect& dialect) {
  Writer writer(dialect);
  return writer.write(doc);
}

// ---------------------------------------------------------------------------
// canonical form
// ---------------------------------------------------------------------------

namespace {

void canon_features(std::vector<Feature>& features) {
  for (auto& f : features) {
    f.value = collapse_ws(f.value);
    canon_features(f.children);
  }
  std::stable_sort(features.begin(), features.end(),
                   [](const Feature& a, const Feature& b) {
                     if (a.category != b.category) return a.category < b.category;
                     return a.value < b.value;
                   });
}

void canon_node(StructNode& node) {
  canon_features(node.features);
  for (auto& g : node.alternatives) {
    canon_features(g.features);
    for (auto& child : g.children) canon_node(*child);
  }
  for (auto& child : node.children) canon_node(*child);
}

}  // namespace

AnnotationDocument canonicalize(const AnnotationDocument& doc) {
  AnnotationDocument copy = doc.clone();
  canon_node(copy.root());
  return copy;
}

std::string canonical_form(const AnnotationDocument& doc) {
  return serialize_gmt(canonicalize(doc), GmtDialect::canonical());
}

bool canonically_equal(const AnnotationDocument& a,
                       const AnnotationDocument& b) {
  return equal(canonicalize(a).root(), canonicalize(b).root());
}

}  // namespace gmtannot
