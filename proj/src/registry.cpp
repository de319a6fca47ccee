#include "gmtannot/registry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace gmtannot {

ValueSpace ValueSpace::closed_set(std::vector<std::string> values) {
  ValueSpace vs;
  vs.kind = ValueSpaceKind::Closed;
  vs.closed = std::move(values);
  return vs;
}

ValueSpace ValueSpace::numeric(double min, double max) {
  ValueSpace vs;
  vs.kind = ValueSpaceKind::Numeric;
  vs.min = min;
  vs.max = max;
  return vs;
}

ValueSpace ValueSpace::pointer() {
  ValueSpace vs;
  vs.kind = ValueSpaceKind::Pointer;
  return vs;
}

namespace {

void check_category(const DataCategory& cat) {
  if (cat.name.empty())
    throw Error(ErrorCode::InvalidCategory, "category without a name");
  if (cat.values.kind == ValueSpaceKind::Closed) {
    if (cat.values.closed.empty())
      throw Error(ErrorCode::InvalidCategory,
                  "closed value list of \"" + cat.name + "\" is empty");
    std::set<std::string> seen;
    for (const auto& v : cat.values.closed)
      if (!seen.insert(v).second)
        throw Error(ErrorCode::InvalidCategory,
                    "closed value list of \"" + cat.name +
                        "\" repeats \"" + v + "\"");
  }
  if (cat.values.kind == ValueSpaceKind::Numeric &&
      cat.values.min > cat.values.max)
    throw Error(ErrorCode::InvalidCategory,
                "numeric range of \"" + cat.name + "\" has min > max");
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back(std::string(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

Registry Registry::seed() {
  Registry reg;
  auto open = [&](const std::string& name, const std::string& gloss) {
    DataCategory cat;
    cat.name = name;
    cat.gloss = gloss;
    reg.define(std::move(cat));
  };
  open("lemma", "reference word form for the token or token sequence");
  open("pos", "morpho-syntactic category");
  open("gender", "grammatical gender");
  open("number", "grammatical number");
  open("tense", "grammatical tense");
  open("person", "grammatical person");
  open("phone", "phonetic transcription unit");
  open("synCat", "syntactic category");
  DataCategory conf;
  conf.name = "confidence";
  conf.gloss = "annotator confidence for an ambiguous reading";
  conf.values = ValueSpace::numeric(0.0, 1.0);
  conf.repeatable = false;
  reg.define(std::move(conf));
  return reg;
}

Diagnostics Registry::define(DataCategory category) {
  check_category(category);
  Diagnostics diags;
  if (categories_.count(category.name))
    diags.push_back({Severity::Warning, "", 0, 0, "redefinition",
                     "category \"" + category.name + "\" redefined"});
  categories_[category.name] = std::move(category);
  return diags;
}

void Registry::add_mapping(const std::string& scheme,
                           const std::string& local_name,
                           const std::string& reference) {
  if (!categories_.count(reference))
    throw Error(ErrorCode::InvalidCategory,
                "mapping target \"" + reference + "\" is not defined");
  mappings_[{scheme, local_name}] = reference;
}

const DataCategory* Registry::lookup(std::string_view name) const {
  auto it = categories_.find(std::string(name));
  return it == categories_.end() ? nullptr : &it->second;
}

const std::string* Registry::mapped(const std::string& scheme,
                                    const std::string& local_name) const {
  auto it = mappings_.find({scheme, local_name});
  return it == mappings_.end() ? nullptr : &it->second;
}

bool Registry::has_mappings_for(const std::string& scheme) const {
  for (const auto& [key, ref] : mappings_)
    if (key.first == scheme) return true;
  return false;
}

namespace {

struct Validator {
  const Registry& reg;
  const std::string& source;
  Diagnostics& diags;
  std::set<std::string> unknown_reported;

  void check_value(const DataCategory& cat, const Feature& f,
                   const std::string& where) {
    switch (cat.values.kind) {
      case ValueSpaceKind::OpenText:
      case ValueSpaceKind::Pointer:
        return;
      case ValueSpaceKind::Closed:
        if (std::find(cat.values.closed.begin(), cat.values.closed.end(),
                      f.value) == cat.values.closed.end())
          diags.push_back({Severity::Error, source, 0, 0, "closed-value",
                           "value \"" + f.value + "\" of \"" + cat.name +
                               "\" is not admissible" + where});
        return;
      case ValueSpaceKind::Numeric: {
        double v = 0.0;
        if (!parse_double(f.value, v)) {
          diags.push_back({Severity::Error, source, 0, 0, "numeric-value",
                           "value \"" + f.value + "\" of \"" + cat.name +
                               "\" is not a number" + where});
        } else if (v < cat.values.min || v > cat.values.max) {
          diags.push_back({Severity::Error, source, 0, 0, "numeric-range",
                           "value " + f.value + " of \"" + cat.name +
                               "\" outside its range" + where});
        }
        return;
      }
    }
  }

  void check_feature(const Feature& f, const std::string& node_type,
                     const std::string& where) {
    const DataCategory* cat = reg.lookup(f.category);
    if (!cat) {
      if (unknown_reported.insert(f.category).second)
        diags.push_back({Severity::Warning, source, 0, 0, "unknown-category",
                         "category \"" + f.category +
                             "\" is not in the registry"});
    } else {
      if (!f.value.empty()) check_value(*cat, f, where);
      if (!cat->applicable_levels.empty() &&
          std::find(cat->applicable_levels.begin(),
                    cat->applicable_levels.end(),
                    node_type) == cat->applicable_levels.end())
        diags.push_back({Severity::Warning, source, 0, 0, "inapplicable-level",
                         "category \"" + cat->name +
                             "\" is not declared for node type \"" +
                             node_type + "\"" + where});
    }
    for (const auto& child : f.children)
      check_feature(child, node_type, where);
  }

  void check_repeats(const std::vector<Feature>& features,
                     const std::string& where) {
    std::map<std::string, int> counts;
    for (const auto& f : features) ++counts[f.category];
    for (const auto& [name, count] : counts) {
      if (count < 2) continue;
      const DataCategory* cat = reg.lookup(name);
      if (cat && !cat->repeatable)
        diags.push_back({Severity::Error, source, 0, 0, "repeat-category",
                         "category \"" + name +
                             "\" may not repeat but appears " +
                             std::to_string(count) + " times" + where});
    }
  }

  void check_node(const StructNode& node) {
    std::string where =
        node.id.empty() ? std::string() : " on node \"" + node.id + "\"";
    for (const auto& f : node.features)
      check_feature(f, node.node_type, where);
    check_repeats(node.features, where);
    if (node.alternatives.size() == 1)
      diags.push_back({Severity::Warning, source, 0, 0, "single-alternative",
                       "node" + (where.empty() ? "" : where) +
                           " carries a single alternative reading"});
    for (const auto& g : node.alternatives) {
      for (const auto& f : g.features)
        check_feature(f, node.node_type, where);
      check_repeats(g.features, where);
      if (g.confidence) {
        const DataCategory* cat = reg.lookup("confidence");
        if (cat && cat->values.kind == ValueSpaceKind::Numeric &&
            (*g.confidence < cat->values.min ||
             *g.confidence > cat->values.max))
          diags.push_back({Severity::Error, source, 0, 0, "numeric-range",
                           "confidence outside its range" + where});
      }
    }
  }
};

}  // namespace

Diagnostics Registry::validate(const AnnotationDocument& doc,
                               const std::string& source_name) const {
  Diagnostics diags;
  Validator v{*this, source_name, diags, {}};
  doc.visit_all([&](const StructNode& node) { v.check_node(node); });
  return diags;
}

namespace {

void map_features(std::vector<Feature>& features, const Registry& reg,
                  const std::string& scheme, Diagnostics* report,
                  std::set<std::string>* reported) {
  for (auto& f : features) {
    if (const std::string* ref = reg.mapped(scheme, f.category)) {
      f.category = *ref;
    } else if (!reg.lookup(f.category) && report &&
               reported->insert(f.category).second) {
      report->push_back({Severity::Warning, "", 0, 0, "unmapped-name",
                         "no mapping for \"" + f.category + "\" in scheme \"" +
                             scheme + "\""});
    }
    map_features(f.children, reg, scheme, report, reported);
  }
}

void map_node(StructNode& node, const Registry& reg, const std::string& scheme,
              Diagnostics* report, std::set<std::string>* reported) {
  map_features(node.features, reg, scheme, report, reported);
  for (auto& g : node.alternatives) {
    map_features(g.features, reg, scheme, report, reported);
    for (auto& child : g.children)
      map_node(*child, reg, scheme, report, reported);
  }
  for (auto& child : node.children)
    map_node(*child, reg, scheme, report, reported);
}

}  // namespace

AnnotationDocument Registry::map_names(const AnnotationDocument& doc,
                                       const std::string& scheme,
                                       Diagnostics* report) const {
  AnnotationDocument out = doc.clone();
  std::set<std::string> reported;
  map_node(out.root(), *this, scheme, report, &reported);
  return out;
}

Registry Registry::parse_file(std::string_view text, Diagnostics& diags,
                              const std::string& source_name) {
  Registry reg;
  int line_no = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split(line, '|');
    if (fields.size() > 6) {
      diags.push_back({Severity::Error, source_name, line_no, 0, "bad-record",
                       "too many fields"});
      continue;
    }
    fields.resize(6);
    for (auto& f : fields) f = trim(f);

    DataCategory cat;
    cat.name = fields[0];
    std::string vs = fields[1];
    if (vs.empty() || vs == "open") {
      cat.values = ValueSpace::open_text();
    } else if (vs == "pointer") {
      cat.values = ValueSpace::pointer();
    } else if (vs.rfind("closed:", 0) == 0) {
      std::vector<std::string> values;
      for (auto& v : split(vs.substr(7), ';')) {
        std::string t = trim(v);
        if (!t.empty()) values.push_back(std::move(t));
      }
      cat.values = ValueSpace::closed_set(std::move(values));
    } else if (vs.rfind("numeric:", 0) == 0) {
      std::string range = vs.substr(8);
      auto dots = range.find("..");
      double lo = 0.0, hi = 0.0;
      if (dots == std::string::npos ||
          !parse_double(trim(range.substr(0, dots)), lo) ||
          !parse_double(trim(range.substr(dots + 2)), hi)) {
        diags.push_back({Severity::Error, source_name, line_no, 0,
                         "bad-record", "malformed numeric range"});
        continue;
      }
      cat.values = ValueSpace::numeric(lo, hi);
    } else {
      diags.push_back({Severity::Error, source_name, line_no, 0, "bad-record",
                       "unknown value space \"" + vs + "\""});
      continue;
    }
    for (auto& level : split(fields[2], ';')) {
      std::string t = trim(level);
      if (!t.empty()) cat.applicable_levels.push_back(std::move(t));
    }
    std::string rep = fields[3];
    cat.repeatable = !(rep == "no" || rep == "false" || rep == "0");
    cat.parent = fields[4];
    cat.gloss = fields[5];
    try {
      for (auto& d : reg.define(std::move(cat))) {
        d.file = source_name;
        d.line = line_no;
        diags.push_back(std::move(d));
      }
    } catch (const Error& e) {
      diags.push_back({Severity::Error, source_name, line_no, 0, "bad-record",
                       e.what()});
    }
  }
  return reg;
}

void Registry::parse_mappings(std::string_view text, Diagnostics& diags,
                              const std::string& source_name) {
  int line_no = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split(line, '|');
    if (fields.size() != 3) {
      diags.push_back({Severity::Error, source_name, line_no, 0, "bad-record",
                       "mapping needs scheme | local | reference"});
      continue;
    }
    try {
      add_mapping(trim(fields[0]), trim(fields[1]), trim(fields[2]));
    } catch (const Error& e) {
      diags.push_back({Severity::Error, source_name, line_no, 0, "bad-record",
                       e.what()});
    }
  }
}

}  // namespace gmtannot
