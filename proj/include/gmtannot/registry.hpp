#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gmtannot/model.hpp"

namespace gmtannot {

enum class ValueSpaceKind { OpenText, Closed, Numeric, Pointer };

struct ValueSpace {
  ValueSpaceKind kind = ValueSpaceKind::OpenText;
  std::vector<std::string> closed;  // admissible values, Closed only
  double min = 0.0;                 // Numeric only
  double max = 0.0;

  static ValueSpace open_text() { return {}; }
  static ValueSpace closed_set(std::vector<std::string> values);
  static ValueSpace numeric(double min, double max);
  static ValueSpace pointer();
};

/// Formal definition of one data category: its reference name, value
/// space, where it may appear and whether it may repeat on one node.
struct DataCategory {
  std::string name;
  std::string gloss;
  ValueSpace values;
  std::vector<std::string> applicable_levels;  // empty = any node type
  bool repeatable = true;
  std::string parent;  // stored, not enforced
};

/// Catalogue of data categories plus mappings from scheme-specific names
/// onto reference names. Value type: copy freely, treat loaded registries
/// as immutable when shared.
class Registry {
 public:
  /// The built-in reference categories for morpho-syntactic annotation.
  static Registry seed();

  /// Adds or replaces a category; replacement is reported through the
  /// returned diagnostics. Throws invalid-category on a bad definition.
  Diagnostics define(DataCategory category);

  /// Registers scheme/local -> reference. The reference name must already
  /// be defined; throws invalid-category otherwise.
  void add_mapping(const std::string& scheme, const std::string& local_name,
                   const std::string& reference);

  const DataCategory* lookup(std::string_view name) const;
  const std::string* mapped(const std::string& scheme,
                            const std::string& local_name) const;
  bool has_mappings_for(const std::string& scheme) const;
  std::size_t size() const { return categories_.size(); }

  /// Checks every feature of the document against the catalogue. Unknown
  /// categories are warnings (the registry does not impose a closed set);
  /// value-space and repetition violations are errors.
  Diagnostics validate(const AnnotationDocument& doc,
                       const std::string& source_name = "") const;

  /// Rewrites scheme-specific feature names onto reference names; names
  /// without a mapping are left alone and reported.
  AnnotationDocument map_names(const AnnotationDocument& doc,
                               const std::string& scheme,
                               Diagnostics* report = nullptr) const;

  /// Line format: name | value_space | levels | repeatable | parent | gloss
  /// with value_space one of open, pointer, closed:v1;v2;..., or
  /// numeric:min..max. '#' starts a comment.
  static Registry parse_file(std::string_view text, Diagnostics& diags,
                             const std::string& source_name = "");
  /// Companion mapping lines: scheme | local | reference.
  void parse_mappings(std::string_view text, Diagnostics& diags,
                      const std::string& source_name = "");

 private:
  std::map<std::string, DataCategory> categories_;
  std::map<std::pair<std::string, std::string>, std::string> mappings_;
};

}  // namespace gmtannot
