// Command-line surface over the annotation toolkit: validation, format
// conversion, layer merge/diff and anchor resolution.
//
// Exit codes: 0 success, 1 data error, 2 usage or I/O error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gmtannot/anchoring.hpp"
#include "gmtannot/gmt_xml.hpp"
#include "gmtannot/layer_ops.hpp"
#include "gmtannot/layers.hpp"
#include "gmtannot/registry.hpp"
#include "gmtannot/tabular.hpp"

namespace fs = std::filesystem;
using namespace gmtannot;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    if (!out.good()) return false;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  return !ec;
}

void print_diags(const Diagnostics& diags) {
  for (const auto& d : diags) std::cerr << d.to_string() << '\n';
}

// Basename up to the first dot, matching how parsed annotation documents
// derive their ids; this keeps "base" references alive across a
// write-then-reload cycle.
std::string doc_id_from_path(const std::string& path) {
  std::string base = fs::path(path).filename().string();
  auto dot = base.find('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

// Sidecar mark table: id<TAB>start<TAB>end per line.
bool load_marks(const std::string& path, PrimaryDoc& doc, std::string* error) {
  std::optional<std::string> text = read_file(path);
  if (!text) return true;  // no sidecar, nothing to do
  std::istringstream in(*text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id;
    std::int64_t from = 0, to = 0;
    if (!(std::getline(fields, id, '\t') && fields >> from >> to)) {
      *error = path + ":" + std::to_string(line_no) + ": malformed mark line";
      return false;
    }
    try {
      doc.add_mark(id, from, to);
    } catch (const Error& e) {
      *error = path + ":" + std::to_string(line_no) + ": " + e.what();
      return false;
    }
  }
  return true;
}

struct LoadedLayers {
  LayerSet layers;
  std::vector<std::string> annotation_ids;  // in argument order
  Diagnostics diags;
};

int load_layers(const std::vector<std::string>& gmt_paths,
                const std::vector<std::string>& primary_paths, bool strict,
                LoadedLayers& out) {
  for (const auto& path : primary_paths) {
    std::optional<std::string> text = read_file(path);
    if (!text) {
      std::cerr << "cannot read " << path << '\n';
      return kUsageError;
    }
    PrimaryDoc doc = PrimaryDoc::text(doc_id_from_path(path), *text);
    std::string error;
    if (!load_marks(path + ".marks", doc, &error)) {
      std::cerr << error << '\n';
      return kDataError;
    }
    out.layers.add_primary(std::move(doc));
  }
  GmtDialect dialect;
  dialect.strict = strict;
  for (const auto& path : gmt_paths) {
    std::optional<std::string> text = read_file(path);
    if (!text) {
      std::cerr << "cannot read " << path << '\n';
      return kUsageError;
    }
    try {
      ParseResult parsed = parse_gmt(*text, dialect, path);
      out.diags.insert(out.diags.end(), parsed.diagnostics.begin(),
                       parsed.diagnostics.end());
      // the same document may legitimately appear twice (self-diff)
      std::string id = parsed.doc.doc_id;
      for (int n = 2; id.empty() || out.layers.has_doc(id); ++n)
        id = parsed.doc.doc_id + "-" + std::to_string(n);
      parsed.doc.doc_id = id;
      out.annotation_ids.push_back(id);
      out.layers.add_annotation(std::move(parsed.doc));
    } catch (const Error& e) {
      std::cerr << "error:" << path << ":" << e.line() << ":" << e.col()
                << ":" << error_code_name(e.code()) << ":" << e.message() << '\n';
      return kDataError;
    }
  }
  return kOk;
}

int load_registry(const std::string& path, Registry& reg, Diagnostics& diags) {
  if (path.empty()) {
    reg = Registry::seed();
    return kOk;
  }
  std::optional<std::string> text = read_file(path);
  if (!text) {
    std::cerr << "cannot read " << path << '\n';
    return kUsageError;
  }
  reg = Registry::parse_file(*text, diags, path);
  std::optional<std::string> mappings = read_file(path + ".map");
  if (mappings) reg.parse_mappings(*mappings, diags, path + ".map");
  return kOk;
}

int emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return kOk;
  }
  if (!write_file_atomic(out_path, content)) {
    std::cerr << "cannot write " << out_path << '\n';
    return kUsageError;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::vector<std::string>& paths,
                 const std::vector<std::string>& primaries,
                 const std::string& registry_path, bool strict) {
  Diagnostics reg_diags;
  Registry reg;
  if (int rc = load_registry(registry_path, reg, reg_diags)) return rc;

  LoadedLayers loaded;
  if (int rc = load_layers(paths, primaries, strict, loaded)) return rc;

  Diagnostics all = reg_diags;
  all.insert(all.end(), loaded.diags.begin(), loaded.diags.end());
  for (const auto& [id, doc] : loaded.layers.annotations()) {
    Diagnostics structural = check_document(doc, id);
    all.insert(all.end(), structural.begin(), structural.end());
    Diagnostics categories = reg.validate(doc, id);
    all.insert(all.end(), categories.begin(), categories.end());
  }
  Diagnostics anchors = validate_anchors(loaded.layers);
  all.insert(all.end(), anchors.begin(), anchors.end());

  print_diags(all);
  return has_errors(all) ? kDataError : kOk;
}

int cmd_convert(const std::string& input, const std::string& from,
                const std::string& to, const std::string& out_path,
                const std::vector<std::string>& primaries, bool strict,
                const std::string& compound, bool pick_best) {
  std::optional<std::string> text = read_file(input);
  if (!text) {
    std::cerr << "cannot read " << input << '\n';
    return kUsageError;
  }
  GmtDialect dialect;
  dialect.strict = strict;

  try {
    if (from == "tabular" && to == "gmt") {
      std::vector<Sentence> sentences = parse_tabular(*text);
      std::optional<std::string> primary_text;
      if (!primaries.empty()) {
        primary_text = read_file(primaries.front());
        if (!primary_text) {
          std::cerr << "cannot read " << primaries.front() << '\n';
          return kUsageError;
        }
      }
      ImportOptions import_options;
      if (!out_path.empty())
        import_options.primary_id = doc_id_from_path(out_path + ".txt");
      LayerSet layers = import_tabular(sentences, primary_text, import_options);
      std::size_t docs = layers.annotations().size();
      std::size_t index = 0;
      for (const auto& [id, doc] : layers.annotations()) {
        ++index;
        std::string bytes = serialize_gmt(doc, dialect);
        std::string path = out_path;
        if (!path.empty() && docs > 1 && index > 1)
          path += "." + std::to_string(index);
        if (int rc = emit(path, bytes)) return rc;
      }
      if (!out_path.empty()) {
        // primary text next to the annotation, marks in its sidecar
        const PrimaryDoc& primary = layers.primaries().begin()->second;
        if (int rc = emit(out_path + ".txt", primary.content)) return rc;
        std::string marks;
        for (const auto& [id, mark] : primary.marks)
          marks += id + "\t" + std::to_string(mark.starts_at) + "\t" +
                   std::to_string(mark.ends_at) + "\n";
        if (int rc = emit(out_path + ".txt.marks", marks)) return rc;
      }
      return kOk;
    }
    if (from == "tabular" && to == "tabular") {
      return emit(out_path, format_tabular(parse_tabular(*text)));
    }
    if (from == "gmt") {
      LoadedLayers loaded;
      if (int rc = load_layers({input}, primaries, strict, loaded)) return rc;
      const AnnotationDocument& doc =
          *loaded.layers.annotation(loaded.annotation_ids.front());
      if (to == "gmt") return emit(out_path, canonical_form(doc));
      if (to == "tabular") {
        if (compound != "leaves" && compound != "parent") {
          std::cerr << "unknown compound policy \"" << compound << "\"\n";
          return kUsageError;
        }
        ExportOptions options;
        options.compound = compound == "parent" ? CompoundPolicy::Parent
                                                : CompoundPolicy::Leaves;
        if (pick_best)
          options.disambiguation = Disambiguation::HighestConfidence;
        std::vector<TabularRecord> records =
            export_tabular(loaded.layers, doc.doc_id, options);
        return emit(out_path, format_tabular(records));
      }
    }
  } catch (const Error& e) {
    std::cerr << "error:" << input << ":0:0:" << error_code_name(e.code())
              << ":" << e.message() << '\n';
    return kDataError;
  }
  std::cerr << "unsupported conversion " << from << " -> " << to << '\n';
  return kUsageError;
}

int cmd_merge(const std::vector<std::string>& paths,
              const std::vector<std::string>& primaries,
              const std::string& policy_name, const std::string& out_path,
              bool strict) {
  MergePolicy policy;
  if (policy_name == "union") {
    policy = MergePolicy::Union;
  } else if (policy_name == "prefer-a") {
    policy = MergePolicy::PreferA;
  } else if (policy_name == "as-alternatives") {
    policy = MergePolicy::AsAlternatives;
  } else {
    std::cerr << "unknown merge policy \"" << policy_name << "\"\n";
    return kUsageError;
  }
  LoadedLayers loaded;
  if (int rc = load_layers(paths, primaries, strict, loaded)) return rc;
  if (loaded.annotation_ids.size() != 2) {
    std::cerr << "merge needs exactly two annotation documents\n";
    return kUsageError;
  }
  try {
    AnnotationDocument merged =
        merge(*loaded.layers.annotation(loaded.annotation_ids[0]),
              *loaded.layers.annotation(loaded.annotation_ids[1]),
              loaded.layers, policy);
    return emit(out_path, serialize_gmt(merged));
  } catch (const Error& e) {
    std::cerr << "error:::0:0:" << error_code_name(e.code()) << ":" << e.message()
              << '\n';
    return kDataError;
  }
}

int cmd_diff(const std::vector<std::string>& paths,
             const std::vector<std::string>& primaries,
             const std::string& out_path, bool strict) {
  LoadedLayers loaded;
  if (int rc = load_layers(paths, primaries, strict, loaded)) return rc;
  if (loaded.annotation_ids.size() != 2) {
    std::cerr << "diff needs exactly two annotation documents\n";
    return kUsageError;
  }
  try {
    DiffReport report =
        diff(*loaded.layers.annotation(loaded.annotation_ids[0]),
             *loaded.layers.annotation(loaded.annotation_ids[1]),
             loaded.layers);
    return emit(out_path, report.to_string());
  } catch (const Error& e) {
    std::cerr << "error:::0:0:" << error_code_name(e.code()) << ":" << e.message()
              << '\n';
    return kDataError;
  }
}

int cmd_resolve(const std::vector<std::string>& paths,
                const std::vector<std::string>& primaries,
                const std::string& node_id, bool strict) {
  LoadedLayers loaded;
  if (int rc = load_layers(paths, primaries, strict, loaded)) return rc;
  const AnnotationDocument* owner = nullptr;
  const StructNode* node = nullptr;
  for (const auto& [id, doc] : loaded.layers.annotations()) {
    if (const StructNode* found = doc.find(node_id)) {
      owner = &doc;
      node = found;
      break;
    }
  }
  if (!node) {
    std::cerr << "error:::0:0:not-found:no node named \"" << node_id << "\"\n";
    return kDataError;
  }
  try {
    std::vector<Extent> extents =
        project_to_primary(*node, owner->doc_id, loaded.layers);
    for (const auto& e : extents)
      std::cout << "extent\t" << e.doc_id << '\t' << e.starts_at << '\t'
                << e.ends_at << '\n';
    CoveredText covered = covered_text(*node, owner->doc_id, loaded.layers);
    std::cout << "text\t" << covered.text << '\n';
    if (covered.lemma_fallback) std::cout << "note\tlemma-fallback\n";
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error:::0:0:" << error_code_name(e.code()) << ":" << e.message()
              << '\n';
    return kDataError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stand-off linguistic annotation toolkit"};
  app.require_subcommand(1);

  std::vector<std::string> paths;
  std::vector<std::string> primaries;
  std::string registry_path, out_path, node_id;
  std::string from = "gmt", to = "gmt";
  std::string policy = "union";
  std::string compound = "leaves";
  bool strict = false;
  bool pick_best = false;

  auto add_common = [&](CLI::App* cmd, bool with_paths = true) {
    if (with_paths)
      cmd->add_option("paths", paths, "input files")->required();
    cmd->add_option("--primary", primaries, "primary text file(s)");
    cmd->add_flag("--strict", strict, "strict parsing");
  };

  CLI::App* validate = app.add_subcommand("validate", "check annotation files");
  add_common(validate);
  validate->add_option("--registry", registry_path, "registry file");

  CLI::App* convert = app.add_subcommand("convert", "transduce between formats");
  add_common(convert);
  convert->add_option("--from", from, "input format (gmt|tabular)");
  convert->add_option("--to", to, "output format (gmt|tabular)");
  convert->add_option("--out", out_path, "output path");
  convert->add_option("--compound", compound,
                      "compound flattening (leaves|parent)");
  convert->add_flag("--pick-best", pick_best,
                    "resolve alternatives by highest confidence");

  CLI::App* merge_cmd = app.add_subcommand("merge", "merge two layers");
  add_common(merge_cmd);
  merge_cmd->add_option("--policy", policy,
                        "union|prefer-a|as-alternatives");
  merge_cmd->add_option("--out", out_path, "output path");

  CLI::App* diff_cmd = app.add_subcommand("diff", "compare two layers");
  add_common(diff_cmd);
  diff_cmd->add_option("--out", out_path, "output path");

  CLI::App* resolve_cmd =
      app.add_subcommand("resolve", "project a node onto primary data");
  add_common(resolve_cmd);
  resolve_cmd->add_option("--node", node_id, "node identifier")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (validate->parsed())
    return cmd_validate(paths, primaries, registry_path, strict);
  if (convert->parsed())
    return cmd_convert(paths.front(), from, to, out_path, primaries, strict,
                       compound, pick_best);
  if (merge_cmd->parsed())
    return cmd_merge(paths, primaries, policy, out_path, strict);
  if (diff_cmd->parsed()) return cmd_diff(paths, primaries, out_path, strict);
  if (resolve_cmd->parsed())
    return cmd_resolve(paths, primaries, node_id, strict);
  return kUsageError;
}
