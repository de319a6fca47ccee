#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "gmtannot/gmt_xml.hpp"
#include "gmtannot/layer_ops.hpp"
#include "support/fixtures.hpp"

using namespace gmtannot;

namespace {

// Layer set holding the four-word sentence plus one annotation parsed from
// the reference fragment.
LayerSet paul_layers() {
  LayerSet layers;
  layers.add_primary(fixtures::paul_primary());
  ParseResult parsed = parse_gmt(fixtures::kPaulAime, {}, "paul.gmt.xml");
  parsed.doc.primary_refs = {"paul-fr"};
  layers.add_annotation(std::move(parsed.doc));
  return layers;
}

AnnotationDocument empty_layer(const std::string& id) {
  AnnotationDocument doc(id, "MSAnnot", "MSAnnot");
  doc.primary_refs = {"paul-fr"};
  return doc;
}

std::multiset<std::pair<std::string, std::string>> feature_set(
    const StructNode& node) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& f : node.features) out.insert({f.category, f.value});
  return out;
}

}  // namespace

TEST_CASE("merging a document with itself is the identity") {
  for (const char* listing :
       {fixtures::kPaulAime, fixtures::kFusedDu,
        fixtures::kCompoundPommeDeTerre, fixtures::kBouche}) {
    LayerSet layers;
    layers.add_primary(fixtures::paul_primary());
    ParseResult parsed = parse_gmt(listing, {}, "doc.gmt.xml");
    parsed.doc.primary_refs = {"paul-fr"};
    const AnnotationDocument& doc = layers.add_annotation(std::move(parsed.doc));
    for (MergePolicy policy : {MergePolicy::Union, MergePolicy::PreferA,
                               MergePolicy::AsAlternatives}) {
      AnnotationDocument merged = merge(doc, doc, layers, policy);
      CHECK(equal(merged, doc));
    }
  }
}

TEST_CASE("merging with an empty layer is the identity") {
  LayerSet layers = paul_layers();
  const AnnotationDocument& doc = *layers.annotation("paul");
  const AnnotationDocument& empty =
      layers.add_annotation(empty_layer("empty"));
  for (MergePolicy policy : {MergePolicy::Union, MergePolicy::PreferA,
                             MergePolicy::AsAlternatives}) {
    AnnotationDocument merged = merge(doc, empty, layers, policy);
    CHECK(equal(merged.root(), doc.root()));
  }
}

TEST_CASE("merge as-alternatives rebuilds the ambiguous reading") {
  LayerSet layers = fixtures::bouche_layers();
  AnnotationDocument merged =
      merge(*layers.annotation("bouche-a"), *layers.annotation("bouche-b"),
            layers, MergePolicy::AsAlternatives);

  ParseResult listing = parse_gmt(fixtures::kBouche, {}, "bouche.gmt.xml");
  // the reference fragment carries confidences; the merged layers had none
  AnnotationDocument expected = listing.doc.clone();
  for (auto& g : expected.root().alternatives) g.confidence.reset();

  CHECK(merged.root().features.empty());
  REQUIRE(merged.root().alternatives.size() == 2);
  CHECK(equal(merged.root(), expected.root()));
}

TEST_CASE("union merge combines features without duplicates") {
  LayerSet layers = fixtures::bouche_layers();
  AnnotationDocument merged =
      merge(*layers.annotation("bouche-a"), *layers.annotation("bouche-b"),
            layers, MergePolicy::Union);
  auto feats = feature_set(merged.root());
  CHECK(feats.size() == 5);  // three verb features + two noun features
  CHECK(feats.count({"lemma", "boucher"}) == 1);
  CHECK(feats.count({"lemma", "bouche"}) == 1);

  // shared features appear once
  LayerSet again = fixtures::bouche_layers();
  AnnotationDocument& b = *again.annotation("bouche-b");
  b.set_feature(b.root(), "tense", "present");  // now shared with side a
  AnnotationDocument merged2 =
      merge(*again.annotation("bouche-a"), b, again, MergePolicy::Union);
  CHECK(feature_set(merged2.root()).count({"tense", "present"}) == 1);
}

TEST_CASE("union merge is symmetric per matched node") {
  LayerSet layers = fixtures::bouche_layers();
  AnnotationDocument ab =
      merge(*layers.annotation("bouche-a"), *layers.annotation("bouche-b"),
            layers, MergePolicy::Union);
  AnnotationDocument ba =
      merge(*layers.annotation("bouche-b"), *layers.annotation("bouche-a"),
            layers, MergePolicy::Union);
  CHECK(feature_set(ab.root()) == feature_set(ba.root()));
}

TEST_CASE("prefer-a keeps the first annotator's values") {
  LayerSet layers = fixtures::bouche_layers();
  AnnotationDocument merged =
      merge(*layers.annotation("bouche-a"), *layers.annotation("bouche-b"),
            layers, MergePolicy::PreferA);
  auto feats = feature_set(merged.root());
  CHECK(feats.count({"lemma", "boucher"}) == 1);
  CHECK(feats.count({"lemma", "bouche"}) == 0);  // b's value lost per policy
  CHECK(feats.count({"tense", "present"}) == 1);
}

TEST_CASE("unmatched nodes are kept from both sides in primary order") {
  LayerSet layers;
  layers.add_primary(fixtures::paul_primary());
  AnnotationDocument a("a", "MSAnnot", "MSAnnot");
  a.primary_refs = {"paul-fr"};
  StructNode& first = a.add_child(a.root(), "W-level");
  a.set_feature(first, "lemma", "Paul");
  a.set_seg(first, Seg::at({Pointer{"", "w1"}}));
  StructNode& third = a.add_child(a.root(), "W-level");
  a.set_feature(third, "lemma", "le");
  a.set_seg(third, Seg::at({Pointer{"", "w3"}}));
  const AnnotationDocument& doc_a = layers.add_annotation(std::move(a));

  AnnotationDocument b("b", "MSAnnot", "MSAnnot");
  b.primary_refs = {"paul-fr"};
  StructNode& second = b.add_child(b.root(), "W-level");
  b.set_feature(second, "lemma", "aimer");
  b.set_seg(second, Seg::at({Pointer{"", "w2"}}));
  const AnnotationDocument& doc_b = layers.add_annotation(std::move(b));

  AnnotationDocument merged = merge(doc_a, doc_b, layers, MergePolicy::Union);
  REQUIRE(merged.root().children.size() == 3);
  CHECK(merged.root().children[0]->feature_value("lemma") == "Paul");
  CHECK(merged.root().children[1]->feature_value("lemma") == "aimer");
  CHECK(merged.root().children[2]->feature_value("lemma") == "le");
}

TEST_CASE("layers over disjoint primaries refuse to merge") {
  LayerSet layers = paul_layers();
  layers.add_primary(fixtures::queue_primary("queue2"));
  AnnotationDocument other("other", "MSAnnot", "MSAnnot");
  other.primary_refs = {"queue2"};
  StructNode& node = other.add_child(other.root(), "W-level");
  other.set_seg(node, Seg::at({Pointer{"", "w1"}}));
  const AnnotationDocument& added = layers.add_annotation(std::move(other));

  try {
    merge(*layers.annotation("paul"), added, layers, MergePolicy::Union);
    FAIL("expected incompatible-layers");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleLayers);
  }
}

TEST_CASE("aggregation relations survive a merge deduplicated") {
  LayerSet layers = fixtures::bouche_layers();
  LayerSet copy = fixtures::bouche_layers();
  AnnotationDocument& a = *layers.annotation("bouche-a");
  AnnotationDocument& b = *layers.annotation("bouche-b");
  Relation agg;
  agg.rel_type = "aggregation";
  agg.directed = false;
  agg.targets = {Pointer{"", "w1"}};
  a.add_relation(a.root(), agg);
  b.add_relation(b.root(), agg);

  AnnotationDocument merged = merge(a, b, layers, MergePolicy::Union);
  REQUIRE(merged.root().relations.size() == 1);
  CHECK(merged.root().relations[0].rel_type == "aggregation");
  CHECK(!merged.root().relations[0].directed);
}

TEST_CASE("diffing a document with itself is full agreement") {
  LayerSet layers = paul_layers();
  const AnnotationDocument& doc = *layers.annotation("paul");
  DiffReport report = diff(doc, doc, layers);
  CHECK(report.conflicts == 0);
  CHECK(report.only_in_a == 0);
  CHECK(report.only_in_b == 0);
  CHECK(report.matched == 5);  // root and four words
  CHECK(report.agreement == 1.0);
}

TEST_CASE("the two ambiguous readings disagree on every category") {
  LayerSet layers = fixtures::bouche_layers();
  DiffReport report = diff(*layers.annotation("bouche-a"),
                           *layers.annotation("bouche-b"), layers);
  CHECK(report.matched == 1);
  CHECK(report.matched_equal == 0);
  CHECK(report.agreement == 0.0);
  CHECK(report.conflicts == 3);
  std::set<std::string> cats;
  for (const auto& e : report.entries)
    if (e.kind == DiffEntry::Kind::Conflict) cats.insert(e.category);
  CHECK(cats == std::set<std::string>{"lemma", "pos", "tense"});
  for (const auto& e : report.entries) {
    if (e.category == "tense") {
      CHECK(e.value_a == "present");
      CHECK(e.value_b == "");
    }
  }
}

TEST_CASE("swapping the diff sides mirrors the report") {
  LayerSet layers = fixtures::bouche_layers();
  DiffReport ab = diff(*layers.annotation("bouche-a"),
                       *layers.annotation("bouche-b"), layers);
  DiffReport ba = diff(*layers.annotation("bouche-b"),
                       *layers.annotation("bouche-a"), layers);
  CHECK(ab.only_in_a == ba.only_in_b);
  CHECK(ab.only_in_b == ba.only_in_a);
  CHECK(ab.conflicts == ba.conflicts);
  CHECK(ab.matched == ba.matched);
  CHECK(ab.agreement == ba.agreement);
}

TEST_CASE("diff against an empty layer lists every node one-sided") {
  LayerSet layers = paul_layers();
  const AnnotationDocument& doc = *layers.annotation("paul");
  const AnnotationDocument& empty =
      layers.add_annotation(empty_layer("empty"));
  DiffReport report = diff(doc, empty, layers);
  CHECK(report.only_in_a == doc.nodes().size());
  CHECK(report.matched == 0);
  CHECK(report.agreement == 1.0);  // vacuous

  DiffReport mirrored = diff(empty, doc, layers);
  CHECK(mirrored.only_in_b == report.only_in_a);
  CHECK(mirrored.only_in_a == report.only_in_b);
  CHECK(mirrored.conflicts == report.conflicts);
}

TEST_CASE("alternative mismatches are reported but spare the ratio") {
  LayerSet layers = fixtures::bouche_layers();
  AnnotationDocument& a = *layers.annotation("bouche-a");
  AnnotationDocument with_alts = a.clone();
  with_alts.doc_id = "bouche-alts";
  std::vector<AltGroup> groups;
  groups.emplace_back(std::vector<Feature>{{"number", "singular", {}}}, 0.5);
  groups.emplace_back(std::vector<Feature>{{"number", "plural", {}}}, 0.5);
  with_alts.add_alternatives(with_alts.root(), std::move(groups));
  const AnnotationDocument& b = layers.add_annotation(std::move(with_alts));

  DiffReport report = diff(a, b, layers);
  CHECK(report.matched == 1);
  CHECK(report.matched_equal == 1);  // categories agree
  CHECK(report.agreement == 1.0);
  bool alt_conflict = false;
  for (const auto& e : report.entries)
    if (e.category == "(alternatives)") alt_conflict = true;
  CHECK(alt_conflict);
}

TEST_CASE("diff reports serialize line by line") {
  LayerSet layers = fixtures::bouche_layers();
  DiffReport report = diff(*layers.annotation("bouche-a"),
                           *layers.annotation("bouche-b"), layers);
  std::string text = report.to_string();
  CHECK(text.find("diff\tonly-a=0\tonly-b=0\tmatched=1\tequal=0\tconflicts=3"
                  "\tagreement=0\n") == 0);
  CHECK(text.find("conflict\t") != std::string::npos);
  CHECK(text.find("lemma\tboucher\tbouche") != std::string::npos);
}

TEST_CASE("covered text of a word node is its surface form") {
  LayerSet layers = paul_layers();
  const AnnotationDocument* doc = layers.annotation("paul");
  CoveredText covered =
      covered_text(*doc->root().children[0], "paul", layers);
  CHECK(covered.text == "Paul");
  CHECK(!covered.lemma_fallback);

  CoveredText whole = covered_text(doc->root(), "paul", layers);
  CHECK(whole.text == "Paul aime les croissants");
}

TEST_CASE("covered text renders fused components through their lemma") {
  LayerSet layers = fixtures::queue_layers();
  const AnnotationDocument* syntactic = layers.annotation("syn-queue");
  CoveredText covered =
      covered_text(syntactic->root(), "syn-queue", layers);
  CHECK(covered.text == "le chat");
  CHECK(covered.lemma_fallback);

  // the whole-token sibling is real surface text
  const StructNode* chat = layers.annotation("msa-queue")->find("w4");
  CoveredText chat_text = covered_text(*chat, "msa-queue", layers);
  CHECK(chat_text.text == "chat");
  CHECK(!chat_text.lemma_fallback);
}

TEST_CASE("a node with no seg and no children covers nothing") {
  LayerSet layers = paul_layers();
  AnnotationDocument bare("bare", "MSAnnot", "MSAnnot");
  const AnnotationDocument& added = layers.add_annotation(std::move(bare));
  CoveredText covered = covered_text(added.root(), "bare", layers);
  CHECK(covered.text.empty());
}

TEST_CASE("covered text over timed media is refused") {
  LayerSet layers = fixtures::landmark_layers();
  const AnnotationDocument* phones = layers.annotation("phone-doc");
  try {
    covered_text(*phones->root().children[0], "phone-doc", layers);
    FAIL("expected not-textual");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotTextual);
  }
}

TEST_CASE("parent text equals the join of partitioning children") {
  LayerSet layers;
  PrimaryDoc primary = PrimaryDoc::text("pdt-fr", "pomme de terre");
  primary.add_mark("w1", 0, 5);
  primary.add_mark("w2", 6, 8);
  primary.add_mark("w3", 9, 14);
  layers.add_primary(std::move(primary));
  ParseResult parsed = parse_gmt(fixtures::kCompoundPommeDeTerre, {}, "pdt");
  parsed.doc.primary_refs = {"pdt-fr"};
  const AnnotationDocument& doc = layers.add_annotation(std::move(parsed.doc));

  CoveredText parent = covered_text(doc.root(), doc.doc_id, layers);
  std::string joined;
  for (const auto& child : doc.root().children) {
    CoveredText part = covered_text(*child, doc.doc_id, layers);
    if (!joined.empty()) joined += ' ';
    joined += part.text;
  }
  CHECK(parent.text == "pomme de terre");
  CHECK(parent.text == joined);
}
