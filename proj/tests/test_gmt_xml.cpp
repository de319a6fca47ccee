#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmtannot/gmt_xml.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace gmtannot;

TEST_CASE("the four-word sentence reads back exactly") {
  ParseResult parsed = parse_gmt(fixtures::kPaulAime);
  CHECK(parsed.diagnostics.empty());
  const AnnotationDocument& doc = parsed.doc;
  CHECK(doc.root().node_type == "MSAnnot");
  REQUIRE(doc.root().children.size() == 4);

  struct Expect {
    std::vector<std::pair<std::string, std::string>> feats;
    std::string mark;
  };
  std::vector<Expect> expected = {
      {{{"lemma", "Paul"}, {"pos", "PNOUN"}}, "w1"},
      {{{"lemma", "aimer"}, {"pos", "VERB"}, {"tense", "present"},
        {"person", "3"}},
       "w2"},
      {{{"lemma", "le"}, {"pos", "DET"}, {"number", "plural"}}, "w3"},
      {{{"lemma", "croissant"}, {"pos", "NOUN"}, {"number", "plural"}}, "w4"},
  };
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const StructNode& node = *doc.root().children[i];
    CHECK(node.node_type == "W-level");
    REQUIRE(node.features.size() == expected[i].feats.size());
    for (std::size_t j = 0; j < node.features.size(); ++j) {
      CHECK(node.features[j].category == expected[i].feats[j].first);
      CHECK(node.features[j].value == expected[i].feats[j].second);
    }
    REQUIRE(node.seg.has_value());
    REQUIRE(node.seg->targets.size() == 1);
    CHECK(node.seg->targets[0] == Pointer{"", expected[i].mark});
  }
}

TEST_CASE("alternatives lift their confidence weights") {
  ParseResult parsed = parse_gmt(fixtures::kBouche);
  CHECK(parsed.diagnostics.empty());
  const StructNode& root = parsed.doc.root();
  CHECK(root.node_type == "W-level");
  REQUIRE(root.seg.has_value());
  REQUIRE(root.alternatives.size() == 2);
  const AltGroup& verb = root.alternatives[0];
  const AltGroup& noun = root.alternatives[1];
  CHECK(verb.confidence == 0.4);
  CHECK(noun.confidence == 0.6);
  REQUIRE(verb.features.size() == 3);  // confidence is no longer a feature
  CHECK(verb.features[0].value == "boucher");
  CHECK(verb.features[2].value == "present");
  REQUIRE(noun.features.size() == 2);
  CHECK(noun.features[0].value == "bouche");
}

TEST_CASE("span anchors read both attribute spellings") {
  ParseResult parsed = parse_gmt(fixtures::kPhonetic);
  CHECK(parsed.diagnostics.empty());
  const StructNode& root = parsed.doc.root();
  REQUIRE(root.seg.has_value());
  REQUIRE(root.seg->is_span());
  CHECK(root.seg->span->starts_at == 2300);
  CHECK(root.seg->span->ends_at == 3200);
  CHECK(root.feature_value("phone") == "iy");

  ParseResult other = parse_gmt(
      "<struct type=\"phonetic\">\n"
      "  <seg startPosition=\"2300\" endPosition=\"3200\"/>\n"
      "</struct>\n");
  CHECK(other.diagnostics.empty());
  CHECK(other.doc.root().seg->span == root.seg->span);
}

TEST_CASE("nested word structures parse as hierarchy") {
  ParseResult parsed = parse_gmt(fixtures::kFusedDu);
  CHECK(parsed.diagnostics.empty());
  const StructNode& du = parsed.doc.root();
  REQUIRE(du.seg.has_value());
  REQUIRE(du.children.size() == 2);
  CHECK(du.children[0]->feature_value("pos") == "PREP");
  CHECK(du.children[1]->feature_value("pos") == "DET");
}

TEST_CASE("values broken across lines collapse to plain text") {
  ParseResult parsed = parse_gmt(fixtures::kCompoundPommeDeTerre);
  CHECK(parsed.diagnostics.empty());
  CHECK(parsed.doc.root().feature_value("lemma") == "pomme_de_terre");
  CHECK(parsed.doc.root().children.size() == 3);
}

TEST_CASE("the mangled nested fragment is repaired in lenient mode") {
  ParseResult parsed = parse_gmt(fixtures::kNestedDuChat, GmtDialect::lenient(),
                                 "nested.gmt.xml");
  CHECK(!parsed.diagnostics.empty());  // repairs are reported
  CHECK(!has_errors(parsed.diagnostics));

  const AnnotationDocument& doc = parsed.doc;
  // synthetic root wrapping the fused token and the final noun
  REQUIRE(doc.root().children.size() == 2);
  const StructNode& du = *doc.root().children[0];
  REQUIRE(du.seg.has_value());
  CHECK(du.seg->targets[0] == Pointer{"", "w3"});
  REQUIRE(du.children.size() == 2);
  CHECK(du.children[0]->feature_value("lemma") == "de");
  CHECK(du.children[1]->feature_value("lemma") == "le");
  CHECK(du.children[1]->feature_value("gender") == "mas");
  CHECK(du.children[1]->seg->targets[0] == Pointer{"", "w3.2"});
  const StructNode& chat = *doc.root().children[1];
  CHECK(chat.feature_value("lemma") == "chat");
  CHECK(chat.seg->targets[0] == Pointer{"", "w4"});
}

TEST_CASE("the mangled nested fragment is refused in strict mode") {
  CHECK_THROWS_AS(parse_gmt(fixtures::kNestedDuChat, GmtDialect::strict_mode()),
                  Error);
}

TEST_CASE("a struct without a type gets a diagnostic and a placeholder") {
  ParseResult parsed = parse_gmt(fixtures::kSyntacticNp);
  CHECK(parsed.doc.root().node_type == "unknown");
  REQUIRE(parsed.doc.root().seg.has_value());
  REQUIRE(parsed.doc.root().seg->targets.size() == 2);
  CHECK(parsed.doc.root().seg->targets[0] == Pointer{"", "w3.2"});
  CHECK(parsed.doc.root().seg->targets[1] == Pointer{"", "w4"});
  bool warned = false;
  for (const auto& d : parsed.diagnostics)
    if (d.code == "missing-type" && d.severity == Severity::Warning)
      warned = true;
  CHECK(warned);
}

TEST_CASE("reference fragments survive a serialize-parse round trip") {
  for (const char* listing :
       {fixtures::kPaulAime, fixtures::kFusedDu, fixtures::kCompoundPommeDeTerre,
        fixtures::kBouche, fixtures::kPhonetic, fixtures::kLandmark}) {
    ParseResult first = parse_gmt(listing);
    std::string bytes = serialize_gmt(first.doc);
    ParseResult second = parse_gmt(bytes);
    CHECK(equal(first.doc, second.doc));
  }
  ParseResult nested = parse_gmt(fixtures::kNestedDuChat);
  ParseResult again = parse_gmt(serialize_gmt(nested.doc));
  CHECK(equal(nested.doc, again.doc));
}

TEST_CASE("document attributes carry identity through a round trip") {
  AnnotationDocument doc("msa-queue", "MSAnnot", "MSAnnot");
  doc.primary_refs = {"queue-fr"};
  StructNode& node = doc.add_child(doc.root(), "W-level", "w1");
  doc.set_feature(node, "lemma", "le");
  doc.set_seg(node, Seg::at({Pointer{"", "w1"}}));

  std::string bytes = serialize_gmt(doc);
  CHECK(bytes.find("doc=\"msa-queue\"") != std::string::npos);
  CHECK(bytes.find("base=\"queue-fr\"") != std::string::npos);
  ParseResult back = parse_gmt(bytes);
  CHECK(equal(doc, back.doc));
}

TEST_CASE("missing document id falls back to the source name") {
  ParseResult parsed =
      parse_gmt(fixtures::kPaulAime, {}, "corpus/paul.gmt.xml");
  CHECK(parsed.doc.doc_id == "paul");
}

TEST_CASE("an empty root serializes to one self-contained element") {
  AnnotationDocument doc("msa1", "MSAnnot", "MSAnnot");
  doc.doc_id.clear();  // content only
  CHECK(serialize_gmt(doc) == "<struct type=\"MSAnnot\"/>\n");
}

TEST_CASE("landmarks serialize with their span seg") {
  ParseResult parsed = parse_gmt(fixtures::kLandmark);
  std::string bytes = serialize_gmt(parsed.doc);
  CHECK(bytes.find("type=\"landmark\"") != std::string::npos);
  CHECK(bytes.find("startsAt=\"2300\"") != std::string::npos);
  CHECK(bytes.find("endsAt=\"3200\"") != std::string::npos);
}

TEST_CASE("pointer spellings survive their dialects") {
  AnnotationDocument doc("d", "MSAnnot", "MSAnnot");
  StructNode& node = doc.add_child(doc.root(), "W-level");
  doc.set_seg(node, Seg::at({Pointer{"", "w1"}, Pointer{"", "w3.2"},
                             Pointer{"other", "w4"}}));

  GmtDialect hash;
  std::string hashed = serialize_gmt(doc, hash);
  CHECK(hashed.find("targets=\"#w1 #w3.2 other#w4\"") != std::string::npos);

  GmtDialect bare;
  bare.pointers = GmtDialect::PointerStyle::Bare;
  std::string bared = serialize_gmt(doc, bare);
  CHECK(bared.find("targets=\"w1 w3.2 other#w4\"") != std::string::npos);

  for (const std::string& bytes : {hashed, bared}) {
    ParseResult back = parse_gmt(bytes);
    CHECK(equal(back.doc.root(), doc.root()));
  }
}

TEST_CASE("the positional span style is honoured on output") {
  ParseResult parsed = parse_gmt(fixtures::kLandmark);
  GmtDialect positional;
  positional.span_attrs = GmtDialect::SpanAttrs::StartEndPosition;
  std::string bytes = serialize_gmt(parsed.doc, positional);
  CHECK(bytes.find("startPosition=\"2300\"") != std::string::npos);
  CHECK(bytes.find("endPosition=\"3200\"") != std::string::npos);
  ParseResult back = parse_gmt(bytes);
  CHECK(equal(parsed.doc.root(), back.doc.root()));
}

TEST_CASE("several top-level elements are wrapped with a diagnostic") {
  const char* text = "<struct type=\"a\"/>\n<struct type=\"b\"/>\n";
  ParseResult lenient = parse_gmt(text);
  CHECK(lenient.doc.root().node_type == "root");
  CHECK(lenient.doc.root().children.size() == 2);
  REQUIRE(lenient.diagnostics.size() == 1);
  CHECK(lenient.diagnostics[0].code == "multiple-roots");
  CHECK(lenient.diagnostics[0].severity == Severity::Warning);

  ParseResult strict = parse_gmt(text, GmtDialect::strict_mode());
  CHECK(has_errors(strict.diagnostics));
}

TEST_CASE("foreign encoding declarations are flagged") {
  ParseResult parsed = parse_gmt(
      "<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?>\n"
      "<struct type=\"MSAnnot\"/>\n");
  REQUIRE(parsed.diagnostics.size() == 1);
  CHECK(parsed.diagnostics[0].code == "encoding");
}

TEST_CASE("conflicting anchors are a reported error") {
  ParseResult parsed = parse_gmt(
      "<struct type=\"W-level\">\n"
      "  <seg target=\"#w1\" startsAt=\"0\" endsAt=\"4\"/>\n"
      "</struct>\n");
  REQUIRE(has_errors(parsed.diagnostics));
  CHECK(parsed.diagnostics[0].code == "conflicting-anchor");
  // the target form wins; nothing is silently dropped without a report
  REQUIRE(parsed.doc.root().seg.has_value());
  CHECK(!parsed.doc.root().seg->is_span());
}

TEST_CASE("unknown elements are warnings when lenient, errors when strict") {
  const char* text =
      "<struct type=\"MSAnnot\">\n"
      "  <blob>x</blob>\n"
      "</struct>\n";
  ParseResult lenient = parse_gmt(text);
  REQUIRE(lenient.diagnostics.size() == 1);
  CHECK(lenient.diagnostics[0].code == "unknown-element");
  CHECK(lenient.diagnostics[0].severity == Severity::Warning);

  GmtDialect strict = GmtDialect::strict_mode();
  ParseResult strict_result = parse_gmt(text, strict);
  CHECK(has_errors(strict_result.diagnostics));
}

TEST_CASE("malformed markup fails with a position") {
  try {
    parse_gmt("<struct type=\"MSAnnot\">\n  <feat type=>x</feat>\n</struct>\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.line() == 2);
    CHECK(e.col() > 0);
  }
}

TEST_CASE("canonical form is idempotent and order-insensitive") {
  for (const char* listing :
       {fixtures::kPaulAime, fixtures::kFusedDu, fixtures::kCompoundPommeDeTerre,
        fixtures::kBouche, fixtures::kPhonetic, fixtures::kLandmark,
        fixtures::kNestedDuChat, fixtures::kSyntacticNp}) {
    ParseResult parsed = parse_gmt(listing);
    AnnotationDocument once = canonicalize(parsed.doc);
    AnnotationDocument twice = canonicalize(once);
    CHECK(equal(once, twice));
  }

  // same content, different attribute order and indentation
  const char* variant_a =
      "<struct type=\"W-level\">\n"
      "      <feat type=\"pos\">PREP</feat>\n"
      "  <feat type=\"lemma\">de</feat>\n"
      "  <seg   target=\"#w1\"/>\n"
      "</struct>\n";
  const char* variant_b =
      "<struct type=\"W-level\"><seg target=\"#w1\"/>"
      "<feat type=\"lemma\">de</feat><feat type=\"pos\">PREP</feat></struct>";
  CHECK(canonical_form(parse_gmt(variant_a).doc) ==
        canonical_form(parse_gmt(variant_b).doc));
}

TEST_CASE("canonicalization trims values") {
  AnnotationDocument doc("d", "MSAnnot", "MSAnnot");
  StructNode& node = doc.add_child(doc.root(), "W-level");
  node.features.push_back(Feature{"lemma", " aimer ", {}});
  AnnotationDocument canon = canonicalize(doc);
  CHECK(canon.root().children[0]->feature_value("lemma") == "aimer");
}

TEST_CASE("serialization refuses invariant-breaking documents") {
  AnnotationDocument doc("d", "MSAnnot", "MSAnnot");
  StructNode& node = doc.add_child(doc.root(), "W-level");
  node.features.push_back(Feature{"lemma", "", {}});
  CHECK_THROWS_AS(serialize_gmt(doc), Error);
  try {
    serialize_gmt(doc);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SerializationRefused);
  }
}

TEST_CASE("escaped characters survive both directions") {
  AnnotationDocument doc("d", "MSAnnot", "MSAnnot");
  StructNode& node = doc.add_child(doc.root(), "W-level", "a<b");
  doc.set_feature(node, "lemma", "a&b<c>\"d\"");
  ParseResult back = parse_gmt(serialize_gmt(doc));
  CHECK(equal(doc, back.doc));
}

TEST_CASE("mutated inputs never take the reader down") {
  generators::Rng rng(5551212);
  const char* listings[] = {fixtures::kPaulAime, fixtures::kBouche,
                            fixtures::kNestedDuChat, fixtures::kPhonetic};
  for (const char* listing : listings) {
    std::string original = listing;
    for (int round = 0; round < 300; ++round) {
      std::string mutated = original;
      int edits = generators::pick(rng, 1, 4);
      for (int e = 0; e < edits && !mutated.empty(); ++e) {
        std::size_t at = static_cast<std::size_t>(generators::pick(
            rng, 0, static_cast<int>(mutated.size()) - 1));
        switch (generators::pick(rng, 0, 2)) {
          case 0:
            mutated[at] = static_cast<char>(generators::pick(rng, 1, 126));
            break;
          case 1:
            mutated.erase(at, 1);
            break;
          default:
            mutated.insert(at, 1,
                           static_cast<char>(generators::pick(rng, 1, 126)));
        }
      }
      // any outcome is fine except a crash or a hang
      try {
        ParseResult parsed = parse_gmt(mutated);
        (void)serialize_gmt(canonicalize(parsed.doc));
      } catch (const Error&) {
      }
    }
  }
  CHECK(true);
}

TEST_CASE("random documents round-trip and canonicalize stably") {
  generators::Rng rng(20260808);
  for (int i = 0; i < 150; ++i) {
    AnnotationDocument doc = generators::random_document(rng, i);
    ParseResult back = parse_gmt(serialize_gmt(doc));
    REQUIRE_MESSAGE(back.diagnostics.empty(), "document " << i);
    REQUIRE_MESSAGE(equal(doc, back.doc), "document " << i);
    AnnotationDocument once = canonicalize(doc);
    REQUIRE_MESSAGE(equal(once, canonicalize(once)), "document " << i);
  }
}
