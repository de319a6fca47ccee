#pragma once

// Shared test inputs: the GMT reference fragments this toolkit must read,
// plus hand-built layer sets over the two French example sentences.
//
// Frozen offsets (verified by character counting):
//   "Paul aime les croissants"  w1=[0,4) w2=[5,9) w3=[10,13) w4=[14,24)
//   "la queue du chat"          w1=[0,2) w2=[3,8) w3=[9,11)  w4=[12,16)
// The sub-token marks w3.1/w3.2 are co-extensive with w3.

#include <string>

#include "gmtannot/anchoring.hpp"
#include "gmtannot/layers.hpp"
#include "gmtannot/model.hpp"

namespace fixtures {

inline constexpr const char* kPaulAime = R"(<struct type="MSAnnot">
  <struct type="W-level">
    <feat type="lemma">Paul</feat>
    <feat type="pos">PNOUN</feat>
    <seg target="#w1"/>
  </struct>
  <struct type="W-level">
    <feat type="lemma">aimer</feat>
    <feat type="pos">VERB</feat>
    <feat type="tense">present</feat>
    <feat type="person">3</feat>
    <seg target="#w2"/>
  </struct>
  <struct type="W-level">
    <feat type="lemma">le</feat>
    <feat type="pos">DET</feat>
    <feat type="number">plural</feat>
    <seg target="#w3"/>
  </struct>
  <struct type="W-level">
    <feat type="lemma">croissant</feat>
    <feat type="pos">NOUN</feat>
    <feat type="number">plural</feat>
    <seg target="#w4"/>
  </struct>
</struct>
)";

inline constexpr const char* kFusedDu = R"(<struct type="W-level">
  <seg target="#w1"/>
  <struct type="W-level">
    <feat type="lemma">de</feat>
    <feat type="pos">PREP</feat>
  </struct>
  <struct type="W-level">
    <feat type="lemma">le</feat>
    <feat type="pos">DET</feat>
  </struct>
</struct>
)";

// The lemma value is deliberately broken across lines.
inline constexpr const char* kCompoundPommeDeTerre = R"(<struct type="W-level">
  <feat type="lemma">
    pomme_de_terre</feat>
  <feat type="pos">NOUN</feat>
  <struct type="W-level">
    <seg target="#w1"/>
    <feat type="lemma">pomme</feat>
    <feat type="pos">NOUN</feat>
  </struct>
  <struct type="W-level">
    <seg target="#w2"/>
    <feat type="lemma">de</feat>
    <feat type="pos">PREP</feat>
  </struct>
  <struct type="W-level">
    <seg target="#w3"/>
    <feat type="lemma">terre</feat>
    <feat type="pos">NOUN</feat>
  </struct>
</struct>
)";

inline constexpr const char* kBouche = R"(<struct type="W-level">
  <seg target="#w1"/>
  <alt>
    <feat type="lemma">boucher</feat>
    <feat type="pos">VERB</feat>
    <feat type="tense">present</feat>
    <feat type="confidence">0.4</feat>
  </alt>
  <alt>
    <feat type="lemma">bouche</feat>
    <feat type="pos">NOUN</feat>
    <feat type="confidence">0.6</feat>
  </alt>
</struct>
)";

inline constexpr const char* kPhonetic = R"(<struct type="phonetic">
  <seg startsAt="2300"
    endsAt="3200"/>
  <feat type="phone">iy</feat>
</struct>
)";

inline constexpr const char* kLandmark = R"(<struct type="landmark">
  <seg startsAt="2300"
        endsAt="3200"/>
</struct>
)";

// Word-level layer over "la queue du chat", complete with its original formatting slips: the segs
// are left open around their sibling structs, a second top-level element
// follows, and one end tag too many closes the file. Lenient parsing must
// reconstruct the intended shape.
inline constexpr const char* kNestedDuChat = R"(<!-- Morphosyntactic level -->
<struct type="W-level">
  <seg target="#w3">
    <struct type="W-level">
      <seg target="#w3.1">
        <feat type="lemma">de</feat>
        <feat type="pos">PREP</feat>
      </struct>
    <struct type="W-level">
      <seg target="#w3.2">
        <feat type="lemma">le</feat>
        <feat type="pos">DET</feat>
        <feat type="gender">mas</feat>
      </struct>
    </struct>
  <struct type="W-level">
    <seg target="#w4">
      <feat type="lemma">chat</feat>
      <feat type="pos">NOUN</feat>
    </struct>
  </struct>
)";

inline constexpr const char* kSyntacticNp = R"(<!-- Syntactic level (simplified) -->
<struct>
  <feat type="synCat">NP</feat>
  <seg targets="w3.2 w4"/>
</struct>
)";

inline const char* kPaulText = "Paul aime les croissants";
inline const char* kQueueText = "la queue du chat";

inline const char* kPaulTabular =
    "Paul\tPaul\tPNOUN\n"
    "aime\taimer\tVERB\ttense=present;person=3\n"
    "les\tle\tDET\tnumber=plural\n"
    "croissants\tcroissant\tNOUN\tnumber=plural\n";

// ---------------------------------------------------------------------------
// hand-built layer sets
// ---------------------------------------------------------------------------

inline gmtannot::PrimaryDoc paul_primary(const std::string& id = "paul-fr") {
  gmtannot::PrimaryDoc doc = gmtannot::PrimaryDoc::text(id, kPaulText);
  doc.add_mark("w1", 0, 4);
  doc.add_mark("w2", 5, 9);
  doc.add_mark("w3", 10, 13);
  doc.add_mark("w4", 14, 24);
  return doc;
}

inline gmtannot::PrimaryDoc queue_primary(const std::string& id = "queue-fr") {
  gmtannot::PrimaryDoc doc = gmtannot::PrimaryDoc::text(id, kQueueText);
  doc.add_mark("w1", 0, 2);
  doc.add_mark("w2", 3, 8);
  doc.add_mark("w3", 9, 11);
  doc.add_mark("w3.1", 9, 11);
  doc.add_mark("w3.2", 9, 11);
  doc.add_mark("w4", 12, 16);
  return doc;
}

// Word layer for "la queue du chat" with node ids, plus the syntactic NP
// layer pointing at the word nodes. The fused "du" carries two sub-token
// components anchored at the co-extensive marks.
inline gmtannot::LayerSet queue_layers() {
  using namespace gmtannot;
  LayerSet layers;
  layers.add_primary(queue_primary());

  AnnotationDocument morpho("msa-queue", "MSAnnot", "MSAnnot");
  morpho.primary_refs = {"queue-fr"};
  auto word = [&](const std::string& id, const std::string& mark,
                  StructNode& parent) -> StructNode& {
    StructNode& node = morpho.add_child(parent, "W-level", id);
    morpho.set_seg(node, Seg::at({Pointer{"", mark}}));
    return node;
  };
  StructNode& la = word("w1", "w1", morpho.root());
  morpho.set_feature(la, "lemma", "le");
  morpho.set_feature(la, "pos", "DET");
  StructNode& queue = word("w2", "w2", morpho.root());
  morpho.set_feature(queue, "lemma", "queue");
  morpho.set_feature(queue, "pos", "NOUN");
  StructNode& du = word("w3", "w3", morpho.root());
  StructNode& de = word("w3.1", "w3.1", du);
  morpho.set_feature(de, "lemma", "de");
  morpho.set_feature(de, "pos", "PREP");
  StructNode& le = word("w3.2", "w3.2", du);
  morpho.set_feature(le, "lemma", "le");
  morpho.set_feature(le, "pos", "DET");
  morpho.set_feature(le, "gender", "mas");
  StructNode& chat = word("w4", "w4", morpho.root());
  morpho.set_feature(chat, "lemma", "chat");
  morpho.set_feature(chat, "pos", "NOUN");
  layers.add_annotation(std::move(morpho));

  AnnotationDocument syntactic("syn-queue", "syntactic", "struct");
  syntactic.primary_refs = {"msa-queue"};
  syntactic.set_id(syntactic.root(), "np1");
  syntactic.set_feature(syntactic.root(), "synCat", "NP");
  syntactic.set_seg(syntactic.root(),
                    gmtannot::Seg::at({gmtannot::Pointer{"", "w3.2"},
                                       gmtannot::Pointer{"", "w4"}}));
  layers.add_annotation(std::move(syntactic));
  return layers;
}

// Two single-node readings of "bouche" over one mark, for merge and diff.
inline gmtannot::LayerSet bouche_layers() {
  using namespace gmtannot;
  LayerSet layers;
  PrimaryDoc primary = PrimaryDoc::text("bouche-fr", "bouche");
  primary.add_mark("w1", 0, 6);
  layers.add_primary(std::move(primary));

  AnnotationDocument verb("bouche-a", "MSAnnot", "W-level");
  verb.primary_refs = {"bouche-fr"};
  verb.set_seg(verb.root(), Seg::at({Pointer{"", "w1"}}));
  verb.set_feature(verb.root(), "lemma", "boucher");
  verb.set_feature(verb.root(), "pos", "VERB");
  verb.set_feature(verb.root(), "tense", "present");
  layers.add_annotation(std::move(verb));

  AnnotationDocument noun("bouche-b", "MSAnnot", "W-level");
  noun.primary_refs = {"bouche-fr"};
  noun.set_seg(noun.root(), Seg::at({Pointer{"", "w1"}}));
  noun.set_feature(noun.root(), "lemma", "bouche");
  noun.set_feature(noun.root(), "pos", "NOUN");
  layers.add_annotation(std::move(noun));
  return layers;
}

// Timed medium with a landmark layer and a phone layer referencing it.
inline gmtannot::LayerSet landmark_layers() {
  using namespace gmtannot;
  LayerSet layers;
  layers.add_primary(PrimaryDoc::timed("speech1", 10000));

  AnnotationDocument landmarks("lm-doc", "landmarks", "landmarks");
  landmarks.primary_refs = {"speech1"};
  landmarks.adopt_child(landmarks.root(),
                        make_landmark(2300, 3200, SpanUnit::TimeUnit, "lm1"));
  layers.add_annotation(std::move(landmarks));

  AnnotationDocument phones("phone-doc", "phonetic", "phonetic");
  phones.primary_refs = {"lm-doc"};
  StructNode& phone = phones.add_child(phones.root(), "segment");
  phones.set_feature(phone, "phone", "iy");
  phones.set_seg(phone, Seg::at({Pointer{"", "lm1"}}));
  layers.add_annotation(std::move(phones));
  return layers;
}

}  // namespace fixtures
