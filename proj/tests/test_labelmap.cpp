#include <doctest.h>

#include <random>
#include <set>

#include "charpipe/aggregate.hpp"
#include "charpipe/errors.hpp"
#include "charpipe/labelmap.hpp"
#include "charpipe/utf8.hpp"
#include "synthetic.hpp"

using namespace charpipe;

namespace {

MorphWord word(std::string surface,
               std::vector<std::pair<std::string, std::string>> morphs) {
  MorphWord w;
  w.surface = std::move(surface);
  int i = 1;
  for (auto& [form, tag] : morphs) {
    Morpheme m;
    m.index = i++;
    m.form = form;
    m.upos = tag;
    w.morphemes.push_back(std::move(m));
  }
  return w;
}

std::vector<std::string> keys(const std::vector<Multitag>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.class_key());
  return out;
}

std::vector<std::string> keys(const CharLabelSequence& seq) {
  std::vector<std::string> out;
  for (const auto& l : seq.labels) out.push_back(l.to_string());
  return out;
}

const MorphWord bbyt = word("bbyt", {{"b", "ADP"}, {"h", "DET"}, {"byt", "NN"}});
const MorphWord hlbn = word("hlbn", {{"h", "DET"}, {"lbn", "ADJ"}});

}  // namespace

TEST_CASE("align_morphemes") {
  SUBCASE("covert determiner folds onto the preposition") {
    const auto a = align_morphemes(bbyt);
    CHECK(a.morphemes[0].overt);
    CHECK(a.morphemes[0].range == CharSpan{0, 1});
    CHECK_FALSE(a.morphemes[1].overt);
    CHECK(a.morphemes[2].range == CharSpan{1, 4});
    CHECK(a.char_morphemes[0] == std::vector<std::size_t>{0, 1});
    CHECK(a.char_morphemes[1] == std::vector<std::size_t>{2});
    CHECK(a.char_morphemes[3] == std::vector<std::size_t>{2});
  }
  SUBCASE("single morpheme") {
    const auto a = align_morphemes(word("dog", {{"dog", "NOUN"}}));
    for (const auto& ids : a.char_morphemes) CHECK(ids == std::vector<std::size_t>{0});
  }
  SUBCASE("exact concatenation") {
    const auto a = align_morphemes(word("abc", {{"ab", "X"}, {"c", "Y"}}));
    CHECK(a.char_morphemes == std::vector<std::vector<std::size_t>>{{0}, {0}, {1}});
  }
  SUBCASE("leading covert morpheme folds forward") {
    const auto a = align_morphemes(word("lbn", {{"h", "DET"}, {"lbn", "ADJ"}}));
    CHECK(a.char_morphemes[0] == std::vector<std::size_t>{0, 1});
    CHECK(a.char_morphemes[2] == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("unclaimed tail joins the last overt morpheme") {
    const auto a = align_morphemes(word("abcd", {{"ab", "X"}, {"zz", "Y"}}));
    CHECK(a.morphemes[0].range == CharSpan{0, 4});
    CHECK(a.char_morphemes[3] == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("multi-byte characters are aligned by code point") {
    const auto a = align_morphemes(word("בבית", {{"ב", "ADP"}, {"ה", "DET"}, {"בית", "NN"}}));
    REQUIRE(a.char_morphemes.size() == 4);
    CHECK(a.char_morphemes[0] == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("nothing matches") {
    CHECK_THROWS_AS(align_morphemes(word("abc", {{"x", "X"}, {"y", "Y"}})), AlignmentError);
  }
}

TEST_CASE("map_multitag") {
  CHECK(keys(map_multitag(hlbn, LabelField::upos())) ==
        std::vector<std::string>(4, "DET+ADJ"));
  CHECK(keys(map_multitag(bbyt, LabelField::upos())) ==
        std::vector<std::string>(4, "ADP+DET+NN"));
  CHECK(keys(map_multitag(word("dog", {{"dog", "NOUN"}}), LabelField::upos())) ==
        std::vector<std::string>(3, "NOUN"));
}

TEST_CASE("map_segments") {
  CHECK(keys(map_segments(bbyt, LabelField::upos())) ==
        std::vector<std::string>{"ADP+DET", "NN", "NN", "NN"});
  CHECK(keys(map_segments(hlbn, LabelField::upos())) ==
        std::vector<std::string>{"DET", "ADJ", "ADJ", "ADJ"});
  CHECK(keys(map_segments(word("house", {{"house", "NN"}}), LabelField::upos())) ==
        std::vector<std::string>(5, "NN"));
}

TEST_CASE("map_sentence") {
  const Sentence s = Sentence::from_words({bbyt, hlbn});
  CHECK(keys(map_sentence(s, Scheme::Segments, LabelField::upos())) ==
        std::vector<std::string>{"ADP+DET", "NN", "NN", "NN", "VOID", "DET", "ADJ", "ADJ", "ADJ"});
  const std::string mt = "ADP+DET+NN", da = "DET+ADJ";
  CHECK(keys(map_sentence(s, Scheme::Multitag, LabelField::upos())) ==
        std::vector<std::string>{mt, mt, mt, mt, "VOID", da, da, da, da});
  CHECK(map_sentence(Sentence{}, Scheme::Segments, LabelField::upos()).labels.empty());

  const Sentence bad = Sentence::from_words({hlbn, word("abc", {{"x", "X"}})});
  try {
    map_sentence(bad, Scheme::Segments, LabelField::upos());
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    CHECK(std::string(e.what()).starts_with("word 1"));
  }
  // The multitag scheme needs no alignment.
  CHECK_NOTHROW(map_sentence(bad, Scheme::Multitag, LabelField::upos()));

  const auto lenient = map_sentence_lenient(bad, Scheme::Segments, LabelField::upos());
  CHECK(lenient.skipped_words == std::vector<std::size_t>{1});
  CHECK(lenient.labels.labels.size() == utf8::length(bad.text));
  CHECK(lenient.labels.labels.back().to_string().empty());
}

TEST_CASE("feature fields emit placeholders") {
  MorphWord w = word("ab", {{"a", "X"}, {"b", "Y"}});
  w.morphemes[1].feats = {{"Number", "Sing"}};
  CHECK(keys(map_segments(w, LabelField::feature("Number"))) ==
        std::vector<std::string>{"_", "Sing"});
  CHECK(keys(map_multitag(w, LabelField::feature("Number"))) ==
        std::vector<std::string>{"_+Sing", "_+Sing"});
}

TEST_CASE("JSON round trip") {
  const Sentence s = Sentence::from_words({bbyt, hlbn});
  LabeledSentence ls = map_sentence_lenient(s, Scheme::Segments, LabelField::upos());
  const auto j = to_json(ls);
  CHECK(j.dump() ==
        R"({"text":"bbyt hlbn","labels":["ADP+DET","NN","NN","NN","VOID","DET","ADJ","ADJ","ADJ"],"scheme":"segments","field":"upos"})");
  const auto back = labeled_sentence_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.labels == ls.labels);
  CHECK(back.text == ls.text);
}

TEST_CASE("property: length, uniformity, tag conservation and the spans bridge") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 500; ++trial) {
    const MorphWord w = testing::contiguous_word(gen);
    const auto seg = map_segments(w, LabelField::upos());
    const auto mt = map_multitag(w, LabelField::upos());
    REQUIRE(seg.size() == w.surface.size());
    REQUIRE(mt.size() == w.surface.size());
    for (const auto& l : mt) CHECK(l == mt.front());

    std::multiset<std::string> seen;
    for (const auto& l : seg) seen.insert(l.tags().begin(), l.tags().end());
    for (const auto& m : w.morphemes) CHECK(seen.count(m.upos) >= 1);

    const auto spans = agg_spans(seg);
    std::set<std::string> got(spans.tags().begin(), spans.tags().end());
    std::set<std::string> want(mt.front().tags().begin(), mt.front().tags().end());
    CHECK(got == want);
  }
}
