#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "charpipe/errors.hpp"
#include "charpipe/utf8.hpp"
#include "charpipe/vocab.hpp"

using namespace charpipe;

namespace {

FrequencyTable table(std::initializer_list<std::pair<char32_t, std::uint64_t>> entries) {
  FrequencyTable t;
  for (auto [c, n] : entries) t.add(c, n);
  return t;
}

CharVocab vocab_of(std::string_view text) {
  VocabConfig cfg;
  cfg.coverage_threshold = 1.0;
  return build_vocab(count_chars(text), cfg);
}

}  // namespace

TEST_CASE("count_chars") {
  SUBCASE("repeated characters") {
    const auto t = count_chars("aab");
    CHECK(t.count(U'a') == 2);
    CHECK(t.count(U'b') == 1);
    CHECK(t.total() == 3);
  }
  SUBCASE("whitespace counts like any character") {
    const auto t = count_chars("a b");
    CHECK(t.count(U' ') == 1);
    CHECK(t.total() == 3);
  }
  SUBCASE("counting is additive") {
    auto merged = count_chars("שלום ");
    merged.merge(count_chars("world"));
    CHECK(merged == count_chars("שלום world"));
  }
  SUBCASE("stream input counts newlines between lines") {
    std::istringstream in("ab\ncd\n");
    const auto t = count_chars(in);
    CHECK(t.total() == 6);
    CHECK(t.count(U'\n') == 2);
    std::istringstream no_final("ab\ncd");
    CHECK(count_chars(no_final).total() == 5);
  }
  SUBCASE("astral characters") {
    const auto t = count_chars("\xF0\x9F\x98\x80x");
    CHECK(t.count(U'\U0001F600') == 1);
    CHECK(t.total() == 2);
  }
  SUBCASE("invalid UTF-8 reports the line") {
    std::istringstream in("fine\nbad \xFF\n");
    try {
      count_chars(in);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(std::string(e.what()).starts_with("line 2"));
    }
  }
  SUBCASE("opt-in NFC") {
    const std::string decomposed = "e\xCC\x81";  // e + combining acute
    CHECK(count_chars(decomposed).total() == 2);
    const auto t = count_chars(decomposed, CountOptions{true});
    CHECK(t.total() == 1);
    CHECK(t.count(U'é') == 1);
  }
}

TEST_CASE("build_vocab") {
  SUBCASE("smallest prefix reaching the threshold") {
    VocabConfig cfg;
    cfg.coverage_threshold = 0.98;
    const auto v = build_vocab(table({{U'a', 97}, {U'b', 2}, {U'c', 1}}), cfg);
    CHECK(v.symbols() == std::vector<char32_t>{U'a', U'b'});
    CHECK(v.coverage() == doctest::Approx(0.99));
    CHECK(v.size() == kNumSpecials + 2);
  }
  SUBCASE("full coverage keeps everything") {
    VocabConfig cfg;
    cfg.coverage_threshold = 1.0;
    const auto v = build_vocab(table({{U'a', 97}, {U'b', 2}, {U'c', 1}}), cfg);
    CHECK(v.symbols().size() == 3);
    CHECK(v.coverage() == 1.0);
  }
  SUBCASE("singleton") {
    VocabConfig cfg;
    cfg.coverage_threshold = 0.5;
    CHECK(build_vocab(table({{U'a', 1}}), cfg).symbols() == std::vector<char32_t>{U'a'});
  }
  SUBCASE("ties broken by code point") {
    VocabConfig cfg;
    cfg.coverage_threshold = 0.5;
    const auto v = build_vocab(table({{U'z', 5}, {U'b', 5}, {U'm', 5}, {U'a', 5}}), cfg);
    CHECK(v.symbols() == std::vector<char32_t>{U'a', U'b'});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_vocab(FrequencyTable{}), ConfigError);
    VocabConfig bad;
    bad.coverage_threshold = 0.0;
    CHECK_THROWS_AS(build_vocab(table({{U'a', 1}}), bad), ConfigError);
    bad.coverage_threshold = 1.5;
    CHECK_THROWS_AS(build_vocab(table({{U'a', 1}}), bad), ConfigError);
    VocabConfig dup;
    dup.specials.bos = dup.specials.eos;
    CHECK_THROWS_AS(build_vocab(table({{U'a', 1}}), dup), ConfigError);
  }
}

TEST_CASE("property: minimal, deterministic coverage prefix") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 300; ++trial) {
    FrequencyTable t;
    const int distinct = 1 + static_cast<int>(gen() % 40);
    for (int i = 0; i < distinct; ++i) {
      t.add(static_cast<char32_t>(0x41 + gen() % 60), 1 + gen() % (gen() % 2 ? 5 : 1000));
    }
    VocabConfig cfg;
    cfg.coverage_threshold = std::uniform_real_distribution<double>(0.01, 1.0)(gen);
    const auto v = build_vocab(t, cfg);
    CHECK(v.coverage() >= cfg.coverage_threshold);
    std::uint64_t without_last = 0;
    for (std::size_t i = 0; i + 1 < v.frequencies().size(); ++i) without_last += v.frequencies()[i];
    CHECK(static_cast<double>(without_last) / static_cast<double>(t.total()) < cfg.coverage_threshold);
    CHECK(build_vocab(t, cfg) == v);
  }
}

TEST_CASE("encode and decode") {
  const auto v = vocab_of("hello world");

  SUBCASE("in-vocabulary text has no UNK") {
    const auto ids = encode(v, "hello");
    CHECK(ids.size() == 5);
    CHECK(std::count(ids.begin(), ids.end(), CharVocab::unk_id()) == 0);
  }
  SUBCASE("one unknown emoji becomes one UNK") {
    const auto ids = encode(v, "he\xF0\x9F\x98\x80lo");
    REQUIRE(ids.size() == 5);
    CHECK(ids[2] == CharVocab::unk_id());
    CHECK(std::count(ids.begin(), ids.end(), CharVocab::unk_id()) == 1);
    CHECK(decode(v, ids) == "he\xEF\xBF\xBDlo");
  }
  SUBCASE("empty") { CHECK(decode(v, std::vector<TokenId>{}).empty()); }
  SUBCASE("MASK renders as a placeholder") {
    auto ids = encode(v, "hello");
    ids[1] = CharVocab::mask_id();
    CHECK(decode(v, ids) == "h[MASK]llo");
    DecodeOptions o;
    o.mask = "_";
    CHECK(decode(v, ids, o) == "h_llo");
  }
  SUBCASE("PAD renders empty by default") {
    std::vector<TokenId> ids = {CharVocab::pad_id(), v.id_of(U'h')};
    CHECK(decode(v, ids) == "h");
  }
  SUBCASE("out-of-range id") {
    std::vector<TokenId> ids = {static_cast<TokenId>(v.size())};
    CHECK_THROWS_AS(decode(v, ids), Error);
  }
}

TEST_CASE("property: decode inverts encode on in-vocabulary text") {
  const std::u32string alphabet = U"abcשלוםмирسلام \t.";
  const auto v = vocab_of(utf8::encode(alphabet));
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string s;
    const auto len = gen() % 40;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
    const std::string text = utf8::encode(s);
    const auto ids = encode(v, text);
    CHECK(ids.size() == s.size());
    CHECK(decode(v, ids) == text);
  }
}

TEST_CASE("JSON persistence") {
  VocabConfig cfg;
  cfg.coverage_threshold = 0.9;
  const auto v = build_vocab(count_chars("aaaaabbbc\nשש"), cfg);
  const auto j = v.to_json();
  CHECK(j.at("symbols").size() == v.symbols().size());
  CHECK(j.at("specials").at("MASK").at("id") == CharVocab::mask_id());
  CHECK(j.at("threshold") == 0.9);
  CHECK(CharVocab::from_json(nlohmann::json::parse(j.dump())) == v);

  const auto path = std::filesystem::temp_directory_path() / "charpipe_vocab_test.json";
  v.save(path);
  const auto loaded = CharVocab::load(path);
  CHECK(loaded == v);
  CHECK(loaded.id_of(U'a') == v.id_of(U'a'));
  std::filesystem::remove(path);

  auto broken = nlohmann::json::parse(j.dump());
  broken["symbols"][0] = "ab";
  CHECK_THROWS_AS(CharVocab::from_json(broken), Error);
}

TEST_CASE("script_report") {
  SUBCASE("single script") {
    const auto r = script_report(vocab_of("שלום"));
    CHECK(r.size() == 1);
    CHECK(r.at("Hebrew") == doctest::Approx(100.0));
  }
  SUBCASE("half Latin, half Cyrillic") {
    const auto r = script_report(vocab_of("aж"));
    CHECK(r.at("Latin") == doctest::Approx(50.0));
    CHECK(r.at("Cyrillic") == doctest::Approx(50.0));
  }
  SUBCASE("whitespace is excluded, digits are Other") {
    const auto r = script_report(vocab_of("a 1\n"));
    CHECK(r.at("Latin") == doctest::Approx(50.0));
    CHECK(r.at("Other") == doctest::Approx(50.0));
  }
  SUBCASE("mixed-script Hebrew web text") {
    std::ifstream in(std::string(CHARPIPE_FIXTURES) + "/he_sample.txt", std::ios::binary);
    REQUIRE(in);
    VocabConfig cfg;
    cfg.coverage_threshold = 1.0;
    const auto r = script_report(build_vocab(count_chars(in), cfg));
    for (const char* script : {"Latin", "Cyrillic", "Hebrew", "Arabic"}) {
      CHECK_MESSAGE(r.count(script) == 1, script);
    }
    double sum = 0.0;
    for (const auto& [_, pct] : r) sum += pct;
    CHECK(sum <= 100.0 + 1e-9);
  }
}
