#include "charpipe/labelmap.hpp"

#include <algorithm>
#include <limits>

#include "charpipe/errors.hpp"
#include "charpipe/utf8.hpp"

namespace charpipe {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

CharLabel CharLabel::parse(std::string_view text) {
  if (text == kVoidLabel) return void_label();
  return CharLabel(Multitag::parse(text));
}

std::string CharLabel::to_string() const {
  return void_ ? std::string(kVoidLabel) : tags_.class_key();
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Multitag ? "multitag" : "segments";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "multitag") return Scheme::Multitag;
  if (text == "segments") return Scheme::Segments;
  throw ConfigError("unknown scheme '" + std::string(text) + "'");
}

CharAlignment align_morphemes(const MorphWord& word) {
  if (word.morphemes.empty()) {
    throw AlignmentError("word '" + word.surface + "' has no morphemes");
  }
  const std::u32string surface = utf8::decode(word.surface);
  const std::size_t n = surface.size();

  CharAlignment out;
  out.morphemes.resize(word.morphemes.size());
  std::vector<std::size_t> overt;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < word.morphemes.size(); ++k) {
    const std::u32string form = utf8::decode(word.morphemes[k].form);
    if (!form.empty() && cursor + form.size() <= n &&
        surface.compare(cursor, form.size(), form) == 0) {
      out.morphemes[k] = {true, {cursor, cursor + form.size()}};
      cursor += form.size();
      overt.push_back(k);
    }
  }
  if (overt.empty()) {
    throw AlignmentError("no morpheme of '" + word.surface + "' matches its surface");
  }

  // Unclaimed characters join the preceding overt morpheme, or the first
  // overt morpheme when they lead the word.
  out.morphemes[overt.front()].range.begin = 0;
  for (std::size_t i = 0; i < overt.size(); ++i) {
    const std::size_t end =
        i + 1 < overt.size() ? out.morphemes[overt[i + 1]].range.begin : n;
    out.morphemes[overt[i]].range.end = end;
  }

  out.char_morphemes.assign(n, {});
  for (std::size_t k : overt) {
    const auto& r = out.morphemes[k].range;
    for (std::size_t c = r.begin; c < r.end; ++c) out.char_morphemes[c].push_back(k);
  }
  for (std::size_t k = 0; k < word.morphemes.size(); ++k) {
    if (out.morphemes[k].overt) continue;
    std::size_t host = kNone;
    for (std::size_t j : overt) {
      if (j < k) host = j;
    }
    if (host == kNone) host = overt.front();
    const auto& r = out.morphemes[host].range;
    for (std::size_t c = r.begin; c < r.end; ++c) out.char_morphemes[c].push_back(k);
  }
  for (auto& ids : out.char_morphemes) std::sort(ids.begin(), ids.end());
  return out;
}

std::vector<Multitag> map_multitag(const MorphWord& word, const LabelField& field) {
  const Multitag tag(extract_labels(word, field));
  return std::vector<Multitag>(utf8::length(word.surface), tag);
}

std::vector<Multitag> map_segments(const MorphWord& word, const LabelField& field) {
  const CharAlignment alignment = align_morphemes(word);
  const auto tags = extract_labels(word, field);
  std::vector<Multitag> out;
  out.reserve(alignment.char_morphemes.size());
  for (const auto& ids : alignment.char_morphemes) {
    std::vector<std::string> char_tags;
    char_tags.reserve(ids.size());
    for (std::size_t k : ids) char_tags.push_back(tags[k]);
    out.emplace_back(std::move(char_tags));
  }
  return out;
}

namespace {

std::vector<Multitag> map_word(const MorphWord& word, Scheme scheme,
                               const LabelField& field) {
  return scheme == Scheme::Multitag ? map_multitag(word, field)
                                    : map_segments(word, field);
}

}  // namespace

CharLabelSequence map_sentence(const Sentence& sentence, Scheme scheme,
                               const LabelField& field) {
  CharLabelSequence seq{scheme, {}};
  for (std::size_t w = 0; w < sentence.words.size(); ++w) {
    if (w > 0) seq.labels.push_back(CharLabel::void_label());
    std::vector<Multitag> word_labels;
    try {
      word_labels = map_word(sentence.words[w], scheme, field);
    } catch (const AlignmentError& e) {
      throw AlignmentError("word " + std::to_string(w) + ": " + e.what());
    }
    for (auto& l : word_labels) seq.labels.emplace_back(std::move(l));
  }
  return seq;
}

LabeledSentence map_sentence_lenient(const Sentence& sentence, Scheme scheme,
                                     const LabelField& field) {
  LabeledSentence out;
  out.text = sentence.text;
  out.field = field.to_string();
  out.labels.scheme = scheme;
  for (std::size_t w = 0; w < sentence.words.size(); ++w) {
    const auto& word = sentence.words[w];
    if (w > 0) out.labels.labels.push_back(CharLabel::void_label());
    try {
      for (auto& l : map_word(word, scheme, field)) {
        out.labels.labels.emplace_back(std::move(l));
      }
    } catch (const AlignmentError&) {
      out.skipped_words.push_back(w);
      out.labels.labels.insert(out.labels.labels.end(), utf8::length(word.surface),
                               CharLabel(Multitag()));
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const LabeledSentence& sentence) {
  nlohmann::ordered_json j;
  j["text"] = sentence.text;
  auto& labels = j["labels"] = nlohmann::ordered_json::array();
  for (const auto& l : sentence.labels.labels) labels.push_back(l.to_string());
  j["scheme"] = to_string(sentence.labels.scheme);
  j["field"] = sentence.field;
  if (!sentence.skipped_words.empty()) j["skipped_words"] = sentence.skipped_words;
  if (sentence.word_multitags) {
    auto& words = j["word_multitags"] = nlohmann::ordered_json::array();
    for (const auto& m : *sentence.word_multitags) words.push_back(m.class_key());
  }
  return j;
}

LabeledSentence labeled_sentence_from_json(const nlohmann::json& j) {
  LabeledSentence out;
  try {
    out.text = j.at("text").get<std::string>();
    out.labels.scheme = parse_scheme(j.at("scheme").get<std::string>());
    for (const auto& l : j.at("labels")) {
      out.labels.labels.push_back(CharLabel::parse(l.get<std::string>()));
    }
    out.field = j.value("field", std::string("upos"));
    if (j.contains("skipped_words")) {
      out.skipped_words = j.at("skipped_words").get<std::vector<std::size_t>>();
    }
    if (j.contains("word_multitags")) {
      std::vector<Multitag> words;
      for (const auto& w : j.at("word_multitags")) {
        words.push_back(Multitag::parse(w.get<std::string>()));
      }
      out.word_multitags = std::move(words);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed label record: ") + e.what());
  }
  return out;
}

}  // namespace charpipe
