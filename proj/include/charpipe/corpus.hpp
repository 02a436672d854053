#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace charpipe {

/// Morphological features in file order, e.g. {("Gender","Fem"),("Number","Sing")}.
using FeatureList = std::vector<std::pair<std::string, std::string>>;

/// One syntactic word (a CoNLL-U row with an integer ID).
struct Morpheme {
  int index = 0;
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  FeatureList feats;
  // Dependency columns and MISC are carried verbatim.
  std::string head = "_";
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";

  std::optional<std::string_view> feature(std::string_view name) const;

  bool operator==(const Morpheme&) const = default;
};

/// Half-open range of code point offsets.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const CharSpan&) const = default;
};

/// A raw space-delimited token together with the morphemes it expands into.
struct MorphWord {
  std::string surface;
  std::vector<Morpheme> morphemes;
  CharSpan char_span;
  /// LEMMA..MISC of the "i-j" range line; empty for single-row words.
  std::optional<std::array<std::string, 8>> range_columns;

  bool is_multiword() const { return range_columns.has_value(); }
  bool operator==(const MorphWord&) const = default;
};

struct Sentence {
  std::string text;
  std::vector<MorphWord> words;
  std::optional<std::string> sent_id;
  /// Comment lines preceding the sentence, verbatim including '#'.
  std::vector<std::string> comments;

  /// Builds a sentence from words, filling in text and char spans.
  static Sentence from_words(std::vector<MorphWord> words,
                             std::vector<std::string> comments = {});

  bool operator==(const Sentence&) const = default;
};

struct Treebank {
  std::vector<Sentence> sentences;
  std::string source;

  bool operator==(const Treebank& other) const {
    return sentences == other.sentences;
  }
};

/// Parses CoNLL-U text. Multiword ranges become one MorphWord each; empty
/// nodes are dropped. Throws ParseError (with line) or DecodeError.
Treebank parse_conllu(std::string_view text, std::string source = {});

Treebank read_conllu(const std::filesystem::path& path);

std::string serialize_conllu(const Treebank& treebank);

/// Selects which annotation of a morpheme is used as its tag.
class LabelField {
 public:
  static LabelField upos() { return LabelField(); }
  static LabelField feature(std::string name);
  /// "upos" (any case) selects UPOS; anything else is a feature name.
  static LabelField parse(std::string_view text);

  bool is_upos() const { return name_.empty(); }
  const std::string& feature_name() const { return name_; }
  std::string to_string() const { return is_upos() ? "upos" : name_; }

 private:
  LabelField() = default;
  std::string name_;
};

/// Placeholder tag for a morpheme that lacks the requested feature.
inline constexpr std::string_view kMissingTag = "_";

/// One tag per morpheme, in morpheme order.
std::vector<std::string> extract_labels(const MorphWord& word,
                                        const LabelField& field);

}  // namespace charpipe
