#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "charpipe/corpus.hpp"
#include "charpipe/multitag.hpp"

namespace charpipe {

inline constexpr std::string_view kVoidLabel = "VOID";

/// Label of one character: VOID for whitespace, otherwise a multitag (a
/// word class under the multitag scheme, a tag multiset under segments).
class CharLabel {
 public:
  static CharLabel void_label() { return CharLabel(true, {}); }
  explicit CharLabel(Multitag tags) : CharLabel(false, std::move(tags)) {}

  /// "VOID" or a "+"-joined key.
  static CharLabel parse(std::string_view text);

  bool is_void() const { return void_; }
  const Multitag& tags() const { return tags_; }
  std::string to_string() const;

  bool operator==(const CharLabel&) const = default;

 private:
  CharLabel(bool is_void, Multitag tags) : void_(is_void), tags_(std::move(tags)) {}
  bool void_;
  Multitag tags_;
};

enum class Scheme { Multitag, Segments };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct CharLabelSequence {
  Scheme scheme = Scheme::Segments;
  std::vector<CharLabel> labels;

  bool operator==(const CharLabelSequence&) const = default;
};

struct MorphemePlacement {
  bool overt = false;
  CharSpan range;  // empty for covert morphemes
};

struct CharAlignment {
  /// Per character of the surface: ascending morpheme indices covering it.
  std::vector<std::vector<std::size_t>> char_morphemes;
  std::vector<MorphemePlacement> morphemes;
};

/// Places morpheme forms on the surface greedily from the left. A morpheme
/// whose form does not continue the surface at the cursor is covert and
/// shares the characters of the previous overt morpheme (the next one when
/// no overt morpheme precedes it). Unclaimed surface characters join the
/// nearest preceding overt morpheme. Throws AlignmentError when every
/// morpheme is covert.
CharAlignment align_morphemes(const MorphWord& word);

/// Word multitag copied onto every character.
std::vector<Multitag> map_multitag(const MorphWord& word, const LabelField& field);

/// Per-character union of the tags of the morphemes covering it.
std::vector<Multitag> map_segments(const MorphWord& word, const LabelField& field);

/// Maps every word and puts VOID between words. Throws AlignmentError naming
/// the word index.
CharLabelSequence map_sentence(const Sentence& sentence, Scheme scheme,
                               const LabelField& field);

/// A sentence with character labels, as stored in label JSONL files.
struct LabeledSentence {
  std::string text;
  CharLabelSequence labels;
  std::string field;
  /// Words whose alignment failed; their characters carry empty labels.
  std::vector<std::size_t> skipped_words;
  /// Set by the aggregation step.
  std::optional<std::vector<Multitag>> word_multitags;
};

/// Like map_sentence, but words that fail to align are recorded in
/// `skipped_words` instead of aborting.
LabeledSentence map_sentence_lenient(const Sentence& sentence, Scheme scheme,
                                     const LabelField& field);

nlohmann::ordered_json to_json(const LabeledSentence& sentence);
LabeledSentence labeled_sentence_from_json(const nlohmann::json& j);

}  // namespace charpipe
