#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace charpipe {

using TokenId = std::uint32_t;

/// Character counts keyed by Unicode scalar value.
class FrequencyTable {
 public:
  void add(char32_t c, std::uint64_t n = 1);
  void merge(const FrequencyTable& other);

  std::uint64_t count(char32_t c) const;
  std::uint64_t total() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }
  bool empty() const { return total_ == 0; }

  /// Entries sorted by descending count, ties by ascending code point.
  std::vector<std::pair<char32_t, std::uint64_t>> ranked() const;

  bool operator==(const FrequencyTable&) const = default;

 private:
  std::unordered_map<char32_t, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct CountOptions {
  /// Apply NFC normalization before counting.
  bool nfc = false;
};

/// Counts every character of a UTF-8 stream, newlines included.
/// Throws DecodeError (message carries the line number) on invalid UTF-8.
FrequencyTable count_chars(std::istream& in, const CountOptions& options = {});
FrequencyTable count_chars(std::string_view text, const CountOptions& options = {});

/// NFC-normalizes UTF-8 text.
std::string nfc_normalize(std::string_view text);

enum class Special : TokenId { Pad = 0, Unk = 1, Mask = 2, Bos = 3, Eos = 4 };
inline constexpr TokenId kNumSpecials = 5;

/// Printable names of the special symbols as stored in the vocabulary file.
struct SpecialSymbols {
  std::string pad = "[PAD]";
  std::string unk = "[UNK]";
  std::string mask = "[MASK]";
  std::string bos = "[BOS]";
  std::string eos = "[EOS]";

  const std::string& name(Special s) const;
  bool operator==(const SpecialSymbols&) const = default;
};

struct VocabConfig {
  double coverage_threshold = 0.9993;
  SpecialSymbols specials;

  void validate() const;
};

/// Character inventory. Ids [0, kNumSpecials) are the specials in `Special`
/// order; character symbols follow in descending frequency.
class CharVocab {
 public:
  CharVocab(std::vector<char32_t> symbols, std::vector<std::uint64_t> frequencies,
            SpecialSymbols specials, double coverage, double threshold,
            std::uint64_t corpus_total);

  static constexpr TokenId id(Special s) { return static_cast<TokenId>(s); }
  static constexpr TokenId pad_id() { return id(Special::Pad); }
  static constexpr TokenId unk_id() { return id(Special::Unk); }
  static constexpr TokenId mask_id() { return id(Special::Mask); }

  /// Id of `c`, or UNK when it is out of vocabulary.
  TokenId id_of(char32_t c) const;
  std::optional<TokenId> find(char32_t c) const;
  /// Character behind a non-special id. Throws for specials and bad ids.
  char32_t symbol_at(TokenId id) const;

  bool is_special(TokenId id) const { return id < kNumSpecials; }
  bool contains(TokenId id) const { return id < size(); }
  std::size_t size() const { return kNumSpecials + symbols_.size(); }

  const std::vector<char32_t>& symbols() const { return symbols_; }
  const std::vector<std::uint64_t>& frequencies() const { return frequencies_; }
  const SpecialSymbols& specials() const { return specials_; }
  double coverage() const { return coverage_; }
  double threshold() const { return threshold_; }
  std::uint64_t corpus_total() const { return corpus_total_; }

  nlohmann::ordered_json to_json() const;
  static CharVocab from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static CharVocab load(const std::filesystem::path& path);

  bool operator==(const CharVocab& other) const;

 private:
  std::vector<char32_t> symbols_;
  std::vector<std::uint64_t> frequencies_;
  SpecialSymbols specials_;
  double coverage_;
  double threshold_;
  std::uint64_t corpus_total_;
  std::unordered_map<char32_t, TokenId> index_;
};

/// Smallest descending-frequency prefix whose share of all counted
/// characters reaches `cfg.coverage_threshold`.
CharVocab build_vocab(const FrequencyTable& freqs, const VocabConfig& cfg = {});

std::vector<TokenId> encode(const CharVocab& vocab, std::string_view text);

struct DecodeOptions {
  std::string mask = "[MASK]";
  std::string pad;
  std::string unk = "\xEF\xBF\xBD";  // U+FFFD
  std::string bos;
  std::string eos;
};

std::string decode(const CharVocab& vocab, std::span<const TokenId> ids,
                   const DecodeOptions& options = {});

/// Unicode script name of a code point ("Latin", "Hebrew", ...). Common and
/// Inherited characters map to "Other".
std::string script_of(char32_t c);

/// Percentage of non-whitespace character symbols per script.
std::map<std::string, double> script_report(const CharVocab& vocab);

}  // namespace charpipe
