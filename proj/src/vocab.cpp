#include "charpipe/vocab.hpp"

#include <unicode/normalizer2.h>
#include <unicode/bytestream.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>

#include "charpipe/errors.hpp"
#include "charpipe/utf8.hpp"

namespace charpipe {

void FrequencyTable::add(char32_t c, std::uint64_t n) {
  if (n == 0) return;
  counts_[c] += n;
  total_ += n;
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [c, n] : other.counts_) add(c, n);
}

std::uint64_t FrequencyTable::count(char32_t c) const {
  const auto it = counts_.find(c);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<char32_t, std::uint64_t>> FrequencyTable::ranked() const {
  std::vector<std::pair<char32_t, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

std::string nfc_normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  std::string out;
  icu::StringByteSink<std::string> sink(&out);
  nfc->normalizeUTF8(0, icu::StringPiece(text.data(), static_cast<int32_t>(text.size())),
                     sink, nullptr, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  return out;
}

namespace {

// Dense counts for the BMP, sparse for the rest.
class Tally {
 public:
  Tally() : bmp_(0x10000, 0) {}

  void add(char32_t c) {
    if (c < 0x10000) {
      ++bmp_[c];
    } else {
      ++astral_[c];
    }
  }

  void add_text(std::string_view text) {
    utf8::for_each_code_point(text, [this](char32_t c) { add(c); });
  }

  FrequencyTable finish() const {
    FrequencyTable table;
    for (char32_t c = 0; c < bmp_.size(); ++c) table.add(c, bmp_[c]);
    for (const auto& [c, n] : astral_) table.add(c, n);
    return table;
  }

 private:
  std::vector<std::uint64_t> bmp_;
  std::unordered_map<char32_t, std::uint64_t> astral_;
};

}  // namespace

FrequencyTable count_chars(std::istream& in, const CountOptions& options) {
  Tally tally;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      if (options.nfc) {
        if (!utf8::is_valid(line)) utf8::throw_invalid(utf8::find_invalid(line));
        tally.add_text(nfc_normalize(line));
      } else {
        tally.add_text(line);
      }
    } catch (const DecodeError& e) {
      throw DecodeError("line " + std::to_string(line_no) + ": " + e.what(),
                        e.offset());
    }
    if (!in.eof()) tally.add(U'\n');
  }
  return tally.finish();
}

FrequencyTable count_chars(std::string_view text, const CountOptions& options) {
  if (options.nfc) {
    if (!utf8::is_valid(text)) utf8::throw_invalid(utf8::find_invalid(text));
    return count_chars(nfc_normalize(text), CountOptions{});
  }
  Tally tally;
  tally.add_text(text);
  return tally.finish();
}

const std::string& SpecialSymbols::name(Special s) const {
  switch (s) {
    case Special::Pad: return pad;
    case Special::Unk: return unk;
    case Special::Mask: return mask;
    case Special::Bos: return bos;
    case Special::Eos: return eos;
  }
  throw Error("unknown special symbol");
}

namespace {

constexpr std::array<Special, kNumSpecials> kSpecialOrder = {
    Special::Pad, Special::Unk, Special::Mask, Special::Bos, Special::Eos};
constexpr std::array<const char*, kNumSpecials> kSpecialKeys = {
    "PAD", "UNK", "MASK", "BOS", "EOS"};

void validate_specials(const SpecialSymbols& specials) {
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    const auto& a = specials.name(kSpecialOrder[i]);
    if (a.empty()) throw ConfigError("special symbol names must be non-empty");
    for (std::size_t j = i + 1; j < kNumSpecials; ++j) {
      if (a == specials.name(kSpecialOrder[j])) {
        throw ConfigError("special symbol '" + a + "' is used twice");
      }
    }
  }
}

}  // namespace

void VocabConfig::validate() const {
  if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0)) {
    throw ConfigError("coverage threshold must be in (0, 1]");
  }
  validate_specials(specials);
}

CharVocab::CharVocab(std::vector<char32_t> symbols,
                     std::vector<std::uint64_t> frequencies,
                     SpecialSymbols specials, double coverage, double threshold,
                     std::uint64_t corpus_total)
    : symbols_(std::move(symbols)),
      frequencies_(std::move(frequencies)),
      specials_(std::move(specials)),
      coverage_(coverage),
      threshold_(threshold),
      corpus_total_(corpus_total) {
  if (symbols_.size() != frequencies_.size()) {
    throw Error("vocabulary symbols and frequencies differ in length");
  }
  validate_specials(specials_);
  index_.reserve(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const auto id = static_cast<TokenId>(kNumSpecials + i);
    if (!index_.emplace(symbols_[i], id).second) {
      throw Error("duplicate vocabulary symbol U+" + std::to_string(symbols_[i]));
    }
    const std::string text = utf8::encode(symbols_[i]);
    for (Special s : kSpecialOrder) {
      if (specials_.name(s) == text) {
        throw Error("special symbol '" + text + "' collides with a character");
      }
    }
  }
}

std::optional<TokenId> CharVocab::find(char32_t c) const {
  const auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId CharVocab::id_of(char32_t c) const { return find(c).value_or(unk_id()); }

char32_t CharVocab::symbol_at(TokenId id) const {
  if (!contains(id)) throw Error("token id " + std::to_string(id) + " out of range");
  if (is_special(id)) throw Error("token id " + std::to_string(id) + " is a special symbol");
  return symbols_[id - kNumSpecials];
}

bool CharVocab::operator==(const CharVocab& other) const {
  return symbols_ == other.symbols_ && frequencies_ == other.frequencies_ &&
         specials_ == other.specials_ && coverage_ == other.coverage_ &&
         threshold_ == other.threshold_ && corpus_total_ == other.corpus_total_;
}

nlohmann::ordered_json CharVocab::to_json() const {
  nlohmann::ordered_json j;
  auto& symbols = j["symbols"] = nlohmann::ordered_json::array();
  for (char32_t c : symbols_) symbols.push_back(utf8::encode(c));
  j["frequencies"] = frequencies_;
  auto& specials = j["specials"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    specials[kSpecialKeys[i]] = {{"id", i}, {"symbol", specials_.name(kSpecialOrder[i])}};
  }
  j["coverage"] = coverage_;
  j["threshold"] = threshold_;
  j["total"] = corpus_total_;
  return j;
}

CharVocab CharVocab::from_json(const nlohmann::json& j) {
  try {
    std::vector<char32_t> symbols;
    for (const auto& s : j.at("symbols")) {
      const auto cps = utf8::decode(s.get<std::string>());
      if (cps.size() != 1) {
        throw Error("vocabulary symbol '" + s.get<std::string>() +
                    "' is not a single character");
      }
      symbols.push_back(cps.front());
    }
    SpecialSymbols specials;
    const auto& js = j.at("specials");
    for (std::size_t i = 0; i < kNumSpecials; ++i) {
      const auto& entry = js.at(kSpecialKeys[i]);
      if (entry.at("id").get<std::size_t>() != i) {
        throw Error(std::string("special ") + kSpecialKeys[i] + " has an unexpected id");
      }
      const auto name = entry.at("symbol").get<std::string>();
      switch (kSpecialOrder[i]) {
        case Special::Pad: specials.pad = name; break;
        case Special::Unk: specials.unk = name; break;
        case Special::Mask: specials.mask = name; break;
        case Special::Bos: specials.bos = name; break;
        case Special::Eos: specials.eos = name; break;
      }
    }
    return CharVocab(std::move(symbols),
                     j.at("frequencies").get<std::vector<std::uint64_t>>(),
                     std::move(specials), j.at("coverage").get<double>(),
                     j.at("threshold").get<double>(),
                     j.value("total", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed vocabulary: ") + e.what());
  }
}

void CharVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

CharVocab CharVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return from_json(j);
}

CharVocab build_vocab(const FrequencyTable& freqs, const VocabConfig& cfg) {
  cfg.validate();
  if (freqs.empty()) throw ConfigError("cannot build a vocabulary from an empty frequency table");
  const auto ranked = freqs.ranked();
  const auto total = static_cast<double>(freqs.total());

  std::vector<char32_t> symbols;
  std::vector<std::uint64_t> counts;
  std::uint64_t cumulative = 0;
  double coverage = 0.0;
  for (const auto& [c, n] : ranked) {
    symbols.push_back(c);
    counts.push_back(n);
    cumulative += n;
    coverage = static_cast<double>(cumulative) / total;
    if (coverage >= cfg.coverage_threshold) break;
  }
  return CharVocab(std::move(symbols), std::move(counts), cfg.specials, coverage,
                   cfg.coverage_threshold, freqs.total());
}

std::vector<TokenId> encode(const CharVocab& vocab, std::string_view text) {
  std::vector<TokenId> ids;
  ids.reserve(text.size());
  utf8::for_each_code_point(text, [&](char32_t c) { ids.push_back(vocab.id_of(c)); });
  return ids;
}

std::string decode(const CharVocab& vocab, std::span<const TokenId> ids,
                   const DecodeOptions& options) {
  std::string out;
  for (TokenId id : ids) {
    if (!vocab.contains(id)) {
      throw Error("token id " + std::to_string(id) + " out of range");
    }
    if (!vocab.is_special(id)) {
      utf8::append(out, vocab.symbol_at(id));
      continue;
    }
    switch (static_cast<Special>(id)) {
      case Special::Pad: out += options.pad; break;
      case Special::Unk: out += options.unk; break;
      case Special::Mask: out += options.mask; break;
      case Special::Bos: out += options.bos; break;
      case Special::Eos: out += options.eos; break;
    }
  }
  return out;
}

std::string script_of(char32_t c) {
  UErrorCode status = U_ZERO_ERROR;
  const UScriptCode code = uscript_getScript(static_cast<UChar32>(c), &status);
  if (U_FAILURE(status) || code == USCRIPT_COMMON || code == USCRIPT_INHERITED ||
      code == USCRIPT_UNKNOWN) {
    return "Other";
  }
  return uscript_getName(code);
}

std::map<std::string, double> script_report(const CharVocab& vocab) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (char32_t c : vocab.symbols()) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) continue;
    ++counts[script_of(c)];
    ++total;
  }
  std::map<std::string, double> report;
  for (const auto& [script, n] : counts) {
    report[script] = 100.0 * static_cast<double>(n) / static_cast<double>(total);
  }
  return report;
}

}  // namespace charpipe
