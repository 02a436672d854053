#include "charpipe/corpus.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "charpipe/errors.hpp"
#include "charpipe/utf8.hpp"

namespace charpipe {

namespace {

constexpr std::size_t kColumns = 10;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<int> parse_positive_int(std::string_view s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 1 || s.front() == '+') {
    return std::nullopt;
  }
  return value;
}

struct RowId {
  enum class Kind { Single, Range, Empty } kind;
  int first = 0;
  int last = 0;
};

RowId parse_id(std::string_view id, std::size_t line) {
  if (const auto dash = id.find('-'); dash != std::string_view::npos) {
    auto first = parse_positive_int(id.substr(0, dash));
    auto last = parse_positive_int(id.substr(dash + 1));
    if (!first || !last || *last < *first) {
      throw ParseError("malformed range ID '" + std::string(id) + "'", line);
    }
    return {RowId::Kind::Range, *first, *last};
  }
  if (const auto dot = id.find('.'); dot != std::string_view::npos) {
    auto major = id.substr(0, dot);
    auto minor = parse_positive_int(id.substr(dot + 1));
    if (!minor || (major != "0" && !parse_positive_int(major))) {
      throw ParseError("malformed empty-node ID '" + std::string(id) + "'", line);
    }
    return {RowId::Kind::Empty, 0, 0};
  }
  auto value = parse_positive_int(id);
  if (!value) {
    throw ParseError("malformed ID '" + std::string(id) + "'", line);
  }
  return {RowId::Kind::Single, *value, *value};
}

FeatureList parse_feats(std::string_view column, std::size_t line) {
  FeatureList feats;
  if (column == "_") return feats;
  for (auto item : split(column, '|')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size() ||
        item.find('=', eq + 1) != std::string_view::npos) {
      throw ParseError("malformed feature '" + std::string(item) + "'", line);
    }
    feats.emplace_back(std::string(item.substr(0, eq)),
                       std::string(item.substr(eq + 1)));
  }
  return feats;
}

std::string format_feats(const FeatureList& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [name, value] : feats) {
    if (!out.empty()) out += '|';
    out += name;
    out += '=';
    out += value;
  }
  return out;
}

bool contains_whitespace(std::string_view s) {
  bool found = false;
  utf8::for_each_code_point(s, [&](char32_t c) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) found = true;
  });
  return found;
}

std::optional<std::string> parse_sent_id(std::string_view comment) {
  auto body = trim(comment.substr(1));
  constexpr std::string_view key = "sent_id";
  if (!body.starts_with(key)) return std::nullopt;
  body = trim(body.substr(key.size()));
  if (body.empty() || body.front() != '=') return std::nullopt;
  return std::string(trim(body.substr(1)));
}

class SentenceBuilder {
 public:
  bool empty() const { return comments_.empty() && words_.empty() && !range_; }

  void add_comment(std::string_view line, std::size_t line_no) {
    if (!words_.empty() || range_) {
      throw ParseError("comment line inside a sentence", line_no);
    }
    comments_.emplace_back(line);
  }

  void add_row(std::string_view line, std::size_t line_no) {
    const auto cols = split(line, '\t');
    if (cols.size() != kColumns) {
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_no);
    }
    const RowId id = parse_id(cols[0], line_no);
    switch (id.kind) {
      case RowId::Kind::Empty:
        return;
      case RowId::Kind::Range: {
        if (range_) throw_range_mismatch();
        if (id.first != expected_) {
          throw ParseError("range " + std::string(cols[0]) +
                               " does not start at expected ID " +
                               std::to_string(expected_),
                           line_no);
        }
        check_surface(cols[1], line_no);
        MorphWord word;
        word.surface = std::string(cols[1]);
        std::array<std::string, 8> rest;
        for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = cols[i + 2];
        word.range_columns = std::move(rest);
        range_ = PendingRange{id.last, line_no, std::move(word)};
        return;
      }
      case RowId::Kind::Single:
        break;
    }
    if (id.first != expected_) {
      throw ParseError("expected ID " + std::to_string(expected_) +
                           ", found " + std::string(cols[0]),
                       line_no);
    }
    ++expected_;
    Morpheme m = make_morpheme(id.first, cols, line_no);
    if (range_) {
      range_->word.morphemes.push_back(std::move(m));
      if (id.first == range_->last) {
        words_.push_back(std::move(range_->word));
        range_.reset();
      }
      return;
    }
    check_surface(m.form, line_no);
    MorphWord word;
    word.surface = m.form;
    word.morphemes.push_back(std::move(m));
    words_.push_back(std::move(word));
  }

  Sentence finish(std::size_t line_no) {
    if (range_) throw_range_mismatch();
    if (words_.empty()) {
      throw ParseError("sentence has comments but no tokens", line_no);
    }
    Sentence s = Sentence::from_words(std::move(words_), std::move(comments_));
    *this = SentenceBuilder();
    return s;
  }

 private:
  struct PendingRange {
    int last;
    std::size_t line;
    MorphWord word;
  };

  [[noreturn]] void throw_range_mismatch() const {
    const auto& w = range_->word;
    const int first = expected_ - static_cast<int>(w.morphemes.size());
    throw ParseError("multiword range " + std::to_string(first) + "-" +
                         std::to_string(range_->last) + " covers " +
                         std::to_string(range_->last - first + 1) +
                         " rows but only " +
                         std::to_string(w.morphemes.size()) + " follow it",
                     range_->line);
  }

  static void check_surface(std::string_view form, std::size_t line_no) {
    if (form.empty()) throw ParseError("empty FORM", line_no);
    if (contains_whitespace(form)) {
      throw ParseError("FORM '" + std::string(form) + "' contains whitespace",
                       line_no);
    }
  }

  static Morpheme make_morpheme(int index,
                                const std::vector<std::string_view>& cols,
                                std::size_t line_no) {
    if (cols[1].empty()) throw ParseError("empty FORM", line_no);
    Morpheme m;
    m.index = index;
    m.form = cols[1];
    m.lemma = cols[2];
    m.upos = cols[3];
    m.xpos = cols[4];
    m.feats = parse_feats(cols[5], line_no);
    m.head = cols[6];
    m.deprel = cols[7];
    m.deps = cols[8];
    m.misc = cols[9];
    return m;
  }

  std::vector<std::string> comments_;
  std::vector<MorphWord> words_;
  std::optional<PendingRange> range_;
  int expected_ = 1;
};

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

std::optional<std::string_view> Morpheme::feature(std::string_view name) const {
  for (const auto& [key, value] : feats) {
    if (key == name) return std::string_view(value);
  }
  return std::nullopt;
}

Sentence Sentence::from_words(std::vector<MorphWord> words,
                              std::vector<std::string> comments) {
  Sentence s;
  std::size_t offset = 0;
  for (auto& w : words) {
    if (!s.text.empty()) {
      s.text += ' ';
      ++offset;
    }
    const std::size_t n = utf8::length(w.surface);
    w.char_span = {offset, offset + n};
    offset += n;
    s.text += w.surface;
  }
  s.words = std::move(words);
  for (const auto& c : comments) {
    if (auto id = parse_sent_id(c)) s.sent_id = std::move(id);
  }
  s.comments = std::move(comments);
  return s;
}

Treebank parse_conllu(std::string_view text, std::string source) {
  if (const auto bad = utf8::find_invalid(text); bad != std::string_view::npos) {
    throw DecodeError("line " + std::to_string(line_of_offset(text, bad)) +
                          ": invalid UTF-8",
                      bad);
  }
  Treebank tb;
  tb.source = std::move(source);
  SentenceBuilder builder;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (trim(line).empty()) {
      if (!builder.empty()) tb.sentences.push_back(builder.finish(line_no));
    } else if (line.front() == '#') {
      builder.add_comment(line, line_no);
    } else {
      builder.add_row(line, line_no);
    }
  }
  if (!builder.empty()) tb.sentences.push_back(builder.finish(line_no));
  return tb;
}

Treebank read_conllu(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_conllu(buf.str(), path.string());
}

std::string serialize_conllu(const Treebank& treebank) {
  std::string out;
  for (const auto& s : treebank.sentences) {
    const bool has_id_comment =
        std::any_of(s.comments.begin(), s.comments.end(),
                    [](const std::string& c) { return parse_sent_id(c).has_value(); });
    if (s.sent_id && !has_id_comment) out += "# sent_id = " + *s.sent_id + "\n";
    for (const auto& c : s.comments) {
      out += c;
      out += '\n';
    }
    for (const auto& w : s.words) {
      if (w.range_columns) {
        out += std::to_string(w.morphemes.front().index) + "-" +
               std::to_string(w.morphemes.back().index) + "\t" + w.surface;
        for (const auto& col : *w.range_columns) {
          out += '\t';
          out += col;
        }
        out += '\n';
      }
      for (const auto& m : w.morphemes) {
        for (const std::string& col :
             {std::to_string(m.index), m.form, m.lemma, m.upos, m.xpos,
              format_feats(m.feats), m.head, m.deprel, m.deps}) {
          out += col;
          out += '\t';
        }
        out += m.misc;
        out += '\n';
      }
    }
    out += '\n';
  }
  return out;
}

LabelField LabelField::feature(std::string name) {
  if (name.empty()) throw ConfigError("feature name must not be empty");
  LabelField f;
  f.name_ = std::move(name);
  return f;
}

LabelField LabelField::parse(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "upos") return upos();
  return feature(std::string(text));
}

std::vector<std::string> extract_labels(const MorphWord& word,
                                        const LabelField& field) {
  std::vector<std::string> tags;
  tags.reserve(word.morphemes.size());
  for (const auto& m : word.morphemes) {
    if (field.is_upos()) {
      tags.push_back(m.upos);
    } else if (auto v = m.feature(field.feature_name())) {
      tags.emplace_back(*v);
    } else {
      tags.emplace_back(kMissingTag);
    }
  }
  return tags;
}

}  // namespace charpipe
