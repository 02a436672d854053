#include "charpipe/metrics.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <map>

#include "charpipe/errors.hpp"
#include "charpipe/utf8.hpp"

namespace charpipe {

MsetScore MsetScore::from_counts(std::uint64_t tp, std::uint64_t pred,
                                 std::uint64_t gold) {
  MsetScore s;
  s.true_positive = tp;
  s.pred_count = pred;
  s.gold_count = gold;
  s.precision = pred ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
  s.recall = gold ? static_cast<double>(tp) / static_cast<double>(gold) : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

MsetScore& MsetScore::operator+=(const MsetScore& other) {
  *this = from_counts(true_positive + other.true_positive,
                      pred_count + other.pred_count, gold_count + other.gold_count);
  return *this;
}

std::size_t multiset_overlap(const Multitag& a, const Multitag& b) {
  const auto ma = a.multiset();
  const auto mb = b.multiset();
  std::size_t overlap = 0;
  for (const auto& [tag, n] : ma) {
    const auto it = mb.find(tag);
    if (it != mb.end()) overlap += std::min(n, it->second);
  }
  return overlap;
}

MsetScore mset_f1(const std::vector<std::vector<Multitag>>& pred,
                  const std::vector<std::vector<Multitag>>& gold) {
  if (pred.size() != gold.size()) {
    throw AlignmentError("prediction has " + std::to_string(pred.size()) +
                         " sentences, gold has " + std::to_string(gold.size()));
  }
  std::uint64_t tp = 0, pc = 0, gc = 0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    if (pred[s].size() != gold[s].size()) {
      throw AlignmentError("sentence " + std::to_string(s) + ": prediction has " +
                           std::to_string(pred[s].size()) + " words, gold has " +
                           std::to_string(gold[s].size()));
    }
    for (std::size_t w = 0; w < pred[s].size(); ++w) {
      tp += multiset_overlap(pred[s][w], gold[s][w]);
      pc += pred[s][w].size();
      gc += gold[s][w].size();
    }
  }
  return MsetScore::from_counts(tp, pc, gc);
}

std::vector<EntityMention> decode_bio(std::span<const std::string> tags) {
  std::vector<EntityMention> mentions;
  bool open = false;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string_view tag = tags[i];
    const bool begin = tag.starts_with("B-");
    const bool inside = tag.starts_with("I-");
    const std::string_view type = (begin || inside) ? tag.substr(2) : std::string_view{};
    if (inside && open && mentions.back().type == type) {
      mentions.back().end = i + 1;
      continue;
    }
    open = false;
    if (begin) {
      mentions.push_back({i, i + 1, std::string(type)});
      open = true;
    }
  }
  return mentions;
}

namespace {

void check_mentions(const std::vector<EntityMention>& mentions, std::size_t sentence,
                    bool reject_overlap) {
  for (const auto& m : mentions) {
    if (m.begin >= m.end) {
      throw ConfigError("sentence " + std::to_string(sentence) + ": empty mention range");
    }
  }
  if (!reject_overlap) return;
  auto sorted = mentions;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].begin < sorted[i - 1].end) {
      throw ConfigError("sentence " + std::to_string(sentence) +
                        ": overlapping gold mentions");
    }
  }
}

}  // namespace

MsetScore ner_f1(const std::vector<std::vector<EntityMention>>& pred,
                 const std::vector<std::vector<EntityMention>>& gold) {
  if (pred.size() != gold.size()) {
    throw AlignmentError("prediction has " + std::to_string(pred.size()) +
                         " sentences, gold has " + std::to_string(gold.size()));
  }
  std::uint64_t tp = 0, pc = 0, gc = 0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    check_mentions(pred[s], s, false);
    check_mentions(gold[s], s, true);
    std::map<EntityMention, std::size_t> remaining;
    for (const auto& m : gold[s]) ++remaining[m];
    for (const auto& m : pred[s]) {
      auto it = remaining.find(m);
      if (it != remaining.end() && it->second > 0) {
        --it->second;
        ++tp;
      }
    }
    pc += pred[s].size();
    gc += gold[s].size();
  }
  return MsetScore::from_counts(tp, pc, gc);
}

namespace {

// ASCII characters stripped by the reference SQuAD script (string.punctuation).
bool is_ascii_punctuation(char32_t c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
         (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

std::vector<std::string> answer_tokens(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < normalized.size()) {
    auto end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    if (end > start) tokens.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

struct TokenScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

TokenScore token_f1(const std::vector<std::string>& pred,
                    const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) {
    const double same = pred.empty() && gold.empty() ? 1.0 : 0.0;
    return {same, same, same};
  }
  std::map<std::string_view, std::size_t> bag;
  for (const auto& t : gold) ++bag[t];
  std::size_t common = 0;
  for (const auto& t : pred) {
    auto it = bag.find(t);
    if (it != bag.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return {};
  TokenScore s;
  s.precision = static_cast<double>(common) / static_cast<double>(pred.size());
  s.recall = static_cast<double>(common) / static_cast<double>(gold.size());
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

std::string normalize_answer(std::string_view text, const QAOptions& options) {
  std::string stripped;
  utf8::for_each_code_point(text, [&](char32_t c) {
    const auto uc = static_cast<UChar32>(c);
    if (is_ascii_punctuation(c) || u_ispunct(uc)) return;
    if (u_isUWhiteSpace(uc)) {
      stripped += ' ';
      return;
    }
    utf8::append(stripped, static_cast<char32_t>(u_tolower(uc)));
  });
  std::string out;
  for (const auto& token : answer_tokens(stripped)) {
    if (options.remove_english_articles &&
        (token == "a" || token == "an" || token == "the")) {
      continue;
    }
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

QAScore qa_f1_em(std::string_view pred, std::span<const std::string> golds,
                 const QAOptions& options) {
  if (golds.empty()) throw ConfigError("QA scoring needs at least one gold answer");
  const std::string norm_pred = normalize_answer(pred, options);
  const auto pred_tokens = answer_tokens(norm_pred);
  QAScore best;
  bool first = true;
  for (const auto& gold : golds) {
    const std::string norm_gold = normalize_answer(gold, options);
    if (norm_gold == norm_pred) best.em = 1.0;
    const TokenScore s = token_f1(pred_tokens, answer_tokens(norm_gold));
    if (first || s.f1 > best.f1) {
      best.precision = s.precision;
      best.recall = s.recall;
      best.f1 = s.f1;
      first = false;
    }
  }
  return best;
}

QAScore qa_average(std::span<const QAScore> scores) {
  QAScore mean;
  if (scores.empty()) return mean;
  for (const auto& s : scores) {
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
    mean.em += s.em;
  }
  const auto n = static_cast<double>(scores.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  mean.em /= n;
  return mean;
}

}  // namespace charpipe
