#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "charpipe/multitag.hpp"

namespace charpipe {

/// Micro-averaged precision/recall/F1 over counted items.
struct MsetScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t true_positive = 0;
  std::uint64_t pred_count = 0;
  std::uint64_t gold_count = 0;

  static MsetScore from_counts(std::uint64_t tp, std::uint64_t pred, std::uint64_t gold);
  MsetScore& operator+=(const MsetScore& other);
};

/// Size of the multiset intersection of two multitags.
std::size_t multiset_overlap(const Multitag& a, const Multitag& b);

/// Aligned multiset F1. `pred[s][w]` is the predicted multitag of word w in
/// sentence s. Throws AlignmentError when sentence or word counts differ.
MsetScore mset_f1(const std::vector<std::vector<Multitag>>& pred,
                  const std::vector<std::vector<Multitag>>& gold);

struct EntityMention {
  std::size_t begin = 0;  // word index
  std::size_t end = 0;    // one past the last word
  std::string type;

  bool operator==(const EntityMention&) const = default;
  auto operator<=>(const EntityMention&) const = default;
};

/// Mentions from per-word BIO tags: a B-X followed by any I-X. An I- tag that
/// does not continue a mention of the same type is ignored.
std::vector<EntityMention> decode_bio(std::span<const std::string> tags);

/// Exact (span, type) matching, micro-averaged over mentions. Throws
/// ConfigError if gold mentions overlap within a sentence.
MsetScore ner_f1(const std::vector<std::vector<EntityMention>>& pred,
                 const std::vector<std::vector<EntityMention>>& gold);

struct QAOptions {
  /// Drop English "a", "an", "the" tokens, as the SQuAD script does.
  bool remove_english_articles = false;
};

/// Lowercases, replaces Unicode punctuation with nothing and collapses
/// whitespace runs to single spaces.
std::string normalize_answer(std::string_view text, const QAOptions& options = {});

struct QAScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double em = 0.0;
};

/// Token F1 and exact match of one prediction, maximised over the golds.
QAScore qa_f1_em(std::string_view pred, std::span<const std::string> golds,
                 const QAOptions& options = {});

/// Mean of per-example scores.
QAScore qa_average(std::span<const QAScore> scores);

}  // namespace charpipe
