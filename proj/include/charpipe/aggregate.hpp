#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "charpipe/labelmap.hpp"
#include "charpipe/multitag.hpp"

namespace charpipe {

enum class Heuristic { First, Majority, Spans };

std::string_view to_string(Heuristic heuristic);
Heuristic parse_heuristic(std::string_view text);

/// How tags that occur only inside another tag's span are treated.
enum class SpansReading {
  /// Span interiors are skipped: (DET, NN, NN, VB, NN) -> DET+NN.
  SkipInterior,
  /// Every tag that occurs anywhere is kept: -> DET+NN+VB.
  StrictUnion,
};

/// Maximal runs of non-VOID labels, in order.
std::vector<std::vector<Multitag>> word_boundaries(std::span<const CharLabel> labels);

// Each aggregator throws ConfigError on empty input. Characters with an empty
// label carry no tags and are ignored; a word made only of them aggregates to
// an empty multitag.

/// Label of the first character.
Multitag agg_first(std::span<const Multitag> char_labels);

/// Most frequent whole label (compared by class key); ties go to the label
/// that occurs first.
Multitag agg_majority(std::span<const Multitag> char_labels);

/// Union of the tags that open a maximal span. Scanning left to right, every
/// tag at the current position opens a span ending at that tag's last
/// occurrence; the scan resumes after the longest of them. Tags come out in
/// order of first appearance, each once.
Multitag agg_spans(std::span<const Multitag> char_labels,
                   SpansReading reading = SpansReading::SkipInterior);

struct WordPrediction {
  std::size_t word_index = 0;
  std::vector<Multitag> char_labels;
  Heuristic heuristic = Heuristic::First;
  Multitag result;
};

Multitag aggregate_word(std::span<const Multitag> char_labels, Heuristic heuristic,
                        SpansReading reading = SpansReading::SkipInterior);

std::vector<WordPrediction> aggregate_sentence(
    std::span<const CharLabel> labels, Heuristic heuristic,
    SpansReading reading = SpansReading::SkipInterior);

}  // namespace charpipe
