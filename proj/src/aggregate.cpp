#include "charpipe/aggregate.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "charpipe/errors.hpp"

namespace charpipe {

std::string_view to_string(Heuristic heuristic) {
  switch (heuristic) {
    case Heuristic::First: return "first";
    case Heuristic::Majority: return "majority";
    case Heuristic::Spans: return "spans";
  }
  return "";
}

Heuristic parse_heuristic(std::string_view text) {
  if (text == "first") return Heuristic::First;
  if (text == "majority") return Heuristic::Majority;
  if (text == "spans") return Heuristic::Spans;
  throw ConfigError("unknown heuristic '" + std::string(text) + "'");
}

std::vector<std::vector<Multitag>> word_boundaries(std::span<const CharLabel> labels) {
  std::vector<std::vector<Multitag>> words;
  bool in_word = false;
  for (const auto& label : labels) {
    if (label.is_void()) {
      in_word = false;
      continue;
    }
    if (!in_word) {
      words.emplace_back();
      in_word = true;
    }
    words.back().push_back(label.tags());
  }
  return words;
}

namespace {

void require_nonempty(std::span<const Multitag> char_labels) {
  if (char_labels.empty()) throw ConfigError("cannot aggregate an empty word");
}

}  // namespace

Multitag agg_first(std::span<const Multitag> char_labels) {
  require_nonempty(char_labels);
  for (const auto& label : char_labels) {
    if (!label.empty()) return label;
  }
  return {};
}

Multitag agg_majority(std::span<const Multitag> char_labels) {
  require_nonempty(char_labels);
  struct Tally {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Tally> votes;
  for (std::size_t i = 0; i < char_labels.size(); ++i) {
    if (char_labels[i].empty()) continue;
    auto [it, fresh] = votes.try_emplace(char_labels[i].class_key(), Tally{0, i});
    ++it->second.count;
  }
  if (votes.empty()) return {};
  const Tally* best = nullptr;
  for (const auto& [key, tally] : votes) {
    if (!best || tally.count > best->count ||
        (tally.count == best->count && tally.first < best->first)) {
      best = &tally;
    }
  }
  return char_labels[best->first];
}

Multitag agg_spans(std::span<const Multitag> char_labels, SpansReading reading) {
  require_nonempty(char_labels);
  std::vector<std::string> out;
  auto add = [&out](const std::string& tag) {
    if (std::find(out.begin(), out.end(), tag) == out.end()) out.push_back(tag);
  };

  if (reading == SpansReading::StrictUnion) {
    for (const auto& label : char_labels) {
      for (const auto& tag : label.tags()) add(tag);
    }
    return Multitag(std::move(out));
  }

  std::map<std::string, std::size_t> last;
  for (std::size_t i = 0; i < char_labels.size(); ++i) {
    for (const auto& tag : char_labels[i].tags()) last[tag] = i;
  }
  std::size_t i = 0;
  while (i < char_labels.size()) {
    std::size_t end = i;
    for (const auto& tag : char_labels[i].tags()) {
      add(tag);
      end = std::max(end, last[tag]);
    }
    i = end + 1;
  }
  return Multitag(std::move(out));
}

Multitag aggregate_word(std::span<const Multitag> char_labels, Heuristic heuristic,
                        SpansReading reading) {
  switch (heuristic) {
    case Heuristic::First: return agg_first(char_labels);
    case Heuristic::Majority: return agg_majority(char_labels);
    case Heuristic::Spans: return agg_spans(char_labels, reading);
  }
  throw ConfigError("unknown heuristic");
}

std::vector<WordPrediction> aggregate_sentence(std::span<const CharLabel> labels,
                                               Heuristic heuristic,
                                               SpansReading reading) {
  std::vector<WordPrediction> out;
  auto words = word_boundaries(labels);
  out.reserve(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    WordPrediction p;
    p.word_index = w;
    p.heuristic = heuristic;
    p.result = aggregate_word(words[w], heuristic, reading);
    p.char_labels = std::move(words[w]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace charpipe
