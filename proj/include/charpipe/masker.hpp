#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "charpipe/rng.hpp"
#include "charpipe/vocab.hpp"

namespace charpipe {

struct MaskingConfig {
  double lambda = 5.0;
  double mask_ratio = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SpanDraw {
  std::size_t start = 0;
  std::size_t length = 0;      // after clipping to the sequence end
  std::size_t raw_length = 0;  // the accepted Poisson draw, before clipping
};

/// Uniform start in [0, seq_len), then a Poisson(lambda) length redrawn while
/// zero and clipped at the sequence end.
SpanDraw sample_span(Rng& rng, std::size_t seq_len, double lambda);

struct MaskedExample {
  std::vector<TokenId> original;
  std::vector<TokenId> masked;
  std::vector<std::size_t> target_positions;  // ascending
  std::vector<TokenId> targets;

  double masked_fraction() const {
    return original.empty() ? 0.0
                            : static_cast<double>(target_positions.size()) /
                                  static_cast<double>(original.size());
  }
  bool operator==(const MaskedExample&) const = default;
};

/// Number of distinct positions that must be masked: ceil(ratio * n).
std::size_t mask_budget(double mask_ratio, std::size_t n);

/// Applies spans until the budget is met. Overlaps are allowed and each
/// position counts once. Throws if `ids` is empty or contains PAD, MASK, BOS
/// or EOS.
MaskedExample mask_sequence(const MaskingConfig& cfg, std::span<const TokenId> ids,
                            const CharVocab& vocab, Rng& rng);
/// Same, with an Rng seeded from `cfg.seed`.
MaskedExample mask_sequence(const MaskingConfig& cfg, std::span<const TokenId> ids,
                            const CharVocab& vocab);

/// Seed of the window with global index `window_index`.
std::uint64_t window_seed(std::uint64_t master_seed, std::uint64_t window_index);

struct CorpusMaskingOptions {
  std::size_t max_len = 2048;
  unsigned workers = 1;
  /// Windows buffered per parallel batch.
  std::size_t batch_windows = 1024;
};

struct CorpusMaskingStats {
  std::size_t documents = 0;
  std::size_t examples = 0;
  std::size_t characters = 0;
  std::size_t masked = 0;
  std::size_t unknown = 0;
};

using ExampleSink = std::function<void(const MaskedExample&)>;

/// Splits each line into windows of at most `max_len` characters, encodes and
/// masks them, and hands them to `sink` in input order. The output does not
/// depend on `workers`.
CorpusMaskingStats mask_corpus(std::istream& in, const CharVocab& vocab,
                               const MaskingConfig& cfg,
                               const CorpusMaskingOptions& options,
                               const ExampleSink& sink);

/// {"masked": [...], "targets": [[pos, id], ...]}
nlohmann::json to_json(const MaskedExample& example);
/// Inverse of to_json; the original sequence is restored by substitution.
MaskedExample masked_example_from_json(const nlohmann::json& j);

}  // namespace charpipe
