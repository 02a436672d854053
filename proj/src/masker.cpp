#include "charpipe/masker.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <string>
#include <thread>

#include "charpipe/errors.hpp"
#include "charpipe/utf8.hpp"

namespace charpipe {

void MaskingConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be positive");
  }
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) {
    throw ConfigError("mask ratio must be in (0, 1)");
  }
}

SpanDraw sample_span(Rng& rng, std::size_t seq_len, double lambda) {
  if (seq_len == 0) throw ConfigError("cannot sample a span in an empty sequence");
  SpanDraw draw;
  draw.start = static_cast<std::size_t>(rng.uniform_index(seq_len));
  do {
    draw.raw_length = static_cast<std::size_t>(rng.poisson(lambda));
  } while (draw.raw_length == 0);
  draw.length = std::min(draw.raw_length, seq_len - draw.start);
  return draw;
}

std::size_t mask_budget(double mask_ratio, std::size_t n) {
  // The epsilon keeps products such as 0.15 * 100 from rounding up to 16.
  const double raw = std::ceil(mask_ratio * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n);
}

MaskedExample mask_sequence(const MaskingConfig& cfg, std::span<const TokenId> ids,
                            const CharVocab& vocab, Rng& rng) {
  cfg.validate();
  if (ids.empty()) throw ConfigError("cannot mask an empty sequence");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const TokenId id = ids[i];
    if (!vocab.contains(id)) {
      throw Error("token id " + std::to_string(id) + " at position " +
                  std::to_string(i) + " is out of range");
    }
    if (vocab.is_special(id) && id != CharVocab::unk_id()) {
      throw Error("special token id " + std::to_string(id) + " at position " +
                  std::to_string(i) + " cannot be masked");
    }
  }

  const std::size_t n = ids.size();
  const std::size_t budget = mask_budget(cfg.mask_ratio, n);
  std::vector<bool> hit(n, false);
  std::size_t count = 0;
  while (count < budget) {
    const SpanDraw span = sample_span(rng, n, cfg.lambda);
    for (std::size_t i = span.start; i < span.start + span.length; ++i) {
      if (!hit[i]) {
        hit[i] = true;
        ++count;
      }
    }
  }

  MaskedExample ex;
  ex.original.assign(ids.begin(), ids.end());
  ex.masked = ex.original;
  ex.target_positions.reserve(count);
  ex.targets.reserve(count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!hit[i]) continue;
    ex.masked[i] = CharVocab::mask_id();
    ex.target_positions.push_back(i);
    ex.targets.push_back(ids[i]);
  }
  return ex;
}

MaskedExample mask_sequence(const MaskingConfig& cfg, std::span<const TokenId> ids,
                            const CharVocab& vocab) {
  Rng rng(cfg.seed);
  return mask_sequence(cfg, ids, vocab, rng);
}

std::uint64_t window_seed(std::uint64_t master_seed, std::uint64_t window_index) {
  return hash_combine(master_seed, window_index);
}

namespace {

struct Window {
  std::uint64_t index;
  std::vector<TokenId> ids;
};

std::vector<MaskedExample> mask_batch(const std::vector<Window>& batch,
                                      const CharVocab& vocab,
                                      const MaskingConfig& cfg, unsigned workers) {
  std::vector<MaskedExample> out(batch.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < batch.size(); i += stride) {
      Rng rng(window_seed(cfg.seed, batch[i].index));
      out[i] = mask_sequence(cfg, batch[i].ids, vocab, rng);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(batch.size())));
  if (workers == 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      threads.emplace_back([&, t] {
        try {
          work(t, workers);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

CorpusMaskingStats mask_corpus(std::istream& in, const CharVocab& vocab,
                               const MaskingConfig& cfg,
                               const CorpusMaskingOptions& options,
                               const ExampleSink& sink) {
  cfg.validate();
  if (options.max_len == 0) throw ConfigError("max length must be positive");

  CorpusMaskingStats stats;
  std::vector<Window> batch;
  std::uint64_t next_index = 0;
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_windows);

  auto flush = [&] {
    for (const auto& ex : mask_batch(batch, vocab, cfg, options.workers)) {
      stats.masked += ex.target_positions.size();
      sink(ex);
    }
    batch.clear();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<TokenId> ids;
    try {
      ids = encode(vocab, line);
    } catch (const DecodeError& e) {
      throw DecodeError("line " + std::to_string(line_no) + ": " + e.what(), e.offset());
    }
    ++stats.documents;
    stats.characters += ids.size();
    stats.unknown += static_cast<std::size_t>(
        std::count(ids.begin(), ids.end(), CharVocab::unk_id()));
    for (std::size_t begin = 0; begin < ids.size(); begin += options.max_len) {
      const std::size_t end = std::min(ids.size(), begin + options.max_len);
      batch.push_back({next_index++, {ids.begin() + static_cast<std::ptrdiff_t>(begin),
                                      ids.begin() + static_cast<std::ptrdiff_t>(end)}});
      ++stats.examples;
      if (batch.size() >= batch_size) flush();
    }
  }
  if (!batch.empty()) flush();
  return stats;
}

nlohmann::json to_json(const MaskedExample& example) {
  nlohmann::json targets = nlohmann::json::array();
  for (std::size_t i = 0; i < example.target_positions.size(); ++i) {
    targets.push_back({example.target_positions[i], example.targets[i]});
  }
  return {{"masked", example.masked}, {"targets", std::move(targets)}};
}

MaskedExample masked_example_from_json(const nlohmann::json& j) {
  MaskedExample ex;
  try {
    ex.masked = j.at("masked").get<std::vector<TokenId>>();
    ex.original = ex.masked;
    for (const auto& t : j.at("targets")) {
      const auto pos = t.at(0).get<std::size_t>();
      const auto id = t.at(1).get<TokenId>();
      if (pos >= ex.masked.size()) throw Error("target position out of range");
      ex.target_positions.push_back(pos);
      ex.targets.push_back(id);
      ex.original[pos] = id;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed masked example: ") + e.what());
  }
  return ex;
}

}  // namespace charpipe
