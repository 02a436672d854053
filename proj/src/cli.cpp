#include "charpipe/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "charpipe/aggregate.hpp"
#include "charpipe/corpus.hpp"
#include "charpipe/errors.hpp"
#include "charpipe/labelmap.hpp"
#include "charpipe/masker.hpp"
#include "charpipe/metrics.hpp"
#include "charpipe/vocab.hpp"

namespace charpipe::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// A flag value outside its range; exit code 1.
class FlagError : public Error {
 public:
  FlagError(const std::string& flag, const std::string& what)
      : Error(flag + ": " + what) {}
};

// Input that cannot be read or understood; exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Writes to a sibling temporary file and renames it over the target on commit.
class AtomicOutput {
 public:
  explicit AtomicOutput(fs::path target)
      : target_(std::move(target)),
        temp_(target_.string() + ".tmp." + std::to_string(::getpid())) {
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot write " + temp_.string());
  }
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;
  ~AtomicOutput() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(temp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.close();
    if (!out_) throw DataError("failed writing " + temp_.string());
    fs::rename(temp_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void check_output_path(const std::string& flag, const std::string& path) {
  const fs::path parent = fs::absolute(fs::path(path)).parent_path();
  if (!fs::is_directory(parent)) {
    throw FlagError(flag, "directory " + parent.string() + " does not exist");
  }
  if (::access(parent.c_str(), W_OK) != 0) {
    throw FlagError(flag, "directory " + parent.string() + " is not writable");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

template <class Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      fn(json::parse(line), line_no);
    } catch (const json::exception& e) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void print_report(std::ostream& err, const ordered_json& report) {
  err << report.dump() << '\n';
}

// ---------------------------------------------------------------- build-vocab

int build_vocab_command(const PipelineConfig& cfg, std::ostream& err) {
  if (!(cfg.coverage > 0.0 && cfg.coverage <= 1.0)) {
    throw FlagError("--coverage", "must be in (0, 1]");
  }
  check_output_path("--output", cfg.output);

  FrequencyTable freqs;
  for (const auto& path : cfg.inputs) {
    auto in = open_input(path);
    try {
      freqs.merge(count_chars(in, CountOptions{cfg.nfc}));
    } catch (const DecodeError& e) {
      throw DataError(path + ": " + e.what());
    }
  }
  if (freqs.empty()) throw DataError("no characters in input");

  VocabConfig vc;
  vc.coverage_threshold = cfg.coverage;
  const CharVocab vocab = build_vocab(freqs, vc);

  AtomicOutput out(cfg.output);
  out.stream() << vocab.to_json().dump(1) << '\n';
  out.commit();

  if (cfg.report) {
    ordered_json report;
    report["subcommand"] = "build-vocab";
    report["characters"] = freqs.total();
    report["distinct"] = freqs.distinct();
    report["symbols"] = vocab.symbols().size();
    report["vocab_size"] = vocab.size();
    report["coverage"] = vocab.coverage();
    report["scripts"] = script_report(vocab);
    print_report(err, report);
  }
  return kSuccess;
}

// ----------------------------------------------------------------------- mask

int mask_command(const PipelineConfig& cfg, std::ostream& err) {
  if (!(cfg.lambda > 0.0)) throw FlagError("--lambda", "must be positive");
  if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0)) throw FlagError("--ratio", "must be in (0, 1)");
  if (cfg.max_len == 0) throw FlagError("--max-len", "must be positive");
  if (cfg.threads == 0) throw FlagError("--threads", "must be positive");
  check_output_path("--output", cfg.output);

  CharVocab vocab = [&] {
    try {
      return CharVocab::load(cfg.vocab);
    } catch (const Error& e) {
      throw DataError(cfg.vocab + ": " + e.what());
    }
  }();

  MaskingConfig mc;
  mc.lambda = cfg.lambda;
  mc.mask_ratio = cfg.ratio;
  mc.seed = cfg.seed;
  CorpusMaskingOptions options;
  options.max_len = cfg.max_len;
  options.workers = cfg.threads;

  AtomicOutput out(cfg.output);
  CorpusMaskingStats stats;
  for (const auto& path : cfg.inputs) {
    auto in = open_input(path);
    try {
      const auto s = mask_corpus(in, vocab, mc, options, [&](const MaskedExample& ex) {
        out.stream() << to_json(ex).dump() << '\n';
      });
      stats.documents += s.documents;
      stats.examples += s.examples;
      stats.characters += s.characters;
      stats.masked += s.masked;
      stats.unknown += s.unknown;
    } catch (const DecodeError& e) {
      throw DataError(path + ": " + e.what());
    }
    // Later files continue the window numbering so seeds never repeat.
    mc.seed = hash_combine(mc.seed, stats.examples);
  }
  out.commit();

  if (cfg.report) {
    ordered_json report;
    report["subcommand"] = "mask";
    report["documents"] = stats.documents;
    report["examples"] = stats.examples;
    report["characters"] = stats.characters;
    report["masked"] = stats.masked;
    report["unknown"] = stats.unknown;
    report["masked_fraction"] =
        stats.characters ? static_cast<double>(stats.masked) / static_cast<double>(stats.characters)
                         : 0.0;
    print_report(err, report);
  }
  return kSuccess;
}

// ----------------------------------------------------------------- map-labels

int map_labels_command(const PipelineConfig& cfg, std::ostream& err) {
  check_output_path("--output", cfg.output);
  const Scheme scheme = parse_scheme(cfg.scheme);
  const LabelField field = LabelField::parse(cfg.field);

  AtomicOutput out(cfg.output);
  std::size_t sentences = 0, words = 0, skipped = 0;
  for (const auto& path : cfg.inputs) {
    Treebank tb;
    try {
      tb = read_conllu(path);
    } catch (const Error& e) {
      throw DataError(path + ": " + e.what());
    }
    for (const auto& s : tb.sentences) {
      const LabeledSentence labeled = map_sentence_lenient(s, scheme, field);
      ++sentences;
      words += s.words.size();
      skipped += labeled.skipped_words.size();
      out.stream() << to_json(labeled).dump() << '\n';
    }
  }
  out.commit();

  if (cfg.report) {
    ordered_json report;
    report["subcommand"] = "map-labels";
    report["sentences"] = sentences;
    report["words"] = words;
    report["skipped_words"] = skipped;
    report["alignment_errors"] = skipped;
    print_report(err, report);
  }
  return kSuccess;
}

// ------------------------------------------------------------------ aggregate

int aggregate_command(const PipelineConfig& cfg, std::ostream& err) {
  check_output_path("--output", cfg.output);
  const Heuristic heuristic = parse_heuristic(cfg.heuristic);
  const SpansReading reading =
      cfg.spans_strict_union ? SpansReading::StrictUnion : SpansReading::SkipInterior;

  AtomicOutput out(cfg.output);
  std::size_t sentences = 0, words = 0;
  for (const auto& path : cfg.inputs) {
    for_each_jsonl(path, [&](const json& j, std::size_t) {
      LabeledSentence s = labeled_sentence_from_json(j);
      std::vector<Multitag> result;
      for (auto& p : aggregate_sentence(s.labels.labels, heuristic, reading)) {
        result.push_back(std::move(p.result));
      }
      words += result.size();
      s.word_multitags = std::move(result);
      out.stream() << to_json(s).dump() << '\n';
      ++sentences;
    });
  }
  out.commit();

  if (cfg.report) {
    ordered_json report;
    report["subcommand"] = "aggregate";
    report["heuristic"] = to_string(heuristic);
    report["sentences"] = sentences;
    report["words"] = words;
    print_report(err, report);
  }
  return kSuccess;
}

// ---------------------------------------------------------------------- score

std::vector<std::vector<Multitag>> read_word_multitags(const std::string& path) {
  std::vector<std::vector<Multitag>> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    std::vector<Multitag> words;
    for (const auto& w : j.at("word_multitags")) {
      words.push_back(Multitag::parse(w.get<std::string>()));
    }
    out.push_back(std::move(words));
  });
  return out;
}

std::vector<std::vector<EntityMention>> read_mentions(const std::string& path) {
  std::vector<std::vector<EntityMention>> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    if (j.contains("mentions")) {
      std::vector<EntityMention> mentions;
      for (const auto& m : j.at("mentions")) {
        mentions.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>(),
                            m.at(2).get<std::string>()});
      }
      out.push_back(std::move(mentions));
    } else {
      const auto tags = j.at("tags").get<std::vector<std::string>>();
      out.push_back(decode_bio(tags));
    }
  });
  return out;
}

struct QARecord {
  std::optional<std::string> id;
  std::string prediction;
  std::vector<std::string> answers;
};

std::vector<QARecord> read_qa(const std::string& path, bool gold) {
  std::vector<QARecord> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    QARecord r;
    if (j.contains("id")) r.id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                                        : j.at("id").dump();
    if (gold) {
      r.answers = j.at("answers").get<std::vector<std::string>>();
      if (r.answers.empty()) throw DataError("gold record without answers");
    } else {
      r.prediction = j.at("prediction").get<std::string>();
    }
    out.push_back(std::move(r));
  });
  return out;
}

ordered_json score_report(const MsetScore& s, std::size_t n) {
  ordered_json report;
  report["precision"] = s.precision;
  report["recall"] = s.recall;
  report["f1"] = s.f1;
  report["n"] = n;
  return report;
}

int score_command(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.output.empty()) check_output_path("--output", cfg.output);
  ordered_json report;
  try {
    if (cfg.task == "morph") {
      const auto pred = read_word_multitags(cfg.pred);
      const auto gold = read_word_multitags(cfg.gold);
      std::size_t n = 0;
      for (const auto& s : gold) n += s.size();
      report = score_report(mset_f1(pred, gold), n);
    } else if (cfg.task == "ner") {
      const auto pred = read_mentions(cfg.pred);
      const auto gold = read_mentions(cfg.gold);
      report = score_report(ner_f1(pred, gold), gold.size());
    } else {
      const auto pred = read_qa(cfg.pred, false);
      const auto gold = read_qa(cfg.gold, true);
      const QAOptions options{cfg.english_articles};
      const bool by_id = std::all_of(pred.begin(), pred.end(), [](const auto& r) { return r.id.has_value(); }) &&
                         std::all_of(gold.begin(), gold.end(), [](const auto& r) { return r.id.has_value(); });
      std::vector<QAScore> scores;
      if (by_id) {
        std::map<std::string, std::string> predictions;
        for (const auto& r : pred) predictions[*r.id] = r.prediction;
        for (const auto& g : gold) {
          const auto it = predictions.find(*g.id);
          scores.push_back(qa_f1_em(it == predictions.end() ? "" : it->second, g.answers, options));
        }
      } else {
        if (pred.size() != gold.size()) {
          throw AlignmentError("prediction has " + std::to_string(pred.size()) +
                               " records, gold has " + std::to_string(gold.size()));
        }
        for (std::size_t i = 0; i < gold.size(); ++i) {
          scores.push_back(qa_f1_em(pred[i].prediction, gold[i].answers, options));
        }
      }
      const QAScore mean = qa_average(scores);
      report["precision"] = mean.precision;
      report["recall"] = mean.recall;
      report["f1"] = mean.f1;
      report["em"] = mean.em;
      report["n"] = scores.size();
    }
  } catch (const AlignmentError& e) {
    throw DataError(cfg.pred + " vs " + cfg.gold + ": " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(cfg.gold + ": " + e.what());
  }

  const std::string text = report.dump() + "\n";
  if (cfg.output.empty()) {
    out << text;
  } else {
    AtomicOutput file(cfg.output);
    file.stream() << text;
    file.commit();
  }
  if (cfg.report) err << text;
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  CLI::App app{"Character-level corpus preparation, label projection and scoring", "charpipe"};
  app.require_subcommand(1);

  auto add_report = [&](CLI::App* sub) {
    sub->add_flag("--report", cfg.report, "Print a JSON summary to standard error");
  };

  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build a coverage-based character vocabulary");
  vocab_cmd->add_option("--input", cfg.inputs, "UTF-8 text files")->required()->check(CLI::ExistingFile);
  vocab_cmd->add_option("--output", cfg.output, "Vocabulary JSON to write")->required();
  vocab_cmd->add_option("--coverage", cfg.coverage, "Cumulative frequency to cover")->capture_default_str();
  vocab_cmd->add_flag("--nfc", cfg.nfc, "NFC-normalize text before counting");
  add_report(vocab_cmd);

  auto* mask_cmd = app.add_subcommand("mask", "Span-mask newline-delimited documents into JSONL");
  mask_cmd->add_option("--input", cfg.inputs, "UTF-8 text files, one document per line")->required()->check(CLI::ExistingFile);
  mask_cmd->add_option("--vocab", cfg.vocab, "Vocabulary JSON")->required()->check(CLI::ExistingFile);
  mask_cmd->add_option("--output", cfg.output, "JSONL to write")->required();
  mask_cmd->add_option("--lambda", cfg.lambda, "Poisson mean of span lengths")->capture_default_str();
  mask_cmd->add_option("--ratio", cfg.ratio, "Fraction of positions to mask")->capture_default_str();
  mask_cmd->add_option("--seed", cfg.seed, "Master RNG seed")->capture_default_str();
  mask_cmd->add_option("--max-len", cfg.max_len, "Window length in characters")->capture_default_str();
  mask_cmd->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
  add_report(mask_cmd);

  auto* map_cmd = app.add_subcommand("map-labels", "Project CoNLL-U morpheme tags onto characters");
  map_cmd->add_option("--input", cfg.inputs, "CoNLL-U files")->required()->check(CLI::ExistingFile);
  map_cmd->add_option("--output", cfg.output, "JSONL to write")->required();
  map_cmd->add_option("--scheme", cfg.scheme, "multitag or segments")
      ->check(CLI::IsMember({"multitag", "segments"}))->capture_default_str();
  map_cmd->add_option("--field", cfg.field, "upos or a feature name")->capture_default_str();
  add_report(map_cmd);

  auto* agg_cmd = app.add_subcommand("aggregate", "Turn character labels into word multitags");
  agg_cmd->add_option("--input", cfg.inputs, "Label JSONL files")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--output", cfg.output, "JSONL to write")->required();
  agg_cmd->add_option("--heuristic", cfg.heuristic, "first, majority or spans")
      ->check(CLI::IsMember({"first", "majority", "spans"}))->capture_default_str();
  agg_cmd->add_flag("--spans-strict-union", cfg.spans_strict_union,
                    "Keep tags that only occur inside another tag's span");
  add_report(agg_cmd);

  auto* score_cmd = app.add_subcommand("score", "Score predictions against gold annotations");
  score_cmd->add_option("--task", cfg.task, "morph, ner or qa")
      ->required()->check(CLI::IsMember({"morph", "ner", "qa"}));
  score_cmd->add_option("--pred", cfg.pred, "Prediction JSONL")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--gold", cfg.gold, "Gold JSONL")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--output", cfg.output, "Also write the report here");
  score_cmd->add_flag("--english-articles", cfg.english_articles,
                      "QA: drop English articles during normalization");
  add_report(score_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    if (vocab_cmd->parsed()) {
      cfg.subcommand = "build-vocab";
      return build_vocab_command(cfg, err);
    }
    if (mask_cmd->parsed()) {
      cfg.subcommand = "mask";
      return mask_command(cfg, err);
    }
    if (map_cmd->parsed()) {
      cfg.subcommand = "map-labels";
      return map_labels_command(cfg, err);
    }
    if (agg_cmd->parsed()) {
      cfg.subcommand = "aggregate";
      return aggregate_command(cfg, err);
    }
    cfg.subcommand = "score";
    return score_command(cfg, out, err);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace charpipe::cli
