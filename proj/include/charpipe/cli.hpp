#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace charpipe::cli {

/// Exit codes of `run`.
enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,  // bad flag or parameter; message names the flag
  kDataError = 2,        // unreadable or malformed input; message carries file/line
};

/// Options shared by all subcommands, filled from the command line.
struct PipelineConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string output;
  std::string vocab;
  // build-vocab
  double coverage = 0.9993;
  bool nfc = false;
  // mask
  double lambda = 5.0;
  double ratio = 0.15;
  std::uint64_t seed = 0;
  std::size_t max_len = 2048;
  unsigned threads = 1;
  // map-labels / aggregate
  std::string scheme = "segments";
  std::string field = "upos";
  std::string heuristic = "spans";
  bool spans_strict_union = false;
  // score
  std::string task = "morph";
  std::string pred;
  std::string gold;
  bool english_articles = false;

  bool report = false;
};

/// Entry point of the `charpipe` tool. `argv[0]` is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace charpipe::cli
