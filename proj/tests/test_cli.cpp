#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>
#include <sstream>

#include "charpipe/cli.hpp"
#include "charpipe/vocab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kFixtures = CHARPIPE_FIXTURES;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "charpipe");
  std::ostringstream out, err;
  const int code = charpipe::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("charpipe_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"mask", "--help"}).code == 0);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  const auto r = run({"build-vocab", "--output", "x.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--input") != std::string::npos);
}

TEST_CASE("build-vocab") {
  TempDir dir;
  const auto vocab = dir / "vocab.json";
  const auto r = run({"build-vocab", "--input", kFixtures + "/he_sample.txt", "--output", vocab,
                      "--report"});
  REQUIRE(r.code == 0);
  const auto v = charpipe::CharVocab::load(vocab);
  CHECK(v.coverage() >= 0.9993);
  const auto report = json::parse(r.err);
  CHECK(report.at("subcommand") == "build-vocab");
  CHECK(report.at("scripts").contains("Hebrew"));
  CHECK_FALSE(fs::exists(vocab + ".tmp." + std::to_string(::getpid())));

  SUBCASE("bad coverage names the flag") {
    const auto bad = run({"build-vocab", "--input", kFixtures + "/he_sample.txt", "--output",
                          dir / "v2.json", "--coverage", "1.5"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("--coverage") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "v2.json"));
  }
  SUBCASE("missing output directory") {
    CHECK(run({"build-vocab", "--input", kFixtures + "/he_sample.txt", "--output",
               dir / "nope/v.json"})
              .code == 1);
  }
  SUBCASE("invalid UTF-8 is a data error with a line number") {
    write(dir / "bad.txt", "ok\nbad \xC3\x28\n");
    const auto bad = run({"build-vocab", "--input", dir / "bad.txt", "--output", dir / "v3.json"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 2") != std::string::npos);
  }
}

TEST_CASE("mask") {
  TempDir dir;
  const auto vocab = dir / "vocab.json";
  REQUIRE(run({"build-vocab", "--input", kFixtures + "/he_sample.txt", "--output", vocab}).code == 0);

  auto mask = [&](const std::string& out, const std::string& threads, const std::string& seed) {
    return run({"mask", "--input", kFixtures + "/he_sample.txt", "--vocab", vocab, "--output", out,
                "--seed", seed, "--threads", threads, "--max-len", "64", "--report"});
  };
  REQUIRE(mask(dir / "a.jsonl", "1", "7").code == 0);
  REQUIRE(mask(dir / "b.jsonl", "4", "7").code == 0);
  REQUIRE(mask(dir / "c.jsonl", "1", "8").code == 0);
  const auto a = slurp(dir / "a.jsonl");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(dir / "b.jsonl"));
  CHECK(a != slurp(dir / "c.jsonl"));

  std::istringstream lines(a);
  std::string line;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    CHECK(j.at("masked").size() <= 64);
    CHECK_FALSE(j.at("targets").empty());
  }

  CHECK(run({"mask", "--input", kFixtures + "/he_sample.txt", "--vocab", vocab, "--output",
             dir / "d.jsonl", "--ratio", "0"})
            .code == 1);
  write(dir / "broken.json", "{");
  CHECK(run({"mask", "--input", kFixtures + "/he_sample.txt", "--vocab", dir / "broken.json",
             "--output", dir / "e.jsonl"})
            .code == 2);
}

TEST_CASE("map-labels reproduces the golden files") {
  TempDir dir;
  for (const std::string scheme : {"segments", "multitag"}) {
    const auto out = dir / (scheme + ".jsonl");
    const auto r = run({"map-labels", "--input", kFixtures + "/bbyt_hlbn.conllu", "--output", out,
                        "--scheme", scheme});
    REQUIRE(r.code == 0);
    CHECK(slurp(out) == slurp(kFixtures + "/bbyt_hlbn." + scheme + ".jsonl"));
  }
  CHECK(run({"map-labels", "--input", kFixtures + "/bbyt_hlbn.conllu", "--output", dir / "x.jsonl",
             "--scheme", "bytes"})
            .code == 1);

  write(dir / "bad.conllu", "1\tword\t_\tNOUN\t_\t_\t0\troot\n\n");
  const auto bad = run({"map-labels", "--input", dir / "bad.conllu", "--output", dir / "y.jsonl"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 1") != std::string::npos);
}

TEST_CASE("aggregate then score morph") {
  TempDir dir;
  const auto agg = dir / "agg.jsonl";
  REQUIRE(run({"aggregate", "--input", kFixtures + "/bbyt_hlbn.segments.jsonl", "--output", agg}).code ==
          0);
  const auto j = json::parse(slurp(agg));
  CHECK(j.at("word_multitags") == json::array({"ADP+DET+NN", "DET+ADJ"}));

  REQUIRE(run({"aggregate", "--input", kFixtures + "/bbyt_hlbn.segments.jsonl", "--output",
               dir / "first.jsonl", "--heuristic", "first"})
              .code == 0);
  CHECK(json::parse(slurp(dir / "first.jsonl")).at("word_multitags") ==
        json::array({"ADP+DET", "DET"}));

  const auto same = run({"score", "--task", "morph", "--pred", agg, "--gold", agg});
  REQUIRE(same.code == 0);
  CHECK(json::parse(same.out).at("f1") == 1.0);

  const auto partial =
      run({"score", "--task", "morph", "--pred", dir / "first.jsonl", "--gold", agg});
  REQUIRE(partial.code == 0);
  const auto s = json::parse(partial.out);
  CHECK(s.at("precision") == 1.0);
  CHECK(s.at("recall").get<double>() == doctest::Approx(3.0 / 5.0));
  CHECK(s.at("n") == 2);

  write(dir / "short.jsonl", R"({"word_multitags":["NN"]})" "\n");
  const auto mismatch = run({"score", "--task", "morph", "--pred", dir / "short.jsonl", "--gold", agg});
  CHECK(mismatch.code == 2);
  CHECK(mismatch.err.find("sentence 0") != std::string::npos);
}

TEST_CASE("score ner and qa") {
  TempDir dir;
  write(dir / "ner_gold.jsonl", R"({"tags":["B-PER","I-PER","O","B-LOC"]})" "\n");
  write(dir / "ner_pred.jsonl", R"({"mentions":[[0,2,"PER"]]})" "\n");
  const auto ner =
      run({"score", "--task", "ner", "--pred", dir / "ner_pred.jsonl", "--gold", dir / "ner_gold.jsonl"});
  REQUIRE(ner.code == 0);
  const auto n = json::parse(ner.out);
  CHECK(n.at("precision") == 1.0);
  CHECK(n.at("recall") == 0.5);

  write(dir / "qa_gold.jsonl",
        R"({"id":"q1","answers":["the white house"]})" "\n" R"({"id":"q2","answers":["Paris"]})" "\n");
  write(dir / "qa_pred.jsonl", R"({"id":"q2","prediction":"paris."})" "\n"
                               R"({"id":"q1","prediction":"white house"})" "\n");
  const auto qa = run({"score", "--task", "qa", "--pred", dir / "qa_pred.jsonl", "--gold",
                       dir / "qa_gold.jsonl", "--output", dir / "qa.json"});
  REQUIRE(qa.code == 0);
  const auto q = json::parse(slurp(dir / "qa.json"));
  CHECK(q.at("em") == 0.5);
  CHECK(q.at("f1").get<double>() == doctest::Approx(0.9));
  CHECK(q.at("n") == 2);

  const auto articles = run({"score", "--task", "qa", "--pred", dir / "qa_pred.jsonl", "--gold",
                             dir / "qa_gold.jsonl", "--english-articles"});
  REQUIRE(articles.code == 0);
  CHECK(json::parse(articles.out).at("em") == 1.0);

  CHECK(run({"score", "--task", "pos", "--pred", dir / "qa_pred.jsonl", "--gold",
             dir / "qa_gold.jsonl"})
            .code == 1);
  write(dir / "junk.jsonl", "not json\n");
  const auto junk =
      run({"score", "--task", "qa", "--pred", dir / "junk.jsonl", "--gold", dir / "qa_gold.jsonl"});
  CHECK(junk.code == 2);
  CHECK(junk.err.find("line 1") != std::string::npos);
}
