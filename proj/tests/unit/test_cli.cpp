#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../common/oracles.hpp"
#include "iarc/cli.hpp"
#include "iarc/json_util.hpp"

using namespace iarc;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("demo, validate and subcommands") {
  TempDir dir("cli");
  const std::string out = dir.file("demo");
  const auto demo = cli({"demo", "--seed", "7", "--out", out, "--batches", "8", "--steps", "60",
                         "--created-at", "2026-01-15T00:00:00Z"});
  INFO(demo.err);
  REQUIRE(demo.code == 0);
  CHECK(std::filesystem::exists(out + "/card.json"));
  CHECK(std::filesystem::exists(out + "/card.html"));

  const auto ok = cli({"validate", out + "/card.json"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);

  // A tampered card fails validation with exit 1.
  Json card = read_json_file(out + "/card.json");
  card.erase("evaluation");
  write_text_file(dir.file("bad.json"), card.dump());
  const auto bad = cli({"validate", dir.file("bad.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);

  const std::string cfg = out + "/inputs/config.json";
  const std::string work = dir.file("work");
  CHECK(cli({"ingest", "--config", cfg, "--out", work}).code == 0);
  CHECK(std::filesystem::exists(work + "/quality_raw.json"));
  CHECK(cli({"split", "--config", cfg, "--out", work}).code == 0);
  CHECK(std::filesystem::exists(work + "/splits.json"));
  CHECK(cli({"odd", "fit", "--config", cfg, "--out", work}).code == 0);
  CHECK(std::filesystem::exists(work + "/odd_model.json"));
  CHECK(cli({"scenarios", "build", "--config", cfg, "--out", work}).code == 0);
  CHECK(std::filesystem::exists(work + "/scenarios/index.json"));
  CHECK(cli({"drift", "--config", cfg, "--out", work}).code == 0);
  CHECK(std::filesystem::exists(work + "/drift.json"));
  CHECK(cli({"evaluate", "--config", cfg, "--out", work}).code == 0);
  CHECK(std::filesystem::exists(work + "/evaluation.json"));

  // card build from the config reproduces the demo card.
  const auto built = cli({"card", "build", "--config", cfg, "--out", work});
  INFO(built.err);
  CHECK(built.code == 0);
  CHECK(slurp(work + "/card.json") == slurp(out + "/card.json"));

  // Prediction files are the model boundary: evaluate from the written CSVs.
  const auto ext = cli({"evaluate", "--config", cfg, "--predictions", work + "/predictions",
                        "--out", dir.file("ext")});
  INFO(ext.err);
  CHECK(ext.code == 0);
}

TEST_CASE("usage errors exit 2") {
  const auto unknown = cli({"demo", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("--bogus") != std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);

  TempDir dir("cli2");
  const auto no_meta = cli({"card", "build", "--raw", dir.file("none.csv"), "--out", dir.path.string()});
  CHECK(no_meta.code == 2);
  CHECK(no_meta.err.find("metadata") != std::string::npos);

  CHECK(cli({"validate", dir.file("missing.json")}).code == 2);
}
