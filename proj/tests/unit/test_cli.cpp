#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "ftd/synthetic.hpp"
#include "test_util.hpp"

using namespace ftd;
namespace fs = std::filesystem;

namespace {

struct CliFixture {
  fs::path dir = testutil::temp_dir("cli");
  fs::path corpus = dir / "corpus.jsonl";
  fs::path labels = dir / "labels.jsonl";

  CliFixture() {
    synthetic::SyntheticConfig c;
    c.participants = 6;
    c.tasks = {Task::negative, Task::favorite};
    c.durations = {60};
    std::ostringstream s, l;
    corpus::write_jsonl(synthetic::generate(c), s, l);
    testutil::write_file(corpus, s.str());
    testutil::write_file(labels, l.str());
  }

  testutil::CommandResult ftd(const std::string& args, const std::string& env = "") const {
    return testutil::run(env + " " + FTD_CLI_PATH + " --corpus " + corpus.string() + " --labels " +
                         labels.string() + " " + args);
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate reports counts") {
    CliFixture f;
    auto r = f.ftd("validate");
    CHECK(r.status == 0);
    CHECK(r.output.find("12 sessions, 6 participants, 0 rejects") != std::string::npos);

    testutil::write_file(f.dir / "bad.jsonl", testutil::read_file(f.corpus) + "{not json}\n");
    auto bad = testutil::run(std::string(FTD_CLI_PATH) + " validate --corpus " + (f.dir / "bad.jsonl").string() +
                             " --labels " + f.labels.string());
    CHECK(bad.status != 0);
    CHECK(bad.output.find("1 rejects") != std::string::npos);
  }

  TEST_CASE("predict writes a report and predictions") {
    CliFixture f;
    const auto out = f.dir / "out";
    auto r = f.ftd("predict --target odd_speech --task negative --duration 60 --out " + out.string());
    CHECK(r.status == 0);
    CHECK(fs::exists(out / "predict_odd_speech_negative_60s.csv"));
    CHECK(fs::exists(out / "predict_odd_speech_negative_60s.md"));
    const auto preds = testutil::read_file(out / "predict_odd_speech_negative_60s_predictions.csv");
    CHECK(std::count(preds.begin(), preds.end(), '\n') == 1 + 6);
  }

  TEST_CASE("unknown subcommands and bad values fail") {
    CliFixture f;
    CHECK(f.ftd("frobnicate").status != 0);
    CHECK(f.ftd("tasks --format html").status != 0);
    CHECK(f.ftd("predict --target iq").status != 0);
    CHECK(testutil::run(std::string(FTD_CLI_PATH) + " validate --corpus /nonexistent.jsonl").status != 0);
  }

  TEST_CASE("help lists every global flag") {
    auto r = testutil::run(std::string(FTD_CLI_PATH) + " --help");
    CHECK(r.status == 0);
    for (const char* flag : {"--config", "--corpus", "--labels", "--provider", "--embed-file", "--service-cmd",
                             "--embed-dim", "--seed", "--alpha", "--jobs", "--format", "--out", "--tagset",
                             "--negation-lexicon", "--cdi-signs", "--strict-tags"}) {
      CAPTURE(flag);
      CHECK(r.output.find(flag) != std::string::npos);
    }
    for (const char* sub : {"validate", "summarize", "features", "correlate-labels", "predict", "tasks",
                            "durations", "phases", "ablate", "all"}) {
      CHECK(r.output.find(sub) != std::string::npos);
    }
  }

  TEST_CASE("flag beats environment beats config") {
    CliFixture f;
    const auto cfg_out = f.dir / "from_config";
    const auto env_out = f.dir / "from_env";
    const auto flag_out = f.dir / "from_flag";
    testutil::write_file(f.dir / "config.json", "{\"out\": \"" + cfg_out.string() + "\", \"format\": \"csv\"}");
    const std::string config = "--config " + (f.dir / "config.json").string() + " ";

    CHECK(f.ftd(config + "correlate-labels").status == 0);
    CHECK(fs::exists(cfg_out / "table2_label_corr.csv"));
    CHECK_FALSE(fs::exists(cfg_out / "table2_label_corr.md"));

    CHECK(f.ftd(config + "correlate-labels", "FTD_OUTPUT_DIR=" + env_out.string()).status == 0);
    CHECK(fs::exists(env_out / "table2_label_corr.csv"));

    CHECK(f.ftd(config + "correlate-labels --out " + flag_out.string(), "FTD_OUTPUT_DIR=" + env_out.string())
              .status == 0);
    CHECK(fs::exists(flag_out / "table2_label_corr.csv"));

    testutil::write_file(f.dir / "typo.json", "{\"outt\": \"x\"}");
    CHECK(f.ftd("--config " + (f.dir / "typo.json").string() + " validate").status != 0);
  }

  TEST_CASE("table commands are idempotent") {
    CliFixture f;
    const auto a = f.dir / "a";
    const auto b = f.dir / "b";
    REQUIRE(f.ftd("tasks --jobs 1 --out " + a.string()).status == 0);
    REQUIRE(f.ftd("tasks --jobs 3 --out " + b.string()).status == 0);
    for (const char* name : {"table3_tasks.csv", "table3_tasks.md"}) {
      CHECK(testutil::read_file(a / name) == testutil::read_file(b / name));
      CHECK_FALSE(testutil::read_file(a / name).empty());
    }
  }

  TEST_CASE("features export") {
    CliFixture f;
    const auto out = f.dir / "feat";
    CHECK(f.ftd("features --task negative --out " + out.string()).status == 0);
    const auto csv = testutil::read_file(out / "features.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 6);
  }
}
