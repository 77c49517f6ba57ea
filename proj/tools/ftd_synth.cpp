#include <iostream>

#include "CLI11.hpp"
#include "ftd/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic pre-tagged corpus with a planted signal"};
  ftd::synthetic::SyntheticConfig config;
  std::string out_dir = ".";
  std::string planted_task = "negative";
  app.add_option("--out-dir", out_dir, "Directory receiving corpus.jsonl and labels.jsonl")->capture_default_str();
  app.add_option("--participants", config.participants, "Number of participants")->capture_default_str();
  app.add_option("--seed", config.seed, "Generator seed")->capture_default_str();
  app.add_option("--durations", config.durations, "Duration buckets in seconds")->capture_default_str();
  app.add_option("--planted-task", planted_task, "Task carrying the planted signal")
      ->check(CLI::IsMember({"dream", "favorite", "negative", "mistake"}))
      ->capture_default_str();
  app.add_option("--strength", config.strength, "Planted signal strength (0 disables)")->capture_default_str();
  app.add_flag("--timestamps", config.timestamps, "Attach per-token timestamps");
  CLI11_PARSE(app, argc, argv);

  try {
    config.planted_task = *ftd::parse_task(planted_task);
    const auto corpus = ftd::synthetic::generate(config);
    std::filesystem::create_directories(out_dir);
    ftd::corpus::write_jsonl(corpus, std::filesystem::path(out_dir) / "corpus.jsonl",
                             std::filesystem::path(out_dir) / "labels.jsonl");
    std::cout << corpus.sessions.size() << " sessions, " << corpus.labels.size() << " participants\n";
  } catch (const std::exception& e) {
    std::cerr << "ftd_synth: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
