#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ftd/experiments.hpp"
#include "ftd/features.hpp"
#include "ftd/parallel.hpp"
#include "ftd/report.hpp"
#include "ftd/suite.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kEnvService = "FTD_EMBED_SERVICE";
constexpr const char* kEnvOutput = "FTD_OUTPUT_DIR";

struct RawOptions {
  std::optional<std::string> config;
  std::optional<std::string> corpus;
  std::optional<std::string> labels;
  std::optional<std::string> provider;
  std::optional<std::string> embed_file;
  std::optional<std::string> service_cmd;
  std::optional<std::size_t> embed_dim;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::size_t> jobs;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::string> tagset;
  std::optional<std::string> negation_lexicon;
  std::optional<std::string> cdi_signs;
  bool strict_tags = false;

  std::optional<std::string> target;
  std::optional<std::string> task;
  std::optional<int> duration;
};

struct RunConfig {
  fs::path corpus;
  fs::path labels;
  std::string provider;
  fs::path embed_file;
  std::string service_cmd;
  std::size_t embed_dim = 64;
  std::uint64_t seed = ftd::ml::kDefaultSeed;
  double alpha = ftd::ml::kDefaultAlpha;
  std::size_t jobs = 1;
  std::vector<ftd::report::ReportFormat> formats;
  fs::path out;
  std::optional<fs::path> tagset;
  std::optional<fs::path> negation_lexicon;
  std::string cdi_signs;
  bool strict_tags = false;
};

template <typename T>
T resolve(const std::optional<T>& flag, const char* env, const json& config, const char* key,
          T fallback) {
  if (flag) return *flag;
  if (env) {
    if (const char* v = std::getenv(env); v && *v) {
      if constexpr (std::is_same_v<T, std::string>) return std::string(v);
    }
  }
  if (config.contains(key)) {
    try {
      return config.at(key).get<T>();
    } catch (const json::exception&) {
      throw ftd::Error(std::string("config: wrong type for '") + key + "'");
    }
  }
  return fallback;
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw ftd::Error(std::string(what) + " not found: " + p.string());
}

RunConfig build_config(const RawOptions& raw) {
  json cfg = json::object();
  if (raw.config) {
    std::ifstream in(*raw.config);
    if (!in) throw ftd::Error("cannot read config file '" + *raw.config + "'");
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw ftd::Error("config file '" + *raw.config + "': " + e.what());
    }
    if (!cfg.is_object()) throw ftd::Error("config file must hold a JSON object");
    static const std::set<std::string> known = {
        "corpus", "labels", "provider", "embed-file", "service-cmd", "embed-dim", "seed", "alpha",
        "jobs", "format", "out", "tagset", "negation-lexicon", "cdi-signs", "strict-tags"};
    for (const auto& [k, v] : cfg.items()) {
      if (!known.count(k)) throw ftd::Error("config: unknown key '" + k + "'");
    }
  }
  const std::string data_dir = FTD_DATA_DIR;
  RunConfig rc;
  rc.corpus = resolve<std::string>(raw.corpus, nullptr, cfg, "corpus", data_dir + "/synthetic/corpus.jsonl");
  rc.labels = resolve<std::string>(raw.labels, nullptr, cfg, "labels", data_dir + "/synthetic/labels.jsonl");
  rc.provider = resolve<std::string>(raw.provider, nullptr, cfg, "provider", "test");
  rc.embed_file = resolve<std::string>(raw.embed_file, nullptr, cfg, "embed-file", "");
  rc.service_cmd = resolve<std::string>(raw.service_cmd, kEnvService, cfg, "service-cmd", "");
  rc.embed_dim = resolve<std::size_t>(raw.embed_dim, nullptr, cfg, "embed-dim", 64);
  rc.seed = resolve<std::uint64_t>(raw.seed, nullptr, cfg, "seed", ftd::ml::kDefaultSeed);
  rc.alpha = resolve<double>(raw.alpha, nullptr, cfg, "alpha", ftd::ml::kDefaultAlpha);
  rc.jobs = resolve<std::size_t>(raw.jobs, nullptr, cfg, "jobs", ftd::default_jobs());
  rc.out = resolve<std::string>(raw.out, kEnvOutput, cfg, "out", "reports");
  rc.cdi_signs = resolve<std::string>(raw.cdi_signs, nullptr, cfg, "cdi-signs", "published");
  rc.strict_tags = raw.strict_tags || (cfg.contains("strict-tags") && cfg["strict-tags"].get<bool>());
  const std::string tagset = resolve<std::string>(raw.tagset, nullptr, cfg, "tagset", "");
  const std::string lexicon = resolve<std::string>(raw.negation_lexicon, nullptr, cfg, "negation-lexicon", "");
  if (!tagset.empty()) rc.tagset = tagset;
  if (!lexicon.empty()) rc.negation_lexicon = lexicon;

  const std::string format = resolve<std::string>(raw.format, nullptr, cfg, "format", "both");
  if (format == "both") {
    rc.formats = {ftd::report::ReportFormat::csv, ftd::report::ReportFormat::markdown};
  } else if (auto f = ftd::report::parse_format(format)) {
    rc.formats = {*f};
  } else {
    throw ftd::Error("--format must be csv, md or both, got '" + format + "'");
  }

  require_file(rc.corpus, "corpus file");
  require_file(rc.labels, "labels file");
  if (rc.tagset) require_file(*rc.tagset, "tagset mapping");
  if (rc.negation_lexicon) require_file(*rc.negation_lexicon, "negation lexicon");
  if (rc.provider == "file") {
    if (rc.embed_file.empty()) throw ftd::Error("--provider file needs --embed-file");
    require_file(rc.embed_file, "embedding file");
  } else if (rc.provider == "service") {
    if (rc.service_cmd.empty())
      throw ftd::Error("--provider service needs --service-cmd or " + std::string(kEnvService));
  } else if (rc.provider != "test") {
    throw ftd::Error("--provider must be test, file or service, got '" + rc.provider + "'");
  }
  if (rc.embed_dim == 0) throw ftd::Error("--embed-dim must be positive");
  if (!(rc.alpha > 0.0 && rc.alpha < 1.0)) throw ftd::Error("--alpha must lie in (0, 1)");
  if (rc.jobs == 0) throw ftd::Error("--jobs must be positive");
  if (rc.cdi_signs != "published" && rc.cdi_signs != "derived")
    throw ftd::Error("--cdi-signs must be published or derived");
  return rc;
}

ftd::corpus::Corpus load(const RunConfig& rc, std::vector<ftd::corpus::RowIssue>* rejects = nullptr) {
  auto result = ftd::corpus::load_corpus(rc.corpus, rc.labels);
  for (const auto& r : result.rejects) std::cerr << "reject: " << r.describe() << '\n';
  if (rejects) *rejects = result.rejects;
  return std::move(result.corpus);
}

std::shared_ptr<const ftd::embed::Provider> make_provider(const RunConfig& rc) {
  if (rc.provider == "file") return ftd::embed::PrecomputedProvider::load(rc.embed_file);
  if (rc.provider == "service") {
    ftd::embed::ServiceConfig sc;
    sc.command = rc.service_cmd;
    return std::make_shared<ftd::embed::CachingProvider>(
        std::make_shared<ftd::embed::ServiceProvider>(sc));
  }
  return ftd::embed::test_embedder(rc.seed, rc.embed_dim);
}

struct Context {
  RunConfig rc;
  ftd::corpus::Corpus corpus;
  std::optional<ftd::text::TagsetMapping> mapping;
  ftd::experiments::PipelineOptions options;

  explicit Context(RunConfig config) : rc(std::move(config)), corpus(load(rc)) {
    auto& fc = options.features;
    if (rc.tagset) {
      mapping = ftd::text::TagsetMapping::load(*rc.tagset);
      fc.mapping = &*mapping;
    }
    if (rc.negation_lexicon) fc.text.negation_lexicon = ftd::text::TextOptions::load_lexicon(*rc.negation_lexicon);
    fc.text.strict_tags = rc.strict_tags;
    options.cv.seed = rc.seed;
    options.cv.alpha = rc.alpha;
    options.cv.jobs = rc.jobs;
    if (rc.cdi_signs == "derived") {
      std::vector<ftd::text::TokenizedTranscript> ts;
      for (const auto& s : corpus.sessions) ts.push_back(ftd::features::tokenize_session(s, fc));
      fc.cdi_signs.sign =
          ftd::features::derive_cdi_signs(ftd::features::cdi_term_matrix(ts), ftd::features::cdi_terms());
    }
  }
};

std::optional<ftd::Task> task_option(const std::optional<std::string>& name) {
  if (!name) return std::nullopt;
  auto t = ftd::parse_task(*name);
  if (!t) throw ftd::Error("unknown task '" + *name + "'");
  return t;
}

void print_written(const fs::path& dir, const std::string& stem,
                   const std::vector<ftd::report::ReportFormat>& formats) {
  for (auto f : formats) std::cout << "wrote " << (dir / (stem + "." + std::string(ftd::report::extension(f)))).string() << '\n';
}

std::string describe(const ftd::ml::CorrelationReport& r) {
  if (r.degenerate) return "degenerate (" + r.note + ")";
  return "rho=" + ftd::format_fixed(r.rho, 2) + " p=" + ftd::format_fixed(r.p_value, 4) +
         " n=" + std::to_string(r.n) + (r.significant ? " significant" : "");
}

int cmd_validate(const RunConfig& rc) {
  std::vector<ftd::corpus::RowIssue> rejects;
  const auto corpus = load(rc, &rejects);
  std::cout << corpus.sessions.size() << " sessions, " << corpus.participants().size()
            << " participants, " << rejects.size() << " rejects\n";
  return rejects.empty() ? 0 : 1;
}

int cmd_summarize(const RunConfig& rc) {
  const auto corpus = load(rc);
  const auto summary = ftd::corpus::summarize(corpus);
  const auto flags = ftd::corpus::flag_cutoffs(corpus);
  for (auto f : rc.formats) {
    ftd::report::write_text_file(rc.out / ("table1_summary." + std::string(ftd::report::extension(f))),
                                 ftd::report::emit_summary(summary, flags, f));
  }
  print_written(rc.out, "table1_summary", rc.formats);
  return 0;
}

int cmd_features(const RunConfig& rc, const RawOptions& raw) {
  Context ctx(rc);
  ftd::experiments::Pipeline pipeline(ctx.corpus, make_provider(rc), ctx.options);
  const auto rows = pipeline.select(task_option(raw.task), raw.duration);
  pipeline.prepare(rows);
  std::vector<const ftd::corpus::SessionRecord*> sessions;
  std::vector<ftd::features::FeatureVector> vectors;
  for (std::size_t i : rows) {
    sessions.push_back(&ctx.corpus.sessions[i]);
    vectors.push_back(pipeline.features(i));
  }
  std::ostringstream out;
  ftd::features::write_feature_csv(out, sessions, vectors);
  ftd::report::write_text_file(rc.out / "features.csv", out.str());
  std::cout << "wrote " << (rc.out / "features.csv").string() << " (" << rows.size() << " sessions)\n";
  return 0;
}

int cmd_correlate_labels(const RunConfig& rc) {
  const auto corpus = load(rc);
  const auto table = ftd::experiments::run_label_correlations(corpus, rc.alpha);
  ftd::suite::write_table(table, rc.out, rc.formats);
  print_written(rc.out, table.id, rc.formats);
  return 0;
}

int cmd_predict(const RunConfig& rc, const RawOptions& raw) {
  Context ctx(rc);
  ftd::experiments::Pipeline pipeline(ctx.corpus, make_provider(rc), ctx.options);
  ftd::experiments::ExperimentSpec spec;
  const std::string target_name = raw.target.value_or("odd_speech");
  const auto target = ftd::experiments::parse_target(target_name);
  if (!target) throw ftd::Error("unknown target '" + target_name + "'");
  spec.target = *target;
  spec.task_filter = task_option(raw.task);
  spec.duration_filter = raw.duration;
  const auto cell = pipeline.run_cell(spec);

  std::string stem = "predict_" + std::string(ftd::experiments::to_string(spec.target));
  if (spec.task_filter) stem += "_" + std::string(ftd::to_string(*spec.task_filter));
  if (spec.duration_filter) stem += "_" + std::to_string(*spec.duration_filter) + "s";

  ftd::experiments::Table table;
  table.id = stem;
  table.title = "Prediction";
  table.row_header = "Slice";
  table.row_labels = {(spec.task_filter ? std::string(ftd::to_string(*spec.task_filter)) : std::string("all")) +
                      (spec.duration_filter ? " " + std::to_string(*spec.duration_filter) + " sec." : "")};
  table.column_labels = {std::string(ftd::experiments::display_name(spec.target))};
  table.cells = {{cell}};
  ftd::suite::write_table(table, rc.out, rc.formats);
  print_written(rc.out, stem, rc.formats);
  if (cell.predictions) {
    std::ostringstream out;
    ftd::report::write_predictions_csv(out, *cell.predictions);
    ftd::report::write_text_file(rc.out / (stem + "_predictions.csv"), out.str());
    std::cout << "wrote " << (rc.out / (stem + "_predictions.csv")).string() << '\n';
  }
  std::cout << describe(cell.report) << '\n';
  return 0;
}

int cmd_table(const RunConfig& rc, const RawOptions& raw, const std::string& which) {
  Context ctx(rc);
  ftd::experiments::Pipeline pipeline(ctx.corpus, make_provider(rc), ctx.options);
  const auto task = task_option(raw.task);
  ftd::experiments::Table table;
  if (which == "tasks") {
    table = ftd::experiments::run_task_comparison(pipeline);
  } else if (which == "durations") {
    table = ftd::experiments::run_duration_comparison(pipeline, task.value_or(ftd::Task::negative));
  } else if (which == "phases") {
    table = ftd::experiments::run_phase_comparison(pipeline, task.value_or(ftd::Task::negative));
  } else {
    table = ftd::experiments::run_ablation(pipeline, task ? task : ftd::Task::negative, raw.duration);
  }
  ftd::suite::write_table(table, rc.out, rc.formats);
  print_written(rc.out, table.id, rc.formats);
  return 0;
}

int cmd_all(const RunConfig& rc) {
  Context ctx(rc);
  ftd::suite::SuiteOptions options;
  options.pipeline = ctx.options;
  options.formats = rc.formats;
  options.cdi_signs_mode = rc.cdi_signs;
  const auto tables = ftd::suite::run_all(ctx.corpus, make_provider(rc), options, rc.out);
  for (const auto& t : tables) print_written(rc.out, t.id, rc.formats);
  print_written(rc.out, "table1_summary", rc.formats);
  std::cout << "wrote " << (rc.out / "manifest.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech transcript features and schizotypy prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(
      "Precedence for every setting: flag > environment variable > config file > default.\n"
      "Config files are JSON objects keyed by flag name without dashes, e.g. {\"seed\": 7, \"embed-dim\": 32}.");

  RawOptions raw;
  app.add_option("--config", raw.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--corpus", raw.corpus, "Sessions file (.jsonl or .csv) [default: bundled synthetic corpus]");
  app.add_option("--labels", raw.labels, "Labels file (.jsonl or .csv) [default: bundled synthetic labels]");
  app.add_option("--provider", raw.provider, "Embedding backend: test, file or service [default: test]")
      ->check(CLI::IsMember({"test", "file", "service"}));
  app.add_option("--embed-file", raw.embed_file, "Precomputed embeddings for --provider file");
  app.add_option("--service-cmd", raw.service_cmd,
                 std::string("Command started for --provider service [env: ") + kEnvService + "]");
  app.add_option("--embed-dim", raw.embed_dim, "Vector size of the test embedder [default: 64]");
  app.add_option("--seed", raw.seed, "Seed for inner CV folds and the test embedder [default: 20230901]");
  app.add_option("--alpha", raw.alpha, "Significance level [default: 0.05]");
  app.add_option("--jobs", raw.jobs, "Worker threads [default: available parallelism]");
  app.add_option("--format", raw.format, "Report format: csv, md or both [default: both]")
      ->check(CLI::IsMember({"csv", "md", "both"}));
  app.add_option("--out", raw.out, std::string("Output directory [env: ") + kEnvOutput + "] [default: reports]");
  app.add_option("--tagset", raw.tagset, "Tag mapping table replacing the built-in one");
  app.add_option("--negation-lexicon", raw.negation_lexicon, "Negation surface forms, one per line");
  app.add_option("--cdi-signs", raw.cdi_signs, "CDIJ term signs: published or derived (first PCA) [default: published]")
      ->check(CLI::IsMember({"published", "derived"}));
  app.add_flag("--strict-tags", raw.strict_tags, "Fail on tags missing from the mapping instead of using 'other'");

  auto add_task = [&](CLI::App* sub, const char* help) {
    sub->add_option("--task", raw.task, help)->check(CLI::IsMember({"dream", "favorite", "negative", "mistake"}));
  };
  auto add_duration = [&](CLI::App* sub) {
    sub->add_option("--duration", raw.duration, "Keep sessions with this duration_limit_s");
  };

  auto* validate = app.add_subcommand("validate", "Load the corpus and report rejected rows");
  auto* summarize = app.add_subcommand("summarize", "Participant summary (table1_summary)");
  auto* features = app.add_subcommand("features", "Export the feature matrix (features.csv)");
  add_task(features, "Keep sessions of this task");
  add_duration(features);
  auto* correlate = app.add_subcommand("correlate-labels", "Spearman correlations between labels (table2_label_corr)");
  auto* predict = app.add_subcommand("predict", "One LOPO prediction cell plus its prediction CSV");
  predict->add_option("--target", raw.target, "spq_total, odd_speech or srs_total [default: odd_speech]")
      ->check(CLI::IsMember({"spq_total", "odd_speech", "srs_total"}));
  add_task(predict, "Keep sessions of this task");
  add_duration(predict);
  auto* tasks = app.add_subcommand("tasks", "Task comparison (table3_tasks)");
  auto* durations = app.add_subcommand("durations", "Duration comparison (table4_duration)");
  add_task(durations, "Task to analyse [default: negative]");
  auto* phases = app.add_subcommand("phases", "Phase comparison (table5_phase)");
  add_task(phases, "Task to analyse [default: negative]");
  auto* ablate = app.add_subcommand("ablate", "Feature-group ablation (table6_ablation)");
  add_task(ablate, "Task to analyse [default: negative]");
  add_duration(ablate);
  auto* all = app.add_subcommand("all", "Every table, the summary and manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig rc = build_config(raw);
    if (validate->parsed()) return cmd_validate(rc);
    if (summarize->parsed()) return cmd_summarize(rc);
    if (features->parsed()) return cmd_features(rc, raw);
    if (correlate->parsed()) return cmd_correlate_labels(rc);
    if (predict->parsed()) return cmd_predict(rc, raw);
    if (tasks->parsed()) return cmd_table(rc, raw, "tasks");
    if (durations->parsed()) return cmd_table(rc, raw, "durations");
    if (phases->parsed()) return cmd_table(rc, raw, "phases");
    if (ablate->parsed()) return cmd_table(rc, raw, "ablate");
    if (all->parsed()) return cmd_all(rc);
  } catch (const std::exception& e) {
    std::cerr << "ftd: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
