#include "ftd/suite.hpp"

namespace ftd::suite {

void write_table(const experiments::Table& table, const std::filesystem::path& dir,
                 const std::vector<report::ReportFormat>& formats) {
  for (auto f : formats) {
    report::write_text_file(dir / (table.id + "." + std::string(report::extension(f))),
                            report::emit_report(table, f));
  }
}

report::ManifestInfo manifest_info(const experiments::Pipeline& pipeline, const std::string& cdi_mode) {
  const auto& opts = pipeline.options();
  report::ManifestInfo info;
  info.seed = opts.cv.seed;
  info.alpha = opts.cv.alpha;
  info.provider = pipeline.provider().identity();
  info.corpus_hash = corpus::corpus_hash(pipeline.corpus());
  info.sessions = pipeline.corpus().sessions.size();
  info.participants = pipeline.corpus().participants().size();
  info.phase_source_duration_s = experiments::phase_source_duration(pipeline);
  info.cdi_signs = opts.features.cdi_signs;
  info.cdi_signs_mode = cdi_mode;
  return info;
}

std::vector<experiments::Table> run_all(const corpus::Corpus& corpus,
                                        std::shared_ptr<const embed::Provider> provider,
                                        const SuiteOptions& options,
                                        const std::filesystem::path& out_dir) {
  experiments::Pipeline pipeline(corpus, std::move(provider), options.pipeline);
  std::vector<experiments::Table> tables;
  tables.push_back(experiments::run_label_correlations(corpus, options.pipeline.cv.alpha));
  tables.push_back(experiments::run_task_comparison(pipeline));
  tables.push_back(experiments::run_duration_comparison(pipeline));
  tables.push_back(experiments::run_phase_comparison(pipeline));
  tables.push_back(experiments::run_ablation(pipeline));

  std::filesystem::create_directories(out_dir);
  for (const auto& t : tables) write_table(t, out_dir, options.formats);
  const auto summary = corpus::summarize(corpus);
  const auto flags = corpus::flag_cutoffs(corpus);
  for (auto f : options.formats) {
    report::write_text_file(out_dir / ("table1_summary." + std::string(report::extension(f))),
                            report::emit_summary(summary, flags, f));
  }
  report::write_text_file(out_dir / "manifest.json",
                          report::emit_manifest(manifest_info(pipeline, options.cdi_signs_mode), tables));
  return tables;
}

}  // namespace ftd::suite
