#pragma once

#include <filesystem>
#include <vector>

#include "ftd/experiments.hpp"
#include "ftd/report.hpp"

namespace ftd::suite {

struct SuiteOptions {
  experiments::PipelineOptions pipeline;
  std::vector<report::ReportFormat> formats{report::ReportFormat::csv, report::ReportFormat::markdown};
  std::string cdi_signs_mode = "published";
};

/// Writes `<dir>/<table.id>.<ext>` for every requested format.
void write_table(const experiments::Table& table, const std::filesystem::path& dir,
                 const std::vector<report::ReportFormat>& formats);

report::ManifestInfo manifest_info(const experiments::Pipeline& pipeline, const std::string& cdi_mode);

/// Tables 2 to 6 plus the participant summary and manifest.json. The
/// output depends only on the corpus, provider and options, never on the
/// number of jobs.
std::vector<experiments::Table> run_all(const corpus::Corpus& corpus,
                                        std::shared_ptr<const embed::Provider> provider,
                                        const SuiteOptions& options,
                                        const std::filesystem::path& out_dir);

}  // namespace ftd::suite
