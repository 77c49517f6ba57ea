#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftd/corpus.hpp"
#include "ftd/experiments.hpp"

namespace ftd::report {

enum class ReportFormat { csv, markdown };

std::optional<ReportFormat> parse_format(std::string_view name);
std::string_view extension(ReportFormat format);

/// rho to 2 decimals and p to 4. Significant cells are bold in markdown and
/// flagged in csv; degenerate cells read "n/a".
std::string emit_report(const experiments::Table& table, ReportFormat format);

std::string emit_summary(const corpus::DemographicSummary& summary,
                         const std::map<std::string, corpus::CutoffFlags>& flags,
                         ReportFormat format);

void write_predictions_csv(std::ostream& out, const ml::PredictionResult& result);

/// Quotes a CSV field when it contains a separator, quote or line break.
std::string csv_field(std::string_view value);

struct ManifestInfo {
  std::uint64_t seed = 0;
  double alpha = ml::kDefaultAlpha;
  std::string provider;
  std::string corpus_hash;
  std::size_t sessions = 0;
  std::size_t participants = 0;
  std::optional<int> phase_source_duration_s;
  features::CdiSigns cdi_signs;
  std::string cdi_signs_mode = "published";
};

/// Deterministic JSON text (sorted keys, trailing newline). Records the
/// n of every cell and whether negative-task odd-speech rho exceeds the
/// favorite-task one when the task table is present.
std::string emit_manifest(const ManifestInfo& info, const std::vector<experiments::Table>& tables);

/// Writes `contents` to `path` in binary mode, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace ftd::report
