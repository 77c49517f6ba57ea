#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ftd/corpus.hpp"
#include "ftd/embed.hpp"
#include "ftd/features.hpp"
#include "ftd/mlcore/cv.hpp"

namespace ftd::experiments {

enum class Target { spq_total, odd_speech, srs_total };

inline constexpr Target kTargets[] = {Target::spq_total, Target::odd_speech, Target::srs_total};

std::string_view to_string(Target target);
std::string_view display_name(Target target);
std::optional<Target> parse_target(std::string_view name);
corpus::LabelAxis label_axis(Target target);

struct PhaseWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  friend bool operator==(const PhaseWindow&, const PhaseWindow&) = default;
};

struct ExperimentSpec {
  Target target = Target::odd_speech;
  std::optional<Task> task_filter;
  std::optional<int> duration_filter;
  std::optional<PhaseWindow> phase_filter;
  std::set<features::FeatureGroup> excluded_groups;

  /// Throws Error when a phase is given without a covering duration or
  /// every feature group is excluded.
  void validate() const;
};

/// Tokens whose (carried-forward) timestamp lies in [start_s, end_s) when
/// timestamps exist, otherwise the index range
/// [floor(N*start_s/total_s), floor(N*end_s/total_s)). Sentence spans are
/// recomputed inside the slice. Throws Error on an empty slice or an
/// invalid window.
text::TokenizedTranscript slice_phase(const text::TokenizedTranscript& t,
                                      const std::vector<corpus::TimedToken>& timestamps,
                                      double start_s, double end_s, double total_s,
                                      const text::TextOptions& options = {});

/// Thirds of [0, total_s).
std::vector<PhaseWindow> phase_thirds(double total_s);

struct Cell {
  ml::CorrelationReport report;
  std::size_t n_sessions = 0;
  std::size_t n_participants = 0;
  std::optional<ml::PredictionResult> predictions;
};

struct Table {
  std::string id;
  std::string title;
  std::string row_header;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<Cell>> cells;  ///< [row][column]
  std::string note;
};

struct PipelineOptions {
  features::FeatureConfig features;
  ml::CvOptions cv;
  /// Shortest bucket accepted as the phase-analysis source.
  int phase_min_duration_s = 120;
};

/// Feature extraction and per-cell evaluation over one corpus. Extracted
/// features are cached per session, so every runner sharing a pipeline
/// sees identical inputs.
class Pipeline {
 public:
  Pipeline(const corpus::Corpus& corpus, std::shared_ptr<const embed::Provider> provider,
           PipelineOptions options = {});

  const corpus::Corpus& corpus() const { return corpus_; }
  const embed::Provider& provider() const { return *provider_; }
  const PipelineOptions& options() const { return options_; }

  const text::TokenizedTranscript& transcript(std::size_t session) const;
  const features::FeatureVector& features(std::size_t session) const;
  /// Extracts features for the given sessions in parallel (cv.jobs).
  void prepare(const std::vector<std::size_t>& sessions) const;

  std::vector<std::size_t> select(std::optional<Task> task, std::optional<int> duration) const;
  std::vector<int> durations(std::optional<Task> task) const;

  /// Filters, extracts, runs lopo_cv and the pooled Spearman test. Any
  /// failure becomes a degenerate cell carrying the reason.
  Cell run_cell(const ExperimentSpec& spec) const;

  /// Feature matrix of the selected sessions (phase-sliced when requested).
  ml::FeatureMatrix feature_matrix(const ExperimentSpec& spec) const;

 private:
  const corpus::Corpus& corpus_;
  std::shared_ptr<const embed::Provider> provider_;
  PipelineOptions options_;
  mutable std::mutex mutex_;
  mutable std::vector<std::optional<text::TokenizedTranscript>> transcripts_;
  mutable std::vector<std::optional<features::FeatureVector>> features_;
};

Table run_label_correlations(const corpus::Corpus& corpus, double alpha = ml::kDefaultAlpha);

/// Rows: dream, favorite, negative, mistake. Columns: SPQ, odd speech, SRS.
Table run_task_comparison(const Pipeline& pipeline);

/// One row per distinct duration_limit_s of `task`, ascending.
Table run_duration_comparison(const Pipeline& pipeline, Task task = Task::negative);

/// Thirds of the longest duration bucket of `task` (when it reaches
/// phase_min_duration_s).
Table run_phase_comparison(const Pipeline& pipeline, Task task = Task::negative);

/// All features, then each of the five groups removed.
Table run_ablation(const Pipeline& pipeline, std::optional<Task> task = Task::negative,
                   std::optional<int> duration = std::nullopt);

/// Longest duration bucket usable for the phase analysis, if any.
std::optional<int> phase_source_duration(const Pipeline& pipeline, Task task = Task::negative);

}  // namespace ftd::experiments
