#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftd/common.hpp"
#include "ftd/mlcore/stats.hpp"
#include "ftd/text.hpp"

namespace ftd::corpus {

inline constexpr int kSpqMax = 74;
inline constexpr int kOddSpeechMax = 9;
inline constexpr int kSrsMax = 195;

/// Per-participant questionnaire scores. The SRS subscales are optional and
/// only used for label-level correlations.
struct LabelSet {
  std::string participant_id;
  int spq_total = 0;
  int spq_odd_speech = 0;
  int srs_total = 0;
  std::optional<int> age;
  Gender gender = Gender::unspecified;
  std::optional<int> srs_awareness;
  std::optional<int> srs_cognition;
  std::optional<int> srs_communication;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

enum class LabelAxis {
  spq_total,
  odd_speech,
  srs_total,
  srs_awareness,
  srs_cognition,
  srs_communication,
};

std::string_view to_string(LabelAxis axis);
std::optional<LabelAxis> parse_label_axis(std::string_view name);
std::optional<double> label_value(const LabelSet& labels, LabelAxis axis);

struct TimedToken {
  std::size_t token_index = 0;
  double start_s = 0.0;

  friend bool operator==(const TimedToken&, const TimedToken&) = default;
};

struct SessionRecord {
  std::string participant_id;
  std::string session_id;
  Task task = Task::dream;
  int duration_limit_s = 0;
  std::optional<double> measured_duration_s;
  std::string transcript;
  /// Pre-tagged tokens from an external analyzer, when supplied.
  std::optional<std::vector<text::TaggedEntry>> tokens;
  std::vector<TimedToken> token_timestamps;
  /// Negation phrase count supplied by an external detector.
  std::optional<int> negation_count;
  bool retake = false;

  /// Seconds used for rate features: measured duration when known.
  double effective_duration_s() const {
    return measured_duration_s.value_or(static_cast<double>(duration_limit_s));
  }
};

bool operator==(const SessionRecord& a, const SessionRecord& b);

struct Corpus {
  std::vector<SessionRecord> sessions;
  std::map<std::string, LabelSet> labels;

  const LabelSet& labels_for(const std::string& participant_id) const;
  /// Participants that have at least one session, in identifier order.
  std::vector<std::string> participants() const;
};

enum class Format { jsonl, csv };

std::optional<Format> format_from_path(const std::filesystem::path& path);

struct RowIssue {
  enum class Kind { parse, schema, invariant };
  Kind kind = Kind::parse;
  std::string file;
  std::size_t line = 0;
  std::string record_id;
  std::string field;
  std::string message;

  std::string describe() const;
};

std::string_view to_string(RowIssue::Kind kind);

class CorpusError : public Error {
 public:
  explicit CorpusError(RowIssue issue);
  const RowIssue& issue() const { return issue_; }

 private:
  RowIssue issue_;
};

struct LoadResult {
  Corpus corpus;
  std::vector<RowIssue> rejects;

  /// Throws CorpusError for the first reject.
  const Corpus& require_clean() const;
};

/// Loads sessions and labels. Rows failing parse, schema or invariant checks
/// are excluded from the corpus and reported with their line numbers. The
/// format is taken from the file extension when not given.
LoadResult load_corpus(const std::filesystem::path& sessions_path,
                       const std::filesystem::path& labels_path,
                       std::optional<Format> format = std::nullopt);

/// Checks LabelSet range invariants; returns the offending field name.
std::optional<std::pair<std::string, std::string>> check_labels(const LabelSet& labels);

void write_jsonl(const Corpus& corpus, const std::filesystem::path& sessions_path,
                 const std::filesystem::path& labels_path);
void write_jsonl(const Corpus& corpus, std::ostream& sessions, std::ostream& labels);

/// FNV-1a digest of the canonical JSONL serialization.
std::string corpus_hash(const Corpus& corpus);

struct LabelStats {
  std::string name;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  ///< sample SD (n-1); 0 when n == 1
  double min = 0.0;
  double max = 0.0;
};

struct DemographicSummary {
  std::size_t participants = 0;
  std::size_t sessions = 0;
  std::map<Task, std::size_t> sessions_per_task;
  std::map<int, std::size_t> sessions_per_duration;
  std::vector<LabelStats> labels;  ///< age (when present), srs, spq, odd speech
  std::size_t male = 0;
  std::size_t female = 0;
  std::size_t unspecified = 0;

  const LabelStats* find(std::string_view name) const;
};

DemographicSummary summarize(const Corpus& corpus);

struct Cutoffs {
  int srs = 81;
  int spq = 41;
};

struct CutoffFlags {
  bool srs_candidate = false;
  bool spq_candidate = false;
  friend bool operator==(const CutoffFlags&, const CutoffFlags&) = default;
};

/// Inclusive comparison: score >= cutoff.
std::map<std::string, CutoffFlags> flag_cutoffs(const Corpus& corpus, const Cutoffs& cutoffs = {});

using AxisPair = std::pair<LabelAxis, LabelAxis>;

/// The SPQ and odd-speech rows against {SPQ, odd, SRS, awareness, cognition,
/// communication}.
std::vector<AxisPair> default_label_pairs();

/// One Spearman report per pair over participants having both labels.
/// Throws Error when a pair has fewer than 3 such participants.
std::vector<ml::CorrelationReport> label_correlations(const Corpus& corpus,
                                                      const std::vector<AxisPair>& pairs,
                                                      double alpha = ml::kDefaultAlpha);

}  // namespace ftd::corpus
