#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftd/corpus.hpp"
#include "ftd/embed.hpp"
#include "ftd/mlcore/cv.hpp"
#include "ftd/text.hpp"

namespace ftd::features {

enum class FeatureGroup { embedding, content_word, function_word, abstract, temporal };

inline constexpr FeatureGroup kAllGroups[] = {FeatureGroup::embedding, FeatureGroup::content_word,
                                              FeatureGroup::function_word, FeatureGroup::abstract,
                                              FeatureGroup::temporal};

std::string_view to_string(FeatureGroup group);
std::optional<FeatureGroup> parse_group(std::string_view name);

struct FeatureSpec {
  std::string name;
  FeatureGroup group;
};

/// The fixed 22-feature schema, in output order.
const std::vector<FeatureSpec>& feature_schema();

struct FeatureVector {
  std::string session_id;
  std::vector<std::string> names;
  std::vector<FeatureGroup> groups;
  /// Empty when the feature is undefined for this session.
  std::vector<std::optional<double>> values;

  std::size_t size() const { return names.size(); }
  std::optional<double> get(std::string_view name) const;
  std::vector<std::string> undefined() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Mean L1 distance between consecutive vectors; empty for fewer than 2.
std::optional<double> coherence_l1(std::span<const embed::EmbeddingVector> vectors);

/// Mean (1 - cosine) between consecutive vectors; empty for fewer than 2.
/// Throws NumericError on a zero vector.
std::optional<double> coherence_cosine(std::span<const embed::EmbeddingVector> vectors);

/// Embeds content-word surfaces in order and applies coherence_cosine.
std::optional<double> content_word_coherence(const text::TokenizedTranscript& t,
                                             const embed::Provider& provider);

/// Signed terms of the categorical-dynamic index: eight POS percentages plus
/// the negation rate.
struct CdiSigns {
  std::map<std::string, int> sign;

  /// +prefix +suffix +interjection +auxiliary_verb
  /// -pronoun -adnominal -conjunction -particle -negation
  static CdiSigns published();
  friend bool operator==(const CdiSigns&, const CdiSigns&) = default;
};

/// Term names in CdiSigns order: the eight POS tags, then "negation".
const std::vector<std::string>& cdi_terms();

double cdij(const std::map<text::CanonicalTag, double>& pos_pct, double negation_rate,
            const CdiSigns& signs = CdiSigns::published());

/// Signs of the first principal component loadings of the standardized
/// columns, oriented so the `particle` loading is negative (or, without a
/// usable particle column, so the largest |loading| is positive). Constant
/// columns get sign 0. Throws NumericError with fewer than 2 rows or 2
/// non-constant columns.
std::map<std::string, int> derive_cdi_signs(const ml::Matrix& columns,
                                            const std::vector<std::string>& names);

struct TemporalFeatures {
  double wpm = 0.0;
  double punctuation_pct = 0.0;
};

/// Throws Error for a non-positive duration or an empty transcript.
TemporalFeatures temporal_features(const text::TokenizedTranscript& t, double duration_s);

struct FeatureConfig {
  text::TextOptions text;
  const text::TagsetMapping* mapping = nullptr;  ///< builtin when null
  CdiSigns cdi_signs = CdiSigns::published();
};

/// Pre-tagged tokens when the session carries them, otherwise naive_tokenize.
text::TokenizedTranscript tokenize_session(const corpus::SessionRecord& session,
                                           const FeatureConfig& config);

/// Builds the 22-feature vector. `duration_s` overrides the session's
/// effective duration (used for phase slices).
FeatureVector assemble(const corpus::SessionRecord& session, const text::TokenizedTranscript& t,
                       const embed::Provider& provider, const FeatureConfig& config = {},
                       std::optional<double> duration_s = std::nullopt);

/// Undefined entries become NaN.
ml::FeatureMatrix to_matrix(std::span<const corpus::SessionRecord* const> sessions,
                            std::span<const FeatureVector> vectors);

/// POS-percentage and negation-rate columns for derive_cdi_signs.
ml::Matrix cdi_term_matrix(std::span<const text::TokenizedTranscript> transcripts);

void write_feature_csv(std::ostream& out, std::span<const corpus::SessionRecord* const> sessions,
                       std::span<const FeatureVector> vectors);

}  // namespace ftd::features
