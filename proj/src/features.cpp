#include "ftd/features.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ftd/mlcore/pca.hpp"

namespace ftd::features {

using text::CanonicalTag;

std::string_view to_string(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::embedding:
      return "embedding";
    case FeatureGroup::content_word:
      return "content_word";
    case FeatureGroup::function_word:
      return "function_word";
    case FeatureGroup::abstract:
      return "abstract";
    case FeatureGroup::temporal:
      return "temporal";
  }
  return "?";
}

std::optional<FeatureGroup> parse_group(std::string_view name) {
  for (auto g : kAllGroups) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

const std::vector<FeatureSpec>& feature_schema() {
  static const std::vector<FeatureSpec> schema = [] {
    std::vector<FeatureSpec> s = {
        {"sentence_l1_mean", FeatureGroup::embedding},
        {"sentence_cosdist_mean", FeatureGroup::embedding},
        {"contentword_cosdist_mean", FeatureGroup::embedding},
    };
    for (auto tag : text::kContentTags)
      s.push_back({"pct_" + std::string(text::to_string(tag)), FeatureGroup::content_word});
    for (auto tag : text::kFunctionTags)
      s.push_back({"pct_" + std::string(text::to_string(tag)), FeatureGroup::function_word});
    s.push_back({"content_word_pct", FeatureGroup::abstract});
    s.push_back({"negation_per_100_tokens", FeatureGroup::abstract});
    s.push_back({"cdij", FeatureGroup::abstract});
    s.push_back({"wpm", FeatureGroup::temporal});
    s.push_back({"punctuation_pct", FeatureGroup::temporal});
    return s;
  }();
  return schema;
}

std::optional<double> FeatureVector::get(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw Error("unknown feature '" + std::string(name) + "'");
}

std::vector<std::string> FeatureVector::undefined() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!values[i]) out.push_back(names[i]);
  }
  return out;
}

std::optional<double> coherence_l1(std::span<const embed::EmbeddingVector> vectors) {
  if (vectors.size() < 2) return std::nullopt;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < vectors.size(); ++i) {
    const auto& a = vectors[i];
    const auto& b = vectors[i + 1];
    if (a.size() != b.size()) throw SchemaError("coherence_l1: dimension mismatch");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d += std::fabs(b[k] - a[k]);
    total += d;
  }
  return total / static_cast<double>(vectors.size() - 1);
}

std::optional<double> coherence_cosine(std::span<const embed::EmbeddingVector> vectors) {
  if (vectors.size() < 2) return std::nullopt;
  const auto norm = [](const embed::EmbeddingVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < vectors.size(); ++i) {
    const auto& a = vectors[i];
    const auto& b = vectors[i + 1];
    if (a.size() != b.size()) throw SchemaError("coherence_cosine: dimension mismatch");
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) throw NumericError("coherence_cosine: zero vector");
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    const double cosine = std::clamp(dot / (na * nb), -1.0, 1.0);
    total += 1.0 - cosine;
  }
  return total / static_cast<double>(vectors.size() - 1);
}

std::optional<double> content_word_coherence(const text::TokenizedTranscript& t,
                                             const embed::Provider& provider) {
  std::vector<std::string> words;
  for (const auto& tok : t.tokens) {
    if (text::is_content(tok.pos)) words.push_back(tok.surface);
  }
  if (words.size() < 2) return std::nullopt;
  const auto vectors = embed::embed_texts(provider, words);
  return coherence_cosine(vectors);
}

const std::vector<std::string>& cdi_terms() {
  static const std::vector<std::string> terms = {
      "prefix",  "suffix",    "interjection", "auxiliary_verb", "pronoun",
      "adnominal", "conjunction", "particle", "negation"};
  return terms;
}

CdiSigns CdiSigns::published() {
  CdiSigns s;
  for (const auto& t : cdi_terms()) s.sign[t] = -1;
  for (const char* t : {"prefix", "suffix", "interjection", "auxiliary_verb"}) s.sign[t] = +1;
  return s;
}

double cdij(const std::map<CanonicalTag, double>& pos_pct, double negation_rate,
            const CdiSigns& signs) {
  double total = 0.0;
  for (const auto& term : cdi_terms()) {
    auto it = signs.sign.find(term);
    const int s = it == signs.sign.end() ? 0 : it->second;
    if (s == 0) continue;
    double value = 0.0;
    if (term == "negation") {
      value = negation_rate;
    } else {
      auto tag = text::parse_canonical_tag(term);
      auto pit = pos_pct.find(*tag);
      value = pit == pos_pct.end() ? 0.0 : pit->second;
    }
    total += s * value;
  }
  return total;
}

std::map<std::string, int> derive_cdi_signs(const ml::Matrix& columns,
                                            const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(columns.cols()) != names.size())
    throw SchemaError("derive_cdi_signs: column/name count mismatch");
  if (columns.rows() < 2) throw NumericError("derive_cdi_signs: need at least 2 sessions");
  const auto params = ml::StandardizationParams::fit(columns);
  if (params.retained.size() < 2)
    throw NumericError("derive_cdi_signs: fewer than 2 columns with nonzero variance");
  const auto pc = ml::pca_first_component(params.apply(columns));

  std::map<std::string, int> signs;
  for (const auto& n : names) signs[n] = 0;
  double orient = 0.0;
  for (std::size_t j = 0; j < params.retained.size(); ++j) {
    if (names[params.retained[j]] == "particle") orient = -pc.loading(static_cast<Eigen::Index>(j));
  }
  if (orient == 0.0) {
    Eigen::Index largest = 0;
    pc.loading.cwiseAbs().maxCoeff(&largest);
    orient = pc.loading(largest);
  }
  const double flip = orient >= 0.0 ? 1.0 : -1.0;
  for (std::size_t j = 0; j < params.retained.size(); ++j) {
    const double l = flip * pc.loading(static_cast<Eigen::Index>(j));
    signs[names[params.retained[j]]] = l > 0.0 ? 1 : (l < 0.0 ? -1 : 0);
  }
  return signs;
}

TemporalFeatures temporal_features(const text::TokenizedTranscript& t, double duration_s) {
  if (!(duration_s > 0.0)) throw Error("temporal_features: duration must be positive");
  if (t.tokens.empty()) throw Error("temporal_features: transcript has no tokens");
  TemporalFeatures f;
  f.wpm = static_cast<double>(t.word_count()) / (duration_s / 60.0);
  f.punctuation_pct =
      100.0 * static_cast<double>(t.punctuation_count()) / static_cast<double>(t.tokens.size());
  return f;
}

text::TokenizedTranscript tokenize_session(const corpus::SessionRecord& session,
                                           const FeatureConfig& config) {
  text::TokenizedTranscript t;
  if (session.tokens) {
    const auto& mapping = config.mapping ? *config.mapping : text::TagsetMapping::builtin();
    t = text::parse_tagged(*session.tokens, mapping, config.text);
  } else {
    t = text::naive_tokenize(session.transcript, config.text);
  }
  if (session.negation_count) {
    t.precomputed_negations = static_cast<std::size_t>(*session.negation_count);
    t.negation_count = *t.precomputed_negations;
  }
  return t;
}

FeatureVector assemble(const corpus::SessionRecord& session, const text::TokenizedTranscript& t,
                       const embed::Provider& provider, const FeatureConfig& config,
                       std::optional<double> duration_s) {
  const auto& schema = feature_schema();
  FeatureVector fv;
  fv.session_id = session.session_id;
  for (const auto& spec : schema) {
    fv.names.push_back(spec.name);
    fv.groups.push_back(spec.group);
  }
  fv.values.assign(schema.size(), std::nullopt);
  std::size_t slot = 0;
  const auto put = [&](std::optional<double> v) { fv.values[slot++] = v; };

  // Embedding group.
  std::vector<std::string> sentences;
  for (const auto& span : t.sentence_spans) sentences.push_back(t.sentence_text(span));
  if (sentences.size() >= 2) {
    const auto vectors = embed::embed_texts(provider, sentences);
    put(coherence_l1(vectors));
    std::optional<double> cosine;
    try {
      cosine = coherence_cosine(vectors);
    } catch (const NumericError&) {
    }
    put(cosine);
  } else {
    put(std::nullopt);
    put(std::nullopt);
  }
  {
    std::optional<double> cw;
    try {
      cw = content_word_coherence(t, provider);
    } catch (const NumericError&) {
    }
    put(cw);
  }

  // POS groups.
  std::optional<std::map<CanonicalTag, double>> pct;
  if (t.word_count() > 0) pct = text::pos_percentages(t);
  for (auto tag : text::kContentTags) put(pct ? std::optional(pct->at(tag)) : std::nullopt);
  for (auto tag : text::kFunctionTags) put(pct ? std::optional(pct->at(tag)) : std::nullopt);

  // Abstract group.
  if (pct) {
    double content = 0.0;
    for (auto tag : text::kContentTags) content += pct->at(tag);
    const double negation_rate =
        100.0 * static_cast<double>(t.negation_count) / static_cast<double>(t.word_count());
    put(content);
    put(negation_rate);
    put(cdij(*pct, negation_rate, config.cdi_signs));
  } else {
    put(std::nullopt);
    put(std::nullopt);
    put(std::nullopt);
  }

  // Temporal group.
  if (!t.tokens.empty()) {
    const auto temporal = temporal_features(t, duration_s.value_or(session.effective_duration_s()));
    put(temporal.wpm);
    put(temporal.punctuation_pct);
  } else {
    put(std::nullopt);
    put(std::nullopt);
  }
  return fv;
}

ml::FeatureMatrix to_matrix(std::span<const corpus::SessionRecord* const> sessions,
                            std::span<const FeatureVector> vectors) {
  if (sessions.size() != vectors.size()) throw SchemaError("to_matrix: row count mismatch");
  ml::FeatureMatrix m;
  for (const auto& spec : feature_schema()) m.feature_names.push_back(spec.name);
  m.values.resize(static_cast<Eigen::Index>(vectors.size()),
                  static_cast<Eigen::Index>(m.feature_names.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    m.session_ids.push_back(sessions[i]->session_id);
    m.participant_ids.push_back(sessions[i]->participant_id);
    if (vectors[i].names != m.feature_names) throw SchemaError("to_matrix: feature schema mismatch");
    for (std::size_t j = 0; j < vectors[i].values.size(); ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          vectors[i].values[j].value_or(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return m;
}

ml::Matrix cdi_term_matrix(std::span<const text::TokenizedTranscript> transcripts) {
  std::vector<std::vector<double>> rows;
  for (const auto& t : transcripts) {
    if (t.word_count() == 0) continue;
    const auto pct = text::pos_percentages(t);
    std::vector<double> row;
    for (const auto& term : cdi_terms()) {
      if (term == "negation") {
        row.push_back(100.0 * static_cast<double>(t.negation_count) /
                      static_cast<double>(t.word_count()));
      } else {
        row.push_back(pct.at(*text::parse_canonical_tag(term)));
      }
    }
    rows.push_back(std::move(row));
  }
  ml::Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cdi_terms().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_feature_csv(std::ostream& out, std::span<const corpus::SessionRecord* const> sessions,
                       std::span<const FeatureVector> vectors) {
  out << "session_id,participant_id,task,duration_limit_s";
  for (const auto& spec : feature_schema()) out << ',' << spec.name;
  for (const auto& spec : feature_schema()) out << ',' << spec.name << "_undefined";
  out << '\n';
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& s = *sessions[i];
    out << csv_escape(s.session_id) << ',' << csv_escape(s.participant_id) << ','
        << to_string(s.task) << ',' << s.duration_limit_s;
    for (const auto& v : vectors[i].values) out << ',' << (v ? format_value(*v) : "");
    for (const auto& v : vectors[i].values) out << ',' << (v ? '0' : '1');
    out << '\n';
  }
}

}  // namespace ftd::features
