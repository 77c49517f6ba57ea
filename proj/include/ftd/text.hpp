#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ftd/common.hpp"

namespace ftd::text {

enum class CanonicalTag {
  noun,
  verb,
  adjective,
  adjectival_verb,
  adverb,
  prefix,
  suffix,
  interjection,
  auxiliary_verb,
  pronoun,
  adnominal,
  conjunction,
  particle,
  punctuation,
  other,
};

inline constexpr std::size_t kTagCount = 15;

inline constexpr CanonicalTag kAllTags[kTagCount] = {
    CanonicalTag::noun,         CanonicalTag::verb,           CanonicalTag::adjective,
    CanonicalTag::adjectival_verb, CanonicalTag::adverb,      CanonicalTag::prefix,
    CanonicalTag::suffix,       CanonicalTag::interjection,   CanonicalTag::auxiliary_verb,
    CanonicalTag::pronoun,      CanonicalTag::adnominal,      CanonicalTag::conjunction,
    CanonicalTag::particle,     CanonicalTag::punctuation,    CanonicalTag::other,
};

inline constexpr CanonicalTag kContentTags[] = {
    CanonicalTag::noun, CanonicalTag::verb, CanonicalTag::adjective,
    CanonicalTag::adjectival_verb, CanonicalTag::adverb};

inline constexpr CanonicalTag kFunctionTags[] = {
    CanonicalTag::prefix,    CanonicalTag::suffix,      CanonicalTag::interjection,
    CanonicalTag::auxiliary_verb, CanonicalTag::pronoun, CanonicalTag::adnominal,
    CanonicalTag::conjunction, CanonicalTag::particle,  CanonicalTag::other};

std::string_view to_string(CanonicalTag tag);
std::optional<CanonicalTag> parse_canonical_tag(std::string_view name);
bool is_content(CanonicalTag tag);

struct Token {
  std::string surface;
  CanonicalTag pos = CanonicalTag::other;
  /// Set when an external detector marked this token as (the head of) a
  /// negation phrase.
  bool negation_marked = false;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Half-open token index range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct TokenizedTranscript {
  std::vector<Token> tokens;
  std::vector<Span> sentence_spans;
  std::size_t negation_count = 0;
  /// True when negation marks came from the interchange; the lexicon is then
  /// bypassed.
  bool external_negation = false;
  /// Session-level count from an external detector; overrides token marks
  /// and the lexicon.
  std::optional<std::size_t> precomputed_negations;

  std::size_t punctuation_count() const;
  std::size_t word_count() const { return tokens.size() - punctuation_count(); }
  std::string sentence_text(const Span& span) const;
};

/// One entry of the token interchange array `{surface, tag, negation?}`.
struct TaggedEntry {
  std::string surface;
  std::string tag;
  std::optional<bool> negation;
};

std::vector<TaggedEntry> parse_interchange(const nlohmann::json& array);
nlohmann::json to_interchange(const TokenizedTranscript& t);

class UnmappableTagError : public Error {
 public:
  explicit UnmappableTagError(std::string tag);
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

/// Maps external analyzer tags to canonical tags by longest-prefix match.
class TagsetMapping {
 public:
  TagsetMapping() = default;

  /// Parses the text table format: one `prefix<whitespace>canonical_tag` per
  /// line, `#` starts a comment.
  static TagsetMapping parse(std::string_view table);
  static TagsetMapping load(const std::filesystem::path& path);
  /// Covers Sudachi, IPADIC/UniDic top-level tags and the ASCII canonical
  /// names (`noun-common` maps to noun).
  static const TagsetMapping& builtin();

  void add(std::string prefix, CanonicalTag tag);
  std::optional<CanonicalTag> lookup(std::string_view external_tag) const;
  std::size_t size() const { return rules_.size(); }

 private:
  std::vector<std::pair<std::string, CanonicalTag>> rules_;
};

struct TextOptions {
  std::u32string punctuation_chars =
      U".,!?;:'\"()[]{}-。、，．！？「」『』"
      U"（）【】・…‥〜";
  std::u32string terminator_chars = U"。！？.!?";
  std::set<std::string> negation_lexicon = default_negation_lexicon();
  /// Unknown external tags raise UnmappableTagError instead of mapping to
  /// `other`.
  bool strict_tags = false;

  static std::set<std::string> default_negation_lexicon();
  /// One surface form per line; blank lines and `#` comments skipped.
  static std::set<std::string> load_lexicon(const std::filesystem::path& path);
};

bool is_punctuation_surface(std::string_view surface, const TextOptions& opts);

TokenizedTranscript parse_tagged(std::span<const TaggedEntry> entries,
                                 const TagsetMapping& mapping,
                                 const TextOptions& opts = {});

/// Whitespace / punctuation-boundary tokenizer with a tiny surface lexicon.
/// Test-grade only: Japanese text without spaces yields clause-sized tokens.
TokenizedTranscript naive_tokenize(std::string_view raw, const TextOptions& opts = {});

/// Splits after each token made entirely of terminator characters; trailing
/// tokens form a final sentence.
std::vector<Span> segment_sentences(std::span<const Token> tokens,
                                    const TextOptions& opts = {});

/// Percentage of each non-punctuation tag over non-punctuation tokens.
/// Throws Error when there is no non-punctuation token.
std::map<CanonicalTag, double> pos_percentages(const TokenizedTranscript& t);

std::size_t detect_negations(const TokenizedTranscript& t,
                             const std::set<std::string>& lexicon);

}  // namespace ftd::text
