#include "ftd/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ftd::text {

namespace {

constexpr std::string_view kTagNames[kTagCount] = {
    "noun",    "verb",        "adjective",    "adjectival_verb", "adverb",
    "prefix",  "suffix",      "interjection", "auxiliary_verb",  "pronoun",
    "adnominal", "conjunction", "particle",   "punctuation",     "other",
};

// Keep in sync with data/tagset_default.tsv (checked by text_test).
constexpr std::string_view kBuiltinTagset = R"(
名詞	noun
代名詞	pronoun
動詞	verb
形容詞	adjective
形状詞	adjectival_verb
副詞	adverb
接頭辞	prefix
接尾辞	suffix
感動詞	interjection
助動詞	auxiliary_verb
連体詞	adnominal
接続詞	conjunction
助詞	particle
補助記号	punctuation
記号	other
空白	other
名詞-代名詞	pronoun
名詞,代名詞	pronoun
名詞-形容動詞語幹	adjectival_verb
名詞,形容動詞語幹	adjectival_verb
名詞-接尾	suffix
名詞,接尾	suffix
接頭詞	prefix
フィラー	interjection
記号-句点	punctuation
記号,句点	punctuation
記号-読点	punctuation
記号,読点	punctuation
記号-括弧	punctuation
記号,括弧	punctuation
noun	noun
verb	verb
adjective	adjective
adjectival_verb	adjectival_verb
adverb	adverb
prefix	prefix
suffix	suffix
interjection	interjection
auxiliary_verb	auxiliary_verb
pronoun	pronoun
adnominal	adnominal
conjunction	conjunction
particle	particle
punctuation	punctuation
other	other
)";

// Surface lexicon for naive_tokenize.
const std::unordered_map<std::string, CanonicalTag>& naive_lexicon() {
  static const std::unordered_map<std::string, CanonicalTag> lex = [] {
    std::unordered_map<std::string, CanonicalTag> m;
    for (const char* s : {"の", "が", "は", "を", "に", "で", "と", "も", "へ", "から",
                          "まで", "より", "ね", "よ", "か"})
      m.emplace(s, CanonicalTag::particle);
    for (const char* s : {"です", "ます", "た", "だ", "ない", "ません", "ず", "ぬ", "まい",
                          "なかった", "でした", "ました"})
      m.emplace(s, CanonicalTag::auxiliary_verb);
    for (const char* s : {"私", "僕", "俺", "彼", "彼女", "これ", "それ", "あれ", "ここ",
                          "そこ"})
      m.emplace(s, CanonicalTag::pronoun);
    for (const char* s : {"でも", "しかし", "そして", "だから", "それで", "けど"})
      m.emplace(s, CanonicalTag::conjunction);
    for (const char* s : {"えー", "えっと", "あー", "まあ", "うーん"})
      m.emplace(s, CanonicalTag::interjection);
    for (const char* s : {"この", "その", "どの", "大きな", "小さな"})
      m.emplace(s, CanonicalTag::adnominal);
    return m;
  }();
  return lex;
}

bool contains(const std::u32string& set, char32_t cp) {
  return set.find(cp) != std::u32string::npos;
}

bool all_in(std::string_view surface, const std::u32string& set) {
  const auto cps = utf8_decode(surface);
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(), [&](char32_t c) { return contains(set, c); });
}

}  // namespace

std::string_view to_string(CanonicalTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)];
}

std::optional<CanonicalTag> parse_canonical_tag(std::string_view name) {
  for (std::size_t i = 0; i < kTagCount; ++i) {
    if (kTagNames[i] == name) return kAllTags[i];
  }
  return std::nullopt;
}

bool is_content(CanonicalTag tag) {
  return std::find(std::begin(kContentTags), std::end(kContentTags), tag) !=
         std::end(kContentTags);
}

std::size_t TokenizedTranscript::punctuation_count() const {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) {
    return t.pos == CanonicalTag::punctuation;
  }));
}

std::string TokenizedTranscript::sentence_text(const Span& span) const {
  std::string out;
  for (std::size_t i = span.begin; i < span.end; ++i) out += tokens[i].surface;
  return out;
}

std::vector<TaggedEntry> parse_interchange(const nlohmann::json& array) {
  if (!array.is_array()) throw Error("token interchange must be a JSON array");
  std::vector<TaggedEntry> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    const auto& e = array[i];
    if (!e.is_object() || !e.contains("surface") || !e.contains("tag") ||
        !e["surface"].is_string() || !e["tag"].is_string()) {
      throw Error("token interchange entry " + std::to_string(i) +
                  " needs string fields 'surface' and 'tag'");
    }
    TaggedEntry entry{e["surface"].get<std::string>(), e["tag"].get<std::string>(), {}};
    if (auto it = e.find("negation"); it != e.end() && !it->is_null()) {
      if (!it->is_boolean())
        throw Error("token interchange entry " + std::to_string(i) + ": 'negation' must be bool");
      entry.negation = it->get<bool>();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

nlohmann::json to_interchange(const TokenizedTranscript& t) {
  auto out = nlohmann::json::array();
  for (const auto& tok : t.tokens) {
    nlohmann::json e = {{"surface", tok.surface}, {"tag", std::string(to_string(tok.pos))}};
    if (t.external_negation) e["negation"] = tok.negation_marked;
    out.push_back(std::move(e));
  }
  return out;
}

UnmappableTagError::UnmappableTagError(std::string tag)
    : Error("unmappable tag '" + tag + "'"), tag_(std::move(tag)) {}

TagsetMapping TagsetMapping::parse(std::string_view table) {
  TagsetMapping mapping;
  std::istringstream in{std::string(strip_bom(table))};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string prefix, tag_name, extra;
    if (!(fields >> prefix)) continue;
    if (!(fields >> tag_name) || (fields >> extra)) {
      throw Error("tagset mapping line " + std::to_string(lineno) +
                  ": expected 'prefix canonical_tag'");
    }
    auto tag = parse_canonical_tag(tag_name);
    if (!tag) {
      throw Error("tagset mapping line " + std::to_string(lineno) + ": unknown canonical tag '" +
                  tag_name + "'");
    }
    mapping.add(std::move(prefix), *tag);
  }
  return mapping;
}

TagsetMapping TagsetMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open tagset mapping " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const TagsetMapping& TagsetMapping::builtin() {
  static const TagsetMapping mapping = parse(kBuiltinTagset);
  return mapping;
}

void TagsetMapping::add(std::string prefix, CanonicalTag tag) {
  for (auto& rule : rules_) {
    if (rule.first == prefix) {
      rule.second = tag;
      return;
    }
  }
  rules_.emplace_back(std::move(prefix), tag);
}

std::optional<CanonicalTag> TagsetMapping::lookup(std::string_view external_tag) const {
  std::optional<CanonicalTag> best;
  std::size_t best_len = 0;
  for (const auto& [prefix, tag] : rules_) {
    if (prefix.size() > best_len && external_tag.substr(0, prefix.size()) == prefix) {
      best = tag;
      best_len = prefix.size();
    }
  }
  return best;
}

std::set<std::string> TextOptions::default_negation_lexicon() {
  return {"ない", "なかった", "ません", "ぬ", "ず", "まい"};
}

std::set<std::string> TextOptions::load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open negation lexicon " + path.string());
  std::set<std::string> lexicon;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (first) view = strip_bom(view);
    first = false;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (!view.empty()) lexicon.emplace(view);
  }
  return lexicon;
}

bool is_punctuation_surface(std::string_view surface, const TextOptions& opts) {
  return all_in(surface, opts.punctuation_chars);
}

std::vector<Span> segment_sentences(std::span<const Token> tokens, const TextOptions& opts) {
  std::vector<Span> spans;
  std::size_t start = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (all_in(tokens[i].surface, opts.terminator_chars)) {
      spans.push_back({start, i + 1});
      start = i + 1;
    }
  }
  if (start < tokens.size()) spans.push_back({start, tokens.size()});
  return spans;
}

std::size_t detect_negations(const TokenizedTranscript& t, const std::set<std::string>& lexicon) {
  if (t.precomputed_negations) return *t.precomputed_negations;
  if (t.external_negation) {
    return static_cast<std::size_t>(std::count_if(t.tokens.begin(), t.tokens.end(),
                                                  [](const Token& tok) { return tok.negation_marked; }));
  }
  return static_cast<std::size_t>(std::count_if(t.tokens.begin(), t.tokens.end(), [&](const Token& tok) {
    return lexicon.count(tok.surface) > 0;
  }));
}

TokenizedTranscript parse_tagged(std::span<const TaggedEntry> entries, const TagsetMapping& mapping,
                                 const TextOptions& opts) {
  TokenizedTranscript t;
  t.tokens.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.surface.empty()) throw Error("token interchange entry with empty surface");
    Token tok{e.surface, CanonicalTag::other, false};
    if (is_punctuation_surface(e.surface, opts)) {
      tok.pos = CanonicalTag::punctuation;
    } else if (auto tag = mapping.lookup(e.tag)) {
      // Punctuation iff the surface is punctuation.
      tok.pos = *tag == CanonicalTag::punctuation ? CanonicalTag::other : *tag;
    } else if (opts.strict_tags) {
      throw UnmappableTagError(e.tag);
    }
    if (e.negation.has_value()) {
      t.external_negation = true;
      tok.negation_marked = *e.negation;
    }
    t.tokens.push_back(std::move(tok));
  }
  t.sentence_spans = segment_sentences(t.tokens, opts);
  t.negation_count = detect_negations(t, opts.negation_lexicon);
  return t;
}

TokenizedTranscript naive_tokenize(std::string_view raw, const TextOptions& opts) {
  TokenizedTranscript t;
  const auto& lex = naive_lexicon();
  std::string word;
  const auto flush_word = [&] {
    if (word.empty()) return;
    auto it = lex.find(word);
    t.tokens.push_back({word, it == lex.end() ? CanonicalTag::other : it->second, false});
    word.clear();
  };
  for (char32_t cp : utf8_decode(strip_bom(raw))) {
    if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'　') {
      flush_word();
    } else if (contains(opts.punctuation_chars, cp)) {
      flush_word();
      t.tokens.push_back({utf8_encode(cp), CanonicalTag::punctuation, false});
    } else {
      word += utf8_encode(cp);
    }
  }
  flush_word();
  t.sentence_spans = segment_sentences(t.tokens, opts);
  t.negation_count = detect_negations(t, opts.negation_lexicon);
  return t;
}

std::map<CanonicalTag, double> pos_percentages(const TokenizedTranscript& t) {
  std::array<std::size_t, kTagCount> counts{};
  std::size_t total = 0;
  for (const auto& tok : t.tokens) {
    if (tok.pos == CanonicalTag::punctuation) continue;
    ++counts[static_cast<std::size_t>(tok.pos)];
    ++total;
  }
  if (total == 0) throw Error("POS percentages undefined: no non-punctuation token");
  std::map<CanonicalTag, double> out;
  for (CanonicalTag tag : kAllTags) {
    if (tag == CanonicalTag::punctuation) continue;
    out[tag] = 100.0 * static_cast<double>(counts[static_cast<std::size_t>(tag)]) /
               static_cast<double>(total);
  }
  return out;
}

}  // namespace ftd::text
