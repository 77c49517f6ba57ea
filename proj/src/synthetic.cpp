#include "ftd/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace ftd::synthetic {

std::uint64_t Rng::next() {
  const std::uint64_t r = splitmix64(state_);
  state_ += 0x9e3779b97f4a7c15ULL;
  return r;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::size_t Rng::below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

namespace {

using text::CanonicalTag;

struct Lexeme {
  CanonicalTag tag;
  const char* external_tag;
  std::vector<const char*> surfaces;
  double weight;
};

const std::vector<Lexeme>& lexicon() {
  static const std::vector<Lexeme> lex = {
      {CanonicalTag::noun, "名詞-普通名詞-一般",
       {"犬", "学校", "時間", "友達", "家", "仕事", "夢", "電車", "本", "天気", "先生", "試験"}, 0.28},
      {CanonicalTag::verb, "動詞-一般", {"行く", "見る", "食べる", "思う", "言う", "する", "帰る", "忘れる"}, 0.14},
      {CanonicalTag::adjective, "形容詞-一般", {"楽しい", "悲しい", "高い", "怖い", "良い"}, 0.04},
      {CanonicalTag::adjectival_verb, "形状詞-一般", {"静か", "大切", "元気", "不安"}, 0.03},
      {CanonicalTag::adverb, "副詞", {"とても", "すぐ", "よく", "もう", "ちょっと"}, 0.05},
      {CanonicalTag::prefix, "接頭辞", {"お", "ご", "再"}, 0.01},
      {CanonicalTag::suffix, "接尾辞-名詞的-一般", {"さん", "たち", "的", "目"}, 0.03},
      {CanonicalTag::interjection, "感動詞-フィラー", {"えっと", "あの", "まあ", "ええ", "うーん"}, 0.03},
      {CanonicalTag::auxiliary_verb, "助動詞", {"です", "ます", "た", "ない", "たい", "ません"}, 0.10},
      {CanonicalTag::pronoun, "代名詞", {"私", "それ", "これ", "彼"}, 0.03},
      {CanonicalTag::adnominal, "連体詞", {"その", "この", "大きな", "ある"}, 0.02},
      {CanonicalTag::conjunction, "接続詞", {"でも", "そして", "だから", "しかし"}, 0.03},
      {CanonicalTag::particle, "助詞-格助詞", {"は", "が", "を", "に", "で", "と", "も"}, 0.22},
  };
  return lex;
}

int clamp_int(double v, int lo, int hi) {
  return static_cast<int>(std::clamp(std::lround(v), static_cast<long>(lo), static_cast<long>(hi)));
}

corpus::LabelSet make_labels(const std::string& id, Rng& rng) {
  corpus::LabelSet l;
  l.participant_id = id;
  const double z = rng.normal();
  l.spq_odd_speech = clamp_int(4.0 + 2.5 * z + 0.8 * rng.normal(), 0, corpus::kOddSpeechMax);
  l.spq_total = l.spq_odd_speech + clamp_int(14.0 + 2.0 * l.spq_odd_speech + 12.0 * rng.normal(), 0,
                                                corpus::kSpqMax - corpus::kOddSpeechMax);
  l.srs_awareness = clamp_int(10.0 + 2.0 * z + 3.0 * rng.normal(), 0, 24);
  l.srs_cognition = clamp_int(13.0 + 3.0 * z + 4.0 * rng.normal(), 0, 36);
  l.srs_communication = clamp_int(24.0 + 5.0 * z + 8.0 * rng.normal(), 0, 66);
  const int rest = clamp_int(25.0 + 4.0 * z + 8.0 * rng.normal(), 0, 69);
  l.srs_total = *l.srs_awareness + *l.srs_cognition + *l.srs_communication + rest;
  l.age = 18 + static_cast<int>(rng.below(43));
  l.gender = rng.below(2) == 0 ? Gender::male : Gender::female;
  return l;
}

double planted_level(const corpus::LabelSet& l, corpus::LabelAxis axis) {
  const double v = *corpus::label_value(l, axis);
  switch (axis) {
    case corpus::LabelAxis::spq_total:
      return v / corpus::kSpqMax;
    case corpus::LabelAxis::odd_speech:
      return v / corpus::kOddSpeechMax;
    case corpus::LabelAxis::srs_total:
      return v / corpus::kSrsMax;
    case corpus::LabelAxis::srs_awareness:
      return v / 24.0;
    case corpus::LabelAxis::srs_cognition:
      return v / 36.0;
    case corpus::LabelAxis::srs_communication:
      return v / 66.0;
  }
  return 0.0;
}

corpus::SessionRecord make_session(const SyntheticConfig& config, const corpus::LabelSet& labels,
                                   Task task, int duration, Rng& rng) {
  corpus::SessionRecord s;
  s.participant_id = labels.participant_id;
  s.task = task;
  s.duration_limit_s = duration;
  s.session_id = labels.participant_id + "-" + std::string(to_string(task)) + "-" + std::to_string(duration);

  const auto& lex = lexicon();
  std::vector<double> weights;
  for (const auto& l : lex) weights.push_back(l.weight * std::exp(0.2 * rng.normal()));

  // Planted tag rate: tracks the label in the planted task, independent
  // uniform level elsewhere; both share the same marginal range.
  const bool planted = task == config.planted_task && config.strength > 0.0;
  const double level = planted ? planted_level(labels, config.planted_label) : rng.uniform();
  const double strength = planted ? config.strength : 1.0;
  const double rate =
      std::max(0.0, 0.005 + 0.09 * strength * (level + config.noise * rng.normal()));
  for (std::size_t i = 0; i < lex.size(); ++i) {
    if (lex[i].tag == config.planted_tag) weights[i] = rate;
  }
  double total = 0.0;
  for (double w : weights) total += w;

  const double wpm = std::max(30.0, config.wpm_mean + 15.0 * rng.normal());
  const auto words = static_cast<std::size_t>(std::max(4.0, std::round(wpm * duration / 60.0)));

  std::vector<text::TaggedEntry> tokens;
  std::size_t sentence_len = 0;
  std::size_t sentence_target = 6 + rng.below(9);
  for (std::size_t w = 0; w < words; ++w) {
    double u = rng.uniform() * total;
    std::size_t pick = 0;
    while (pick + 1 < lex.size() && u >= weights[pick]) {
      u -= weights[pick];
      ++pick;
    }
    const auto& l = lex[pick];
    tokens.push_back({l.surfaces[rng.below(l.surfaces.size())], l.external_tag, std::nullopt});
    ++sentence_len;
    if (sentence_len >= sentence_target || w + 1 == words) {
      tokens.push_back({"。", "補助記号-句点", std::nullopt});
      sentence_len = 0;
      sentence_target = 6 + rng.below(9);
    } else if (rng.uniform() < 0.06) {
      tokens.push_back({"、", "補助記号-読点", std::nullopt});
    }
  }
  for (const auto& t : tokens) s.transcript += t.surface;
  if (config.timestamps) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const double t = static_cast<double>(duration) * static_cast<double>(i) /
                       static_cast<double>(tokens.size());
      s.token_timestamps.push_back({i, std::round(t * 1000.0) / 1000.0});
    }
  }
  s.tokens = std::move(tokens);
  return s;
}

}  // namespace

corpus::Corpus generate(const SyntheticConfig& config) {
  if (config.participants == 0) throw Error("synthetic: need at least one participant");
  if (config.tasks.empty() || config.durations.empty())
    throw Error("synthetic: tasks and durations must be non-empty");
  Rng rng(config.seed);
  corpus::Corpus out;
  for (std::size_t p = 0; p < config.participants; ++p) {
    char id[16];
    std::snprintf(id, sizeof id, "P%03zu", p + 1);
    auto labels = make_labels(id, rng);
    for (Task task : config.tasks) {
      for (int d : config.durations) out.sessions.push_back(make_session(config, labels, task, d, rng));
    }
    out.labels.emplace(labels.participant_id, std::move(labels));
  }
  return out;
}

}  // namespace ftd::synthetic
