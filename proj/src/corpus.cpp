#include "ftd/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ftd::corpus {

using nlohmann::json;

namespace {

struct RawRecord {
  std::size_t line = 0;
  json object;
};

// A row-level failure; converted into a RowIssue by the loader.
struct RowFailure {
  RowIssue::Kind kind;
  std::string field;
  std::string message;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Minimal RFC 4180 reader. Each record remembers the line it started on.
std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(std::string_view data,
                                                                        const std::string& file) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line = 1;
  std::size_t row_line = 1;
  const auto end_row = [&] {
    fields.push_back(std::move(field));
    field.clear();
    if (row_has_content || fields.size() > 1 || !fields.front().empty())
      rows.emplace_back(row_line, std::move(fields));
    fields.clear();
    row_has_content = false;
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        field += c;
        row_has_content = true;
    }
  }
  if (in_quotes) throw Error(file + ": unterminated quoted field starting on line " +
                             std::to_string(row_line));
  if (row_has_content || !field.empty()) end_row();
  return rows;
}

enum class CsvType { string, integer, number, boolean, json_value };

CsvType csv_type(const std::string& column) {
  static const std::map<std::string, CsvType> types = {
      {"duration_limit_s", CsvType::integer},  {"measured_duration_s", CsvType::number},
      {"tokens", CsvType::json_value},         {"token_timestamps", CsvType::json_value},
      {"retake", CsvType::boolean},            {"negation_count", CsvType::integer},            {"spq_total", CsvType::integer},
      {"spq_odd_speech", CsvType::integer},    {"srs_total", CsvType::integer},
      {"age", CsvType::integer},               {"srs_awareness", CsvType::integer},
      {"srs_cognition", CsvType::integer},     {"srs_communication", CsvType::integer},
  };
  auto it = types.find(column);
  return it == types.end() ? CsvType::string : it->second;
}

// Converts one CSV cell to JSON. Returns an error message on failure.
std::optional<std::string> csv_cell_to_json(const std::string& column, const std::string& cell,
                                            json& out) {
  const std::string_view v = trim(cell);
  switch (csv_type(column)) {
    case CsvType::string:
      out = cell;
      return std::nullopt;
    case CsvType::integer:
    case CsvType::number: {
      double d = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
      if (ec != std::errc{} || ptr != v.data() + v.size()) return "not a number: '" + cell + "'";
      if (csv_type(column) == CsvType::integer && d == std::floor(d))
        out = static_cast<long long>(d);
      else
        out = d;
      return std::nullopt;
    }
    case CsvType::boolean:
      if (v == "true" || v == "1") out = true;
      else if (v == "false" || v == "0") out = false;
      else return "not a boolean: '" + cell + "'";
      return std::nullopt;
    case CsvType::json_value:
      try {
        out = json::parse(v);
      } catch (const json::parse_error& e) {
        return std::string("embedded JSON: ") + e.what();
      }
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<RawRecord> read_records(const std::filesystem::path& path, Format format,
                                    std::vector<RowIssue>& issues) {
  const std::string file = path.string();
  const std::string data = read_file(path);
  const std::string_view body = strip_bom(data);
  std::vector<RawRecord> records;
  if (format == Format::jsonl) {
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const std::size_t nl = body.find('\n', pos);
      const std::string_view raw =
          body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line;
      pos = nl == std::string_view::npos ? body.size() + 1 : nl + 1;
      const std::string_view text = trim(raw);
      if (text.empty()) continue;
      try {
        json obj = json::parse(text);
        if (!obj.is_object()) {
          issues.push_back({RowIssue::Kind::parse, file, line, "", "", "line is not a JSON object"});
          continue;
        }
        records.push_back({line, std::move(obj)});
      } catch (const json::parse_error& e) {
        issues.push_back({RowIssue::Kind::parse, file, line, "", "", e.what()});
      }
    }
    return records;
  }
  const auto rows = parse_csv(body, file);
  if (rows.empty()) return records;
  const auto& header = rows.front().second;
  std::vector<std::string> columns;
  for (const auto& h : header) columns.emplace_back(trim(h));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, cells] = rows[r];
    if (cells.size() != columns.size()) {
      issues.push_back({RowIssue::Kind::parse, file, line, "", "",
                        "expected " + std::to_string(columns.size()) + " fields, got " +
                            std::to_string(cells.size())});
      continue;
    }
    json obj = json::object();
    std::optional<RowIssue> failure;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (cells[c].empty() && csv_type(columns[c]) != CsvType::string) continue;
      json value;
      if (auto err = csv_cell_to_json(columns[c], cells[c], value)) {
        failure = RowIssue{RowIssue::Kind::parse, file, line, "", columns[c], *err};
        break;
      }
      obj[columns[c]] = std::move(value);
    }
    if (failure) {
      issues.push_back(*failure);
      continue;
    }
    records.push_back({line, std::move(obj)});
  }
  return records;
}

// Field accessors. They throw RowFailure naming the field.
const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null())
    throw RowFailure{RowIssue::Kind::schema, field, "missing required field"};
  return *it;
}

std::string get_string(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_string()) throw RowFailure{RowIssue::Kind::schema, field, "expected a string"};
  return v.get<std::string>();
}

long long as_integer(const json& v, const char* field) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<long long>(d);
  }
  throw RowFailure{RowIssue::Kind::schema, field, "expected an integer"};
}

int get_int(const json& obj, const char* field) {
  return static_cast<int>(as_integer(require(obj, field), field));
}

std::optional<int> get_opt_int(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return static_cast<int>(as_integer(*it, field));
}

std::optional<std::string> present_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

SessionRecord session_from_json(const json& obj) {
  SessionRecord s;
  s.participant_id = get_string(obj, "participant_id");
  s.session_id = get_string(obj, "session_id");
  if (s.participant_id.empty())
    throw RowFailure{RowIssue::Kind::schema, "participant_id", "empty identifier"};
  if (s.session_id.empty())
    throw RowFailure{RowIssue::Kind::schema, "session_id", "empty identifier"};
  const std::string task = get_string(obj, "task");
  auto parsed = parse_task(task);
  if (!parsed) throw RowFailure{RowIssue::Kind::invariant, "task", "unknown task '" + task + "'"};
  s.task = *parsed;
  s.duration_limit_s = get_int(obj, "duration_limit_s");
  if (s.duration_limit_s <= 0)
    throw RowFailure{RowIssue::Kind::invariant, "duration_limit_s", "must be positive"};
  if (auto it = obj.find("measured_duration_s"); it != obj.end() && !it->is_null()) {
    if (!it->is_number())
      throw RowFailure{RowIssue::Kind::schema, "measured_duration_s", "expected a number"};
    const double d = it->get<double>();
    if (!(d > 0.0) || !std::isfinite(d))
      throw RowFailure{RowIssue::Kind::invariant, "measured_duration_s", "must be positive"};
    s.measured_duration_s = d;
  }
  s.transcript = get_string(obj, "transcript");
  if (trim(s.transcript).empty())
    throw RowFailure{RowIssue::Kind::invariant, "transcript", "empty after trimming"};
  if (auto it = obj.find("tokens"); it != obj.end() && !it->is_null()) {
    try {
      s.tokens = text::parse_interchange(*it);
    } catch (const Error& e) {
      throw RowFailure{RowIssue::Kind::schema, "tokens", e.what()};
    }
  }
  if (auto it = obj.find("token_timestamps"); it != obj.end() && !it->is_null()) {
    if (!it->is_array())
      throw RowFailure{RowIssue::Kind::schema, "token_timestamps", "expected an array"};
    for (const auto& e : *it) {
      TimedToken tt;
      if (e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number()) {
        tt = {e[0].get<std::size_t>(), e[1].get<double>()};
      } else if (e.is_object() && e.contains("token_index") && e.contains("start_s")) {
        tt = {e["token_index"].get<std::size_t>(), e["start_s"].get<double>()};
      } else {
        throw RowFailure{RowIssue::Kind::schema, "token_timestamps",
                         "entries must be [token_index, start_s]"};
      }
      if (!(tt.start_s >= 0.0))
        throw RowFailure{RowIssue::Kind::invariant, "token_timestamps", "negative start time"};
      s.token_timestamps.push_back(tt);
    }
  }
  if (auto it = obj.find("negation_count"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer())
      throw RowFailure{RowIssue::Kind::schema, "negation_count", "expected an integer"};
    if (it->get<long long>() < 0)
      throw RowFailure{RowIssue::Kind::invariant, "negation_count", "must be non-negative"};
    s.negation_count = it->get<int>();
  }
  if (auto it = obj.find("retake"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) throw RowFailure{RowIssue::Kind::schema, "retake", "expected a bool"};
    s.retake = it->get<bool>();
  }
  return s;
}

LabelSet labels_from_json(const json& obj) {
  LabelSet l;
  l.participant_id = get_string(obj, "participant_id");
  if (l.participant_id.empty())
    throw RowFailure{RowIssue::Kind::schema, "participant_id", "empty identifier"};
  l.spq_total = get_int(obj, "spq_total");
  l.spq_odd_speech = get_int(obj, "spq_odd_speech");
  l.srs_total = get_int(obj, "srs_total");
  l.age = get_opt_int(obj, "age");
  if (auto it = obj.find("gender"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw RowFailure{RowIssue::Kind::schema, "gender", "expected a string"};
    auto g = parse_gender(it->get<std::string>());
    if (!g) throw RowFailure{RowIssue::Kind::invariant, "gender",
                             "unknown gender '" + it->get<std::string>() + "'"};
    l.gender = *g;
  }
  l.srs_awareness = get_opt_int(obj, "srs_awareness");
  l.srs_cognition = get_opt_int(obj, "srs_cognition");
  l.srs_communication = get_opt_int(obj, "srs_communication");
  if (auto bad = check_labels(l)) throw RowFailure{RowIssue::Kind::invariant, bad->first, bad->second};
  return l;
}

}  // namespace

std::string_view to_string(LabelAxis axis) {
  switch (axis) {
    case LabelAxis::spq_total:
      return "spq_total";
    case LabelAxis::odd_speech:
      return "odd_speech";
    case LabelAxis::srs_total:
      return "srs_total";
    case LabelAxis::srs_awareness:
      return "srs_awareness";
    case LabelAxis::srs_cognition:
      return "srs_cognition";
    case LabelAxis::srs_communication:
      return "srs_communication";
  }
  return "?";
}

std::optional<LabelAxis> parse_label_axis(std::string_view name) {
  for (auto axis : {LabelAxis::spq_total, LabelAxis::odd_speech, LabelAxis::srs_total,
                    LabelAxis::srs_awareness, LabelAxis::srs_cognition,
                    LabelAxis::srs_communication}) {
    if (to_string(axis) == name) return axis;
  }
  if (name == "spq" || name == "SPQ") return LabelAxis::spq_total;
  if (name == "srs" || name == "SRS") return LabelAxis::srs_total;
  if (name == "spq_odd_speech") return LabelAxis::odd_speech;
  return std::nullopt;
}

std::optional<double> label_value(const LabelSet& labels, LabelAxis axis) {
  const auto opt = [](const std::optional<int>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
  };
  switch (axis) {
    case LabelAxis::spq_total:
      return labels.spq_total;
    case LabelAxis::odd_speech:
      return labels.spq_odd_speech;
    case LabelAxis::srs_total:
      return labels.srs_total;
    case LabelAxis::srs_awareness:
      return opt(labels.srs_awareness);
    case LabelAxis::srs_cognition:
      return opt(labels.srs_cognition);
    case LabelAxis::srs_communication:
      return opt(labels.srs_communication);
  }
  return std::nullopt;
}

bool operator==(const SessionRecord& a, const SessionRecord& b) {
  const auto same_tokens = [](const auto& x, const auto& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    if (x->size() != y->size()) return false;
    for (std::size_t i = 0; i < x->size(); ++i) {
      const auto& p = (*x)[i];
      const auto& q = (*y)[i];
      if (p.surface != q.surface || p.tag != q.tag || p.negation != q.negation) return false;
    }
    return true;
  };
  return a.participant_id == b.participant_id && a.session_id == b.session_id &&
         a.task == b.task && a.duration_limit_s == b.duration_limit_s &&
         a.measured_duration_s == b.measured_duration_s && a.transcript == b.transcript &&
         same_tokens(a.tokens, b.tokens) && a.token_timestamps == b.token_timestamps &&
         a.negation_count == b.negation_count && a.retake == b.retake;
}

const LabelSet& Corpus::labels_for(const std::string& participant_id) const {
  auto it = labels.find(participant_id);
  if (it == labels.end()) throw Error("no labels for participant '" + participant_id + "'");
  return it->second;
}

std::vector<std::string> Corpus::participants() const {
  std::set<std::string> ids;
  for (const auto& s : sessions) ids.insert(s.participant_id);
  return {ids.begin(), ids.end()};
}

std::optional<Format> format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return Format::jsonl;
  if (ext == ".csv") return Format::csv;
  return std::nullopt;
}

std::string_view to_string(RowIssue::Kind kind) {
  switch (kind) {
    case RowIssue::Kind::parse:
      return "parse error";
    case RowIssue::Kind::schema:
      return "schema error";
    case RowIssue::Kind::invariant:
      return "invariant violation";
  }
  return "?";
}

std::string RowIssue::describe() const {
  std::string out = file + ":" + std::to_string(line) + ": " + std::string(to_string(kind));
  if (!record_id.empty()) out += " in record '" + record_id + "'";
  if (!field.empty()) out += " (field " + field + ")";
  out += ": " + message;
  return out;
}

CorpusError::CorpusError(RowIssue issue) : Error(issue.describe()), issue_(std::move(issue)) {}

const Corpus& LoadResult::require_clean() const {
  if (!rejects.empty()) throw CorpusError(rejects.front());
  return corpus;
}

std::optional<std::pair<std::string, std::string>> check_labels(const LabelSet& l) {
  const auto range = [](int v, int hi) { return v >= 0 && v <= hi; };
  if (!range(l.spq_total, kSpqMax))
    return std::pair{"spq_total", "out of range 0-74: " + std::to_string(l.spq_total)};
  if (!range(l.spq_odd_speech, kOddSpeechMax))
    return std::pair{"spq_odd_speech", "out of range 0-9: " + std::to_string(l.spq_odd_speech)};
  if (l.spq_odd_speech > l.spq_total)
    return std::pair{std::string("spq_odd_speech"), std::string("exceeds spq_total")};
  if (!range(l.srs_total, kSrsMax))
    return std::pair{"srs_total", "out of range 0-195: " + std::to_string(l.srs_total)};
  if (l.age && *l.age <= 0) return std::pair{std::string("age"), std::string("must be positive")};
  const auto sub = [&](const std::optional<int>& v, const char* name)
      -> std::optional<std::pair<std::string, std::string>> {
    if (v && !range(*v, kSrsMax)) return std::pair{std::string(name), std::string("out of range")};
    return std::nullopt;
  };
  if (auto bad = sub(l.srs_awareness, "srs_awareness")) return bad;
  if (auto bad = sub(l.srs_cognition, "srs_cognition")) return bad;
  if (auto bad = sub(l.srs_communication, "srs_communication")) return bad;
  return std::nullopt;
}

LoadResult load_corpus(const std::filesystem::path& sessions_path,
                       const std::filesystem::path& labels_path, std::optional<Format> format) {
  const auto resolve = [&](const std::filesystem::path& p) {
    if (format) return *format;
    if (auto f = format_from_path(p)) return *f;
    throw Error("cannot infer format of " + p.string() + "; pass it explicitly");
  };
  LoadResult result;
  auto& rejects = result.rejects;

  const std::string labels_file = labels_path.string();
  for (const auto& rec : read_records(labels_path, resolve(labels_path), rejects)) {
    const std::string id = present_string(rec.object, "participant_id").value_or("");
    try {
      LabelSet l = labels_from_json(rec.object);
      if (result.corpus.labels.count(l.participant_id)) {
        rejects.push_back({RowIssue::Kind::invariant, labels_file, rec.line, id, "participant_id",
                           "duplicate label row"});
        continue;
      }
      result.corpus.labels.emplace(l.participant_id, std::move(l));
    } catch (const RowFailure& f) {
      rejects.push_back({f.kind, labels_file, rec.line, id, f.field, f.message});
    }
  }

  const std::string sessions_file = sessions_path.string();
  std::set<std::string> session_ids;
  std::set<std::tuple<std::string, Task, int>> slots;
  for (const auto& rec : read_records(sessions_path, resolve(sessions_path), rejects)) {
    const std::string id = present_string(rec.object, "session_id").value_or("");
    try {
      SessionRecord s = session_from_json(rec.object);
      if (!result.corpus.labels.count(s.participant_id))
        throw RowFailure{RowIssue::Kind::invariant, "participant_id",
                         "participant '" + s.participant_id + "' has no label row"};
      if (session_ids.count(s.session_id))
        throw RowFailure{RowIssue::Kind::invariant, "session_id", "duplicate session_id"};
      const auto slot = std::tuple{s.participant_id, s.task, s.duration_limit_s};
      if (!s.retake && slots.count(slot))
        throw RowFailure{RowIssue::Kind::invariant, "retake",
                         "second session for (participant, task, duration) not marked as retake"};
      session_ids.insert(s.session_id);
      if (!s.retake) slots.insert(slot);
      result.corpus.sessions.push_back(std::move(s));
    } catch (const RowFailure& f) {
      rejects.push_back({f.kind, sessions_file, rec.line, id, f.field, f.message});
    }
  }
  return result;
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& sessions_path,
                 const std::filesystem::path& labels_path) {
  std::ofstream sessions(sessions_path, std::ios::binary);
  std::ofstream labels(labels_path, std::ios::binary);
  if (!sessions || !labels) throw Error("cannot write corpus files");
  write_jsonl(corpus, sessions, labels);
}

std::string corpus_hash(const Corpus& corpus) {
  std::ostringstream sessions, labels;
  write_jsonl(corpus, sessions, labels);
  return text_hash_hex(sessions.str() + "\n--\n" + labels.str());
}

void write_jsonl(const Corpus& corpus, std::ostream& sessions, std::ostream& labels) {
  for (const auto& s : corpus.sessions) {
    json obj = {{"participant_id", s.participant_id},
                {"session_id", s.session_id},
                {"task", std::string(to_string(s.task))},
                {"duration_limit_s", s.duration_limit_s}};
    if (s.measured_duration_s) obj["measured_duration_s"] = *s.measured_duration_s;
    obj["transcript"] = s.transcript;
    if (s.tokens) {
      auto arr = json::array();
      for (const auto& e : *s.tokens) {
        json t = {{"surface", e.surface}, {"tag", e.tag}};
        if (e.negation) t["negation"] = *e.negation;
        arr.push_back(std::move(t));
      }
      obj["tokens"] = std::move(arr);
    }
    if (!s.token_timestamps.empty()) {
      auto arr = json::array();
      for (const auto& tt : s.token_timestamps) arr.push_back({tt.token_index, tt.start_s});
      obj["token_timestamps"] = std::move(arr);
    }
    if (s.negation_count) obj["negation_count"] = *s.negation_count;
    if (s.retake) obj["retake"] = true;
    sessions << obj.dump() << '\n';
  }
  for (const auto& [id, l] : corpus.labels) {
    json obj = {{"participant_id", id},
                {"spq_total", l.spq_total},
                {"spq_odd_speech", l.spq_odd_speech},
                {"srs_total", l.srs_total}};
    if (l.age) obj["age"] = *l.age;
    obj["gender"] = std::string(to_string(l.gender));
    if (l.srs_awareness) obj["srs_awareness"] = *l.srs_awareness;
    if (l.srs_cognition) obj["srs_cognition"] = *l.srs_cognition;
    if (l.srs_communication) obj["srs_communication"] = *l.srs_communication;
    labels << obj.dump() << '\n';
  }
}

const LabelStats* DemographicSummary::find(std::string_view name) const {
  for (const auto& s : labels) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

LabelStats stats_of(std::string name, const std::vector<double>& values) {
  LabelStats s;
  s.name = std::move(name);
  s.n = values.size();
  s.mean = ml::mean(values);
  s.sd = ml::sample_sd(values);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

}  // namespace

DemographicSummary summarize(const Corpus& corpus) {
  if (corpus.labels.empty()) throw Error("summarize: corpus has no participants");
  DemographicSummary out;
  out.participants = corpus.labels.size();
  out.sessions = corpus.sessions.size();
  for (Task t : kAllTasks) out.sessions_per_task[t] = 0;
  for (const auto& s : corpus.sessions) {
    ++out.sessions_per_task[s.task];
    ++out.sessions_per_duration[s.duration_limit_s];
  }
  std::vector<double> age, srs, spq, odd;
  for (const auto& [id, l] : corpus.labels) {
    if (l.age) age.push_back(*l.age);
    srs.push_back(l.srs_total);
    spq.push_back(l.spq_total);
    odd.push_back(l.spq_odd_speech);
    switch (l.gender) {
      case Gender::male:
        ++out.male;
        break;
      case Gender::female:
        ++out.female;
        break;
      case Gender::unspecified:
        ++out.unspecified;
        break;
    }
  }
  if (!age.empty()) out.labels.push_back(stats_of("age", age));
  out.labels.push_back(stats_of("srs_total", srs));
  out.labels.push_back(stats_of("spq_total", spq));
  out.labels.push_back(stats_of("odd_speech", odd));
  return out;
}

std::map<std::string, CutoffFlags> flag_cutoffs(const Corpus& corpus, const Cutoffs& cutoffs) {
  std::map<std::string, CutoffFlags> flags;
  for (const auto& [id, l] : corpus.labels) {
    flags[id] = {l.srs_total >= cutoffs.srs, l.spq_total >= cutoffs.spq};
  }
  return flags;
}

std::vector<AxisPair> default_label_pairs() {
  std::vector<AxisPair> pairs;
  for (auto row : {LabelAxis::spq_total, LabelAxis::odd_speech}) {
    for (auto col : {LabelAxis::spq_total, LabelAxis::odd_speech, LabelAxis::srs_total,
                     LabelAxis::srs_awareness, LabelAxis::srs_cognition,
                     LabelAxis::srs_communication}) {
      pairs.emplace_back(row, col);
    }
  }
  return pairs;
}

std::vector<ml::CorrelationReport> label_correlations(const Corpus& corpus,
                                                      const std::vector<AxisPair>& pairs,
                                                      double alpha) {
  std::vector<ml::CorrelationReport> reports;
  for (const auto& [a, b] : pairs) {
    std::vector<double> xs, ys;
    for (const auto& [id, l] : corpus.labels) {
      auto x = label_value(l, a);
      auto y = label_value(l, b);
      if (x && y) {
        xs.push_back(*x);
        ys.push_back(*y);
      }
    }
    if (xs.size() < 3) {
      throw Error("label_correlations: fewer than 3 participants with both " +
                  std::string(to_string(a)) + " and " + std::string(to_string(b)));
    }
    reports.push_back(ml::spearman(xs, ys, alpha));
  }
  return reports;
}

}  // namespace ftd::corpus
