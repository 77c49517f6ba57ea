#include "ftd/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ftd::report {

using nlohmann::json;

std::optional<ReportFormat> parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "md" || name == "markdown") return ReportFormat::markdown;
  return std::nullopt;
}

std::string_view extension(ReportFormat format) {
  return format == ReportFormat::csv ? "csv" : "md";
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string markdown_cell(const experiments::Cell& cell) {
  const auto& r = cell.report;
  if (r.degenerate || !std::isfinite(r.rho)) return "n/a";
  std::string rho = format_fixed(r.rho, 2);
  if (r.significant) rho = "**" + rho + "**";
  return rho + " (p=" + format_fixed(r.p_value, 4) + ")";
}

std::string escape_md(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string emit_report(const experiments::Table& table, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << "row,column,rho,p_value,n,significant,degenerate,n_sessions,n_participants,note\n";
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
      for (std::size_t j = 0; j < table.cells[i].size(); ++j) {
        const auto& cell = table.cells[i][j];
        const auto& r = cell.report;
        out << csv_field(table.row_labels[i]) << ',' << csv_field(table.column_labels[j]) << ','
            << format_fixed(r.rho, 2) << ',' << format_fixed(r.p_value, 4) << ',' << r.n << ','
            << (r.significant ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << ','
            << cell.n_sessions << ',' << cell.n_participants << ',' << csv_field(r.note) << '\n';
      }
    }
    return out.str();
  }
  out << "## " << table.title << "\n\n";
  out << "| " << escape_md(table.row_header) << " |";
  for (const auto& c : table.column_labels) out << ' ' << escape_md(c) << " |";
  out << "\n|---|";
  for (std::size_t j = 0; j < table.column_labels.size(); ++j) out << "---|";
  out << '\n';
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    out << "| " << escape_md(table.row_labels[i]) << " |";
    for (const auto& cell : table.cells[i]) out << ' ' << markdown_cell(cell) << " |";
    out << '\n';
  }
  out << "\nBold: p < " << format_fixed(table.cells.empty() || table.cells[0].empty()
                                             ? ml::kDefaultAlpha
                                             : table.cells[0][0].report.alpha,
                                         2)
      << " (Spearman, two-sided).";
  if (!table.note.empty()) out << ' ' << escape_md(table.note) << '.';
  out << '\n';
  return out.str();
}

std::string emit_summary(const corpus::DemographicSummary& summary,
                         const std::map<std::string, corpus::CutoffFlags>& flags,
                         ReportFormat format) {
  std::size_t srs_candidates = 0, spq_candidates = 0;
  for (const auto& [id, f] : flags) {
    srs_candidates += f.srs_candidate ? 1 : 0;
    spq_candidates += f.spq_candidate ? 1 : 0;
  }
  auto population_sd = [](const corpus::LabelStats& s) {
    return s.n > 1 ? s.sd * std::sqrt(static_cast<double>(s.n - 1) / static_cast<double>(s.n)) : 0.0;
  };
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << "statistic,n,mean,sd_sample,sd_population,min,max\n";
    for (const auto& s : summary.labels) {
      out << s.name << ',' << s.n << ',' << format_fixed(s.mean, 2) << ',' << format_fixed(s.sd, 2)
          << ',' << format_fixed(population_sd(s), 2) << ',' << format_fixed(s.min, 2) << ','
          << format_fixed(s.max, 2) << '\n';
    }
    out << "count,value\n";
    out << "participants," << summary.participants << '\n';
    out << "sessions," << summary.sessions << '\n';
    out << "male," << summary.male << '\n';
    out << "female," << summary.female << '\n';
    out << "gender_unspecified," << summary.unspecified << '\n';
    out << "srs_cutoff_candidates," << srs_candidates << '\n';
    out << "spq_cutoff_candidates," << spq_candidates << '\n';
    for (const auto& [task, n] : summary.sessions_per_task)
      out << "sessions_task_" << to_string(task) << ',' << n << '\n';
    for (const auto& [d, n] : summary.sessions_per_duration)
      out << "sessions_duration_" << d << "s," << n << '\n';
    return out.str();
  }
  out << "## Participant summary\n\n";
  out << "| Measure | n | Mean | SD (sample) | SD (population) | Min | Max |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& s : summary.labels) {
    out << "| " << s.name << " | " << s.n << " | " << format_fixed(s.mean, 2) << " | "
        << format_fixed(s.sd, 2) << " | " << format_fixed(population_sd(s), 2) << " | "
        << format_fixed(s.min, 2) << " | " << format_fixed(s.max, 2) << " |\n";
  }
  out << "\n| Count | Value |\n|---|---|\n";
  out << "| Participants | " << summary.participants << " |\n";
  out << "| Sessions | " << summary.sessions << " |\n";
  out << "| Male | " << summary.male << " |\n";
  out << "| Female | " << summary.female << " |\n";
  out << "| Gender unspecified | " << summary.unspecified << " |\n";
  out << "| SRS cutoff candidates | " << srs_candidates << " |\n";
  out << "| SPQ cutoff candidates | " << spq_candidates << " |\n";
  for (const auto& [task, n] : summary.sessions_per_task)
    out << "| Sessions (" << to_string(task) << ") | " << n << " |\n";
  for (const auto& [d, n] : summary.sessions_per_duration)
    out << "| Sessions (" << d << " s) | " << n << " |\n";
  return out.str();
}

void write_predictions_csv(std::ostream& out, const ml::PredictionResult& result) {
  out << "participant_id,session_id,ground_truth,prediction,fold_index,k_selected\n";
  char buf[64];
  for (const auto& r : result.rows) {
    out << csv_field(r.participant_id) << ',' << csv_field(r.session_id) << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.ground_truth);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.prediction);
    out << buf << ',' << r.fold_index << ',' << r.k_selected << '\n';
  }
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const experiments::Cell* find_cell(const experiments::Table& t, std::string_view row,
                                   std::string_view column) {
  for (std::size_t i = 0; i < t.row_labels.size(); ++i) {
    if (t.row_labels[i] != row) continue;
    for (std::size_t j = 0; j < t.column_labels.size(); ++j) {
      if (t.column_labels[j] == column) return &t.cells[i][j];
    }
  }
  return nullptr;
}

}  // namespace

std::string emit_manifest(const ManifestInfo& info, const std::vector<experiments::Table>& tables) {
  json m;
  m["seed"] = info.seed;
  m["alpha"] = info.alpha;
  m["provider"] = info.provider;
  m["corpus_hash"] = info.corpus_hash;
  m["sessions"] = info.sessions;
  m["participants"] = info.participants;
  m["phase_source_duration_s"] =
      info.phase_source_duration_s ? json(*info.phase_source_duration_s) : json(nullptr);
  json signs = json::object();
  for (const auto& [term, s] : info.cdi_signs.sign) signs[term] = s;
  m["cdi_signs"] = {{"mode", info.cdi_signs_mode}, {"signs", signs}};

  json tables_json = json::object();
  for (const auto& t : tables) {
    json cells = json::array();
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      for (std::size_t j = 0; j < t.cells[i].size(); ++j) {
        const auto& c = t.cells[i][j];
        cells.push_back({{"row", t.row_labels[i]},
                         {"column", t.column_labels[j]},
                         {"n", c.report.n},
                         {"n_sessions", c.n_sessions},
                         {"n_participants", c.n_participants},
                         {"degenerate", c.report.degenerate}});
      }
    }
    tables_json[t.id] = {{"title", t.title}, {"note", t.note}, {"cells", std::move(cells)}};
  }
  m["tables"] = std::move(tables_json);

  for (const auto& t : tables) {
    if (t.id != "table3_tasks") continue;
    const auto* neg = find_cell(t, "Negative", "Odd speech");
    const auto* fav = find_cell(t, "Favorite", "Odd speech");
    if (!neg || !fav) break;
    const double a = neg->report.rho, b = fav->report.rho;
    json check = {{"negative_odd_speech_rho", number_or_null(a)},
                  {"favorite_odd_speech_rho", number_or_null(b)},
                  {"binding", false}};
    if (std::isfinite(a) && std::isfinite(b))
      check["negative_positive_and_above_favorite"] = a > 0.0 && b < a;
    else
      check["negative_positive_and_above_favorite"] = nullptr;
    m["ordering_check"] = std::move(check);
  }
  return m.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace ftd::report
