#include "ftd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ftd/parallel.hpp"

namespace ftd::experiments {

std::string_view to_string(Target target) {
  switch (target) {
    case Target::spq_total:
      return "spq_total";
    case Target::odd_speech:
      return "odd_speech";
    case Target::srs_total:
      return "srs_total";
  }
  return "?";
}

std::string_view display_name(Target target) {
  switch (target) {
    case Target::spq_total:
      return "SPQ";
    case Target::odd_speech:
      return "Odd speech";
    case Target::srs_total:
      return "SRS";
  }
  return "?";
}

std::optional<Target> parse_target(std::string_view name) {
  for (auto t : kTargets) {
    if (to_string(t) == name) return t;
  }
  if (name == "spq" || name == "SPQ") return Target::spq_total;
  if (name == "srs" || name == "SRS") return Target::srs_total;
  if (name == "odd" || name == "spq_odd_speech") return Target::odd_speech;
  return std::nullopt;
}

corpus::LabelAxis label_axis(Target target) {
  switch (target) {
    case Target::spq_total:
      return corpus::LabelAxis::spq_total;
    case Target::odd_speech:
      return corpus::LabelAxis::odd_speech;
    case Target::srs_total:
      return corpus::LabelAxis::srs_total;
  }
  return corpus::LabelAxis::spq_total;
}

void ExperimentSpec::validate() const {
  if (phase_filter) {
    if (!duration_filter) throw Error("phase filter requires a duration filter");
    if (!(phase_filter->start_s >= 0.0 && phase_filter->start_s < phase_filter->end_s &&
          phase_filter->end_s <= static_cast<double>(*duration_filter))) {
      throw Error("phase filter must lie within the duration filter");
    }
  }
  if (excluded_groups.size() >= std::size(features::kAllGroups))
    throw Error("cannot exclude every feature group");
}

text::TokenizedTranscript slice_phase(const text::TokenizedTranscript& t,
                                      const std::vector<corpus::TimedToken>& timestamps,
                                      double start_s, double end_s, double total_s,
                                      const text::TextOptions& options) {
  if (!(start_s >= 0.0 && start_s < end_s && end_s <= total_s))
    throw Error("slice_phase: need 0 <= start < end <= total");
  const std::size_t n = t.tokens.size();
  std::vector<std::size_t> chosen;
  if (!timestamps.empty()) {
    // Tokens without their own timestamp inherit the previous one.
    std::vector<double> when(n, 0.0);
    std::vector<bool> stamped(n, false);
    for (const auto& tt : timestamps) {
      if (tt.token_index < n) {
        when[tt.token_index] = tt.start_s;
        stamped[tt.token_index] = true;
      }
    }
    double last = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (stamped[i]) last = when[i];
      when[i] = last;
      if (when[i] >= start_s && when[i] < end_s) chosen.push_back(i);
    }
  } else {
    const auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(n) * start_s / total_s));
    const auto hi = static_cast<std::size_t>(std::floor(static_cast<double>(n) * end_s / total_s));
    for (std::size_t i = lo; i < std::min(hi, n); ++i) chosen.push_back(i);
  }
  if (chosen.empty()) {
    throw Error("slice_phase: no tokens in [" + format_fixed(start_s, 1) + ", " +
                format_fixed(end_s, 1) + ") s");
  }
  text::TokenizedTranscript out;
  out.external_negation = t.external_negation;
  for (std::size_t i : chosen) out.tokens.push_back(t.tokens[i]);
  out.sentence_spans = text::segment_sentences(out.tokens, options);
  out.negation_count = text::detect_negations(out, options.negation_lexicon);
  return out;
}

std::vector<PhaseWindow> phase_thirds(double total_s) {
  return {{0.0, total_s / 3.0}, {total_s / 3.0, 2.0 * total_s / 3.0}, {2.0 * total_s / 3.0, total_s}};
}

Pipeline::Pipeline(const corpus::Corpus& corpus, std::shared_ptr<const embed::Provider> provider,
                   PipelineOptions options)
    : corpus_(corpus),
      provider_(std::move(provider)),
      options_(std::move(options)),
      transcripts_(corpus.sessions.size()),
      features_(corpus.sessions.size()) {
  if (!provider_) throw Error("pipeline needs an embedding provider");
}

void Pipeline::prepare(const std::vector<std::size_t>& sessions) const {
  std::vector<std::size_t> todo;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i : sessions) {
      if (!features_.at(i)) todo.push_back(i);
    }
  }
  std::vector<std::optional<text::TokenizedTranscript>> ts(todo.size());
  std::vector<std::optional<features::FeatureVector>> fs(todo.size());
  parallel_for(todo.size(), options_.cv.jobs, [&](std::size_t k) {
    const auto& session = corpus_.sessions[todo[k]];
    ts[k] = features::tokenize_session(session, options_.features);
    fs[k] = features::assemble(session, *ts[k], *provider_, options_.features);
  });
  std::lock_guard lock(mutex_);
  for (std::size_t k = 0; k < todo.size(); ++k) {
    if (!features_[todo[k]]) {
      transcripts_[todo[k]] = std::move(ts[k]);
      features_[todo[k]] = std::move(fs[k]);
    }
  }
}

const text::TokenizedTranscript& Pipeline::transcript(std::size_t session) const {
  prepare({session});
  std::lock_guard lock(mutex_);
  return *transcripts_.at(session);
}

const features::FeatureVector& Pipeline::features(std::size_t session) const {
  prepare({session});
  std::lock_guard lock(mutex_);
  return *features_.at(session);
}

std::vector<std::size_t> Pipeline::select(std::optional<Task> task, std::optional<int> duration) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < corpus_.sessions.size(); ++i) {
    const auto& s = corpus_.sessions[i];
    if (task && s.task != *task) continue;
    if (duration && s.duration_limit_s != *duration) continue;
    rows.push_back(i);
  }
  return rows;
}

std::vector<int> Pipeline::durations(std::optional<Task> task) const {
  std::set<int> d;
  for (std::size_t i : select(task, std::nullopt)) d.insert(corpus_.sessions[i].duration_limit_s);
  return {d.begin(), d.end()};
}

ml::FeatureMatrix Pipeline::feature_matrix(const ExperimentSpec& spec) const {
  spec.validate();
  const auto rows = select(spec.task_filter, spec.duration_filter);
  std::vector<const corpus::SessionRecord*> sessions;
  std::vector<features::FeatureVector> vectors;
  if (!spec.phase_filter) {
    prepare(rows);
    for (std::size_t i : rows) {
      sessions.push_back(&corpus_.sessions[i]);
      vectors.push_back(features(i));
    }
  } else {
    prepare(rows);
    const auto window = *spec.phase_filter;
    const double total = static_cast<double>(*spec.duration_filter);
    std::vector<std::optional<features::FeatureVector>> sliced(rows.size());
    parallel_for(rows.size(), options_.cv.jobs, [&](std::size_t k) {
      const auto& session = corpus_.sessions[rows[k]];
      text::TokenizedTranscript part;
      try {
        part = slice_phase(transcript(rows[k]), session.token_timestamps, window.start_s,
                           window.end_s, total, options_.features.text);
      } catch (const Error&) {
        return;  // empty slice: session contributes nothing to this phase
      }
      sliced[k] = features::assemble(session, part, *provider_, options_.features,
                                     window.end_s - window.start_s);
    });
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (!sliced[k]) continue;
      sessions.push_back(&corpus_.sessions[rows[k]]);
      vectors.push_back(std::move(*sliced[k]));
    }
  }
  auto matrix = features::to_matrix(sessions, vectors);
  if (spec.excluded_groups.empty()) return matrix;
  std::vector<std::size_t> keep;
  const auto& schema = features::feature_schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!spec.excluded_groups.count(schema[j].group)) keep.push_back(j);
  }
  return matrix.select_columns(keep);
}

Cell Pipeline::run_cell(const ExperimentSpec& spec) const {
  Cell cell;
  const double alpha = options_.cv.alpha;
  ml::FeatureMatrix matrix;
  try {
    matrix = feature_matrix(spec);
  } catch (const Error& e) {
    cell.report = ml::CorrelationReport::make_degenerate(0, e.what(), alpha);
    return cell;
  }
  cell.n_sessions = matrix.rows();
  std::set<std::string> participants(matrix.participant_ids.begin(), matrix.participant_ids.end());
  cell.n_participants = participants.size();
  if (cell.n_participants < 3) {
    cell.report = ml::CorrelationReport::make_degenerate(
        cell.n_sessions, "fewer than 3 participants in slice", alpha);
    return cell;
  }
  std::map<std::string, double> targets;
  for (const auto& id : participants) {
    targets[id] = *corpus::label_value(corpus_.labels_for(id), label_axis(spec.target));
  }
  try {
    auto result = ml::lopo_cv(matrix, targets, std::string(to_string(spec.target)), options_.cv);
    cell.report = result.report;
    cell.predictions = std::move(result);
  } catch (const Error& e) {
    cell.report = ml::CorrelationReport::make_degenerate(cell.n_sessions, e.what(), alpha);
  }
  return cell;
}

namespace {

std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

Table target_table(std::string id, std::string title, std::string row_header) {
  Table t;
  t.id = std::move(id);
  t.title = std::move(title);
  t.row_header = std::move(row_header);
  for (auto target : kTargets) t.column_labels.emplace_back(display_name(target));
  return t;
}

void fill_rows(Table& table, const Pipeline& pipeline, const std::vector<ExperimentSpec>& row_specs) {
  // Each cell is independent; cells run one after another while lopo_cv
  // parallelizes across folds.
  for (const auto& base : row_specs) {
    std::vector<Cell> row;
    for (auto target : kTargets) {
      ExperimentSpec spec = base;
      spec.target = target;
      row.push_back(pipeline.run_cell(spec));
    }
    table.cells.push_back(std::move(row));
  }
}

}  // namespace

Table run_label_correlations(const corpus::Corpus& corpus, double alpha) {
  using corpus::LabelAxis;
  Table t;
  t.id = "table2_label_corr";
  t.title = "Spearman correlation between schizotypal and autistic measures";
  t.row_header = "";
  const LabelAxis rows[] = {LabelAxis::spq_total, LabelAxis::odd_speech};
  const std::pair<LabelAxis, const char*> cols[] = {
      {LabelAxis::spq_total, "SPQ"},          {LabelAxis::odd_speech, "Odd."},
      {LabelAxis::srs_total, "SRS"},          {LabelAxis::srs_awareness, "Awr."},
      {LabelAxis::srs_cognition, "Cog."},     {LabelAxis::srs_communication, "Com."}};
  for (const auto& c : cols) t.column_labels.emplace_back(c.second);
  for (auto r : rows) {
    t.row_labels.emplace_back(r == LabelAxis::spq_total ? "SPQ" : "Odd");
    std::vector<Cell> row;
    for (const auto& c : cols) {
      Cell cell;
      try {
        cell.report = corpus::label_correlations(corpus, {{r, c.first}}, alpha).front();
        cell.n_participants = cell.report.n;
      } catch (const Error& e) {
        cell.report = ml::CorrelationReport::make_degenerate(0, e.what(), alpha);
      }
      row.push_back(std::move(cell));
    }
    t.cells.push_back(std::move(row));
  }
  return t;
}

Table run_task_comparison(const Pipeline& pipeline) {
  Table t = target_table("table3_tasks", "Task comparison", "Tasks");
  std::vector<ExperimentSpec> specs;
  for (Task task : kAllTasks) {
    t.row_labels.push_back(capitalized(to_string(task)));
    ExperimentSpec spec;
    spec.task_filter = task;
    specs.push_back(spec);
  }
  pipeline.prepare(pipeline.select(std::nullopt, std::nullopt));
  fill_rows(t, pipeline, specs);
  return t;
}

Table run_duration_comparison(const Pipeline& pipeline, Task task) {
  Table t = target_table("table4_duration", "Total duration effect", "Duration");
  t.note = "task=" + std::string(to_string(task));
  std::vector<ExperimentSpec> specs;
  for (int d : pipeline.durations(task)) {
    t.row_labels.push_back(std::to_string(d) + " sec.");
    ExperimentSpec spec;
    spec.task_filter = task;
    spec.duration_filter = d;
    specs.push_back(spec);
  }
  fill_rows(t, pipeline, specs);
  return t;
}

std::optional<int> phase_source_duration(const Pipeline& pipeline, Task task) {
  const auto ds = pipeline.durations(task);
  if (ds.empty() || ds.back() < pipeline.options().phase_min_duration_s) return std::nullopt;
  return ds.back();
}

Table run_phase_comparison(const Pipeline& pipeline, Task task) {
  Table t = target_table("table5_phase", "Speech phase effect", "Phase");
  const auto source = phase_source_duration(pipeline, task);
  const double total = source ? *source : 180.0;
  for (const auto& w : phase_thirds(total)) {
    t.row_labels.push_back(format_fixed(w.start_s, 0) + "-" + format_fixed(w.end_s, 0) + " sec.");
  }
  if (!source) {
    t.note = "task=" + std::string(to_string(task)) + "; no duration bucket reaches " +
             std::to_string(pipeline.options().phase_min_duration_s) + " s";
    for (std::size_t r = 0; r < 3; ++r) {
      std::vector<Cell> row(3);
      for (auto& c : row) {
        c.report = ml::CorrelationReport::make_degenerate(0, "no long-duration sessions",
                                                          pipeline.options().cv.alpha);
      }
      t.cells.push_back(std::move(row));
    }
    return t;
  }
  t.note = "task=" + std::string(to_string(task)) + "; source duration=" + std::to_string(*source) + " s";
  std::vector<ExperimentSpec> specs;
  for (const auto& w : phase_thirds(total)) {
    ExperimentSpec spec;
    spec.task_filter = task;
    spec.duration_filter = *source;
    spec.phase_filter = w;
    specs.push_back(spec);
  }
  fill_rows(t, pipeline, specs);
  return t;
}

Table run_ablation(const Pipeline& pipeline, std::optional<Task> task, std::optional<int> duration) {
  Table t = target_table("table6_ablation", "Ablation study", "Eliminated group");
  t.note = "task=" + (task ? std::string(to_string(*task)) : std::string("all")) +
           "; duration=" + (duration ? std::to_string(*duration) + " s" : std::string("all"));
  std::vector<ExperimentSpec> specs;
  ExperimentSpec all;
  all.task_filter = task;
  all.duration_filter = duration;
  t.row_labels.emplace_back("All features");
  specs.push_back(all);
  for (auto group : features::kAllGroups) {
    ExperimentSpec spec = all;
    spec.excluded_groups = {group};
    std::string label(features::to_string(group));
    std::replace(label.begin(), label.end(), '_', ' ');
    t.row_labels.push_back(capitalized(label));
    specs.push_back(spec);
  }
  fill_rows(t, pipeline, specs);
  return t;
}

}  // namespace ftd::experiments
