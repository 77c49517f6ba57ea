#include <cmath>

#include "doctest.h"
#include "ftd/common.hpp"
#include "ftd/experiments.hpp"
#include "ftd/synthetic.hpp"
#include "test_util.hpp"

using namespace ftd;
using namespace ftd::experiments;
using text::CanonicalTag;
using testutil::tok;

namespace {

corpus::Corpus small_corpus(std::vector<Task> tasks, std::vector<int> durations, std::size_t participants = 10,
                            double strength = 1.0) {
  synthetic::SyntheticConfig c;
  c.participants = participants;
  c.tasks = std::move(tasks);
  c.durations = std::move(durations);
  c.strength = strength;
  return synthetic::generate(c);
}

std::shared_ptr<const embed::Provider> provider() { return embed::test_embedder(1, 16); }

// Two-sided Fisher z test for equal correlations on samples of n1 and n2.
bool correlations_differ(double r1, std::size_t n1, double r2, std::size_t n2) {
  const double z = (std::atanh(r1) - std::atanh(r2)) /
                   std::sqrt(1.0 / static_cast<double>(n1 - 3) + 1.0 / static_cast<double>(n2 - 3));
  return std::fabs(z) > 1.96;
}

bool same_matrix(const ml::Matrix& a, const ml::Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const bool both_nan = std::isnan(a(i, j)) && std::isnan(b(i, j));
      if (!both_nan && a(i, j) != b(i, j)) return false;
    }
  return true;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("target names") {
    CHECK(parse_target("odd_speech") == Target::odd_speech);
    CHECK(parse_target("spq_total") == Target::spq_total);
    CHECK(parse_target("srs") == Target::srs_total);
    CHECK_FALSE(parse_target("iq").has_value());
    for (auto t : kTargets) CHECK(parse_target(to_string(t)) == t);
  }

  TEST_CASE("slice_phase splits by index without timestamps") {
    std::vector<text::Token> tokens;
    for (int i = 0; i < 90; ++i) tokens.push_back(tok(i % 10 == 9 ? "。" : "w" + std::to_string(i),
                                                      i % 10 == 9 ? CanonicalTag::punctuation : CanonicalTag::noun));
    auto t = testutil::transcript(tokens);
    std::vector<text::Token> joined;
    for (const auto& w : phase_thirds(180)) {
      auto s = slice_phase(t, {}, w.start_s, w.end_s, 180);
      CHECK(s.tokens.size() == 30);
      CHECK(s.sentence_spans.size() == 3);
      joined.insert(joined.end(), s.tokens.begin(), s.tokens.end());
    }
    CHECK(joined == t.tokens);
    CHECK(phase_thirds(180) == std::vector<PhaseWindow>{{0, 60}, {60, 120}, {120, 180}});
  }

  TEST_CASE("slice_phase partitions arbitrary lengths") {
    for (std::size_t n = 3; n < 50; ++n) {
      std::vector<text::Token> tokens(n, tok("w", CanonicalTag::noun));
      auto t = testutil::transcript(tokens);
      std::size_t total = 0;
      for (const auto& w : phase_thirds(180)) total += slice_phase(t, {}, w.start_s, w.end_s, 180).tokens.size();
      CHECK(total == n);
    }
  }

  TEST_CASE("slice_phase uses timestamps when present") {
    std::vector<text::Token> tokens;
    std::vector<corpus::TimedToken> stamps;
    for (std::size_t i = 0; i < 20; ++i) {
      tokens.push_back(tok("w", CanonicalTag::noun));
      if (i % 2 == 0) stamps.push_back({i, 2.5 * static_cast<double>(i)});
    }
    auto t = testutil::transcript(tokens);
    auto first = slice_phase(t, stamps, 0, 60, 180);
    CHECK(first.tokens.size() == 20);
    CHECK_THROWS_AS(slice_phase(t, stamps, 60, 120, 180), Error);
    CHECK_THROWS_AS(slice_phase(t, stamps, 120, 180, 180), Error);
    // Carry-forward: stamps 0, 5, 10, ... cover tokens pairwise.
    CHECK(slice_phase(t, stamps, 10, 20, 180).tokens.size() == 4);
    CHECK_THROWS_AS(slice_phase(t, {}, 50, 40, 180), Error);
    CHECK_THROWS_AS(slice_phase(t, {}, 0, 200, 180), Error);
  }

  TEST_CASE("slice_phase recounts negations inside the slice") {
    auto t = testutil::transcript({tok("行か", CanonicalTag::verb), tok("ない", CanonicalTag::auxiliary_verb),
                                   tok("見る", CanonicalTag::verb)});
    t.precomputed_negations = 7;
    t.negation_count = 7;
    CHECK(slice_phase(t, {}, 0, 2, 3).negation_count == 1);
    CHECK(slice_phase(t, {}, 2, 3, 3).negation_count == 0);
  }

  TEST_CASE("experiment spec validation") {
    ExperimentSpec s;
    CHECK_NOTHROW(s.validate());
    s.phase_filter = PhaseWindow{0, 60};
    CHECK_THROWS_AS(s.validate(), Error);
    s.duration_filter = 30;
    CHECK_THROWS_AS(s.validate(), Error);
    s.duration_filter = 180;
    CHECK_NOTHROW(s.validate());
    ExperimentSpec all;
    for (auto g : features::kAllGroups) all.excluded_groups.insert(g);
    CHECK_THROWS_AS(all.validate(), Error);
  }

  TEST_CASE("one-task corpus leaves other task rows degenerate") {
    auto corpus = small_corpus({Task::negative}, {60});
    Pipeline p(corpus, provider());
    auto table = run_task_comparison(p);
    CHECK(table.row_labels == std::vector<std::string>{"Dream", "Favorite", "Negative", "Mistake"});
    CHECK(table.column_labels.size() == 3);
    for (std::size_t r = 0; r < 4; ++r) {
      for (const auto& cell : table.cells[r]) {
        CHECK(cell.report.degenerate == (r != 2));
        if (r == 2) CHECK(cell.n_participants == 10);
      }
    }
  }

  TEST_CASE("duration and phase grids follow the data") {
    auto corpus = small_corpus({Task::negative}, {60});
    Pipeline p(corpus, provider());
    auto durations = run_duration_comparison(p);
    CHECK(durations.row_labels == std::vector<std::string>{"60 sec."});
    CHECK_FALSE(phase_source_duration(p).has_value());
    auto phases = run_phase_comparison(p);
    CHECK(phases.row_labels.size() == 3);
    for (const auto& row : phases.cells)
      for (const auto& cell : row) CHECK(cell.report.degenerate);
  }

  TEST_CASE("ablation all-features row equals the task cell") {
    auto corpus = small_corpus({Task::negative, Task::dream}, {60}, 8);
    Pipeline p(corpus, provider());
    auto tasks = run_task_comparison(p);
    auto ablation = run_ablation(p);
    CHECK(ablation.row_labels.size() == 6);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& a = ablation.cells[0][c].report;
      const auto& b = tasks.cells[2][c].report;
      CHECK(a.degenerate == b.degenerate);
      if (!a.degenerate) {
        CHECK(a.rho == b.rho);
        CHECK(a.p_value == b.p_value);
      }
    }
  }

  TEST_CASE("filtering commutes with extraction") {
    auto corpus = small_corpus({Task::negative, Task::favorite}, {30, 60}, 5);
    corpus::Corpus only = corpus;
    std::erase_if(only.sessions, [](const auto& s) { return s.task != Task::negative || s.duration_limit_s != 60; });
    Pipeline full(corpus, provider()), part(only, provider());
    ExperimentSpec spec;
    spec.task_filter = Task::negative;
    spec.duration_filter = 60;
    auto a = full.feature_matrix(spec);
    auto b = part.feature_matrix(ExperimentSpec{});
    CHECK(a.session_ids == b.session_ids);
    CHECK(same_matrix(a.values, b.values));

    spec.excluded_groups = {features::FeatureGroup::temporal};
    auto reduced = full.feature_matrix(spec);
    CHECK(reduced.values.cols() == 20);
  }

  TEST_CASE("cells are reproducible and independent of jobs") {
    auto corpus = small_corpus({Task::negative}, {60}, 8);
    PipelineOptions one, four;
    one.cv.jobs = 1;
    four.cv.jobs = 4;
    Pipeline a(corpus, provider(), one), b(corpus, provider(), four);
    ExperimentSpec spec;
    auto ca = a.run_cell(spec), cb = b.run_cell(spec), again = a.run_cell(spec);
    CHECK(ca.report.rho == cb.report.rho);
    CHECK(ca.report.rho == again.report.rho);
    CHECK(ca.report.p_value == cb.report.p_value);
  }

  TEST_CASE("planted negative-task signal dominates the task table") {
    auto corpus = small_corpus({std::begin(kAllTasks), std::end(kAllTasks)}, {60}, 30);
    Pipeline p(corpus, provider());
    auto table = run_task_comparison(p);
    const auto odd = 1;
    const auto& negative = table.cells[2][odd].report;
    CHECK(negative.significant);
    for (std::size_t r : {0u, 1u, 3u}) {
      CAPTURE(r);
      CHECK(table.cells[r][odd].report.rho < negative.rho);
    }
  }

  TEST_CASE("planted signal grows with duration") {
    synthetic::SyntheticConfig c;
    c.participants = 30;
    c.tasks = {Task::negative};
    c.durations = {30, 60, 180};
    c.noise = 0.0;
    auto corpus = synthetic::generate(c);
    Pipeline p(corpus, provider());
    auto table = run_duration_comparison(p);
    REQUIRE(table.cells.size() == 3);
    const auto rho = [&](std::size_t r) { return table.cells[r][1].report.rho; };
    CHECK(rho(0) <= rho(1));
    CHECK(rho(1) <= rho(2));
  }

  TEST_CASE("uniform signal gives indistinguishable phase rows") {
    auto corpus = small_corpus({Task::negative}, {180}, 30);
    Pipeline p(corpus, provider());
    CHECK(phase_source_duration(p) == 180);
    auto table = run_phase_comparison(p);
    REQUIRE(table.cells.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& a = table.cells[i][1].report;
      CHECK_FALSE(a.degenerate);
      for (std::size_t j = i + 1; j < 3; ++j) {
        const auto& b = table.cells[j][1].report;
        CHECK_FALSE(correlations_differ(a.rho, a.n, b.rho, b.n));
      }
    }
  }

  TEST_CASE("ablation responds to the group carrying the signal") {
    auto corpus = small_corpus({Task::negative}, {60}, 30);
    Pipeline p(corpus, provider());
    auto table = run_ablation(p);
    const auto rho = [&](std::size_t r) { return table.cells[r][1].report; };
    const auto all = rho(0);
    // Rows: all, -embedding, -content, -function, -abstract, -temporal.
    CHECK(rho(3).rho < all.rho);
    const auto noise = rho(5);
    CHECK_FALSE(correlations_differ(all.rho, all.n, noise.rho, noise.n));
  }
}
