#include <algorithm>
#include <random>

#include "doctest.h"
#include "ftd/corpus.hpp"
#include "test_util.hpp"

using namespace ftd;
using namespace ftd::corpus;

namespace {

const char* kLabels =
    R"({"participant_id":"A","spq_total":10,"spq_odd_speech":2,"srs_total":50,"age":30,"gender":"male"})"
    "\n"
    R"({"participant_id":"B","spq_total":41,"spq_odd_speech":5,"srs_total":81,"gender":"female"})"
    "\n"
    R"({"participant_id":"C","spq_total":20,"spq_odd_speech":9,"srs_total":80})"
    "\n";

const char* kSessions =
    R"({"participant_id":"A","session_id":"s1","task":"dream","duration_limit_s":30,"transcript":"今日は晴れ。"})"
    "\n"
    R"({"participant_id":"B","session_id":"s2","task":"negative","duration_limit_s":60,"measured_duration_s":55.5,"transcript":"嫌だった。"})"
    "\n"
    R"({"participant_id":"C","session_id":"s3","task":"mistake","duration_limit_s":180,"transcript":"失敗した。","tokens":[{"surface":"失敗","tag":"名詞"},{"surface":"した","tag":"動詞"},{"surface":"。","tag":"補助記号"}]})"
    "\n";

struct Files {
  std::filesystem::path dir, sessions, labels;
};

Files write(const std::string& sessions, const std::string& labels, const std::string& ext = "jsonl") {
  Files f;
  f.dir = testutil::temp_dir("corpus");
  f.sessions = f.dir / ("sessions." + ext);
  f.labels = f.dir / ("labels." + ext);
  testutil::write_file(f.sessions, sessions);
  testutil::write_file(f.labels, labels);
  return f;
}

bool has_reject(const LoadResult& r, const std::string& field) {
  return std::any_of(r.rejects.begin(), r.rejects.end(), [&](const RowIssue& i) { return i.field == field; });
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("well-formed 3-session file") {
    auto f = write(kSessions, kLabels);
    auto r = load_corpus(f.sessions, f.labels);
    CHECK(r.rejects.empty());
    REQUIRE(r.corpus.sessions.size() == 3);
    CHECK(r.corpus.labels.size() == 3);
    CHECK(r.corpus.sessions[1].measured_duration_s == 55.5);
    CHECK(r.corpus.sessions[1].effective_duration_s() == 55.5);
    CHECK(r.corpus.sessions[0].effective_duration_s() == 30.0);
    CHECK(r.corpus.sessions[2].tokens->size() == 3);
    CHECK(r.corpus.labels_for("A").age == 30);
    CHECK(r.corpus.labels_for("C").gender == Gender::unspecified);
    CHECK_NOTHROW(r.require_clean());
  }

  TEST_CASE("spq_total out of range names the field") {
    std::string labels = kLabels;
    labels += R"({"participant_id":"D","spq_total":75,"spq_odd_speech":2,"srs_total":50})"
              "\n";
    auto f = write(kSessions, labels);
    auto r = load_corpus(f.sessions, f.labels);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].field == "spq_total");
    CHECK(r.rejects[0].kind == RowIssue::Kind::invariant);
    CHECK(r.rejects[0].line == 4);
    CHECK(r.rejects[0].record_id == "D");
    CHECK(r.rejects[0].describe().find("spq_total") != std::string::npos);
    CHECK_THROWS_AS(r.require_clean(), CorpusError);
  }

  TEST_CASE("label invariants") {
    const std::pair<const char*, const char*> bad[] = {
        {R"({"participant_id":"D","spq_total":3,"spq_odd_speech":5,"srs_total":50})", "spq_odd_speech"},
        {R"({"participant_id":"D","spq_total":30,"spq_odd_speech":10,"srs_total":50})", "spq_odd_speech"},
        {R"({"participant_id":"D","spq_total":30,"spq_odd_speech":1,"srs_total":196})", "srs_total"},
        {R"({"participant_id":"D","spq_total":-1,"spq_odd_speech":0,"srs_total":5})", "spq_total"},
        {R"({"participant_id":"D","spq_total":30,"spq_odd_speech":1,"srs_total":50,"age":0})", "age"},
        {R"({"participant_id":"D","spq_total":30,"spq_odd_speech":1,"srs_total":50,"gender":"x"})", "gender"},
        {R"({"participant_id":"D","spq_odd_speech":1,"srs_total":50})", "spq_total"},
    };
    for (const auto& [row, field] : bad) {
      const std::string row_text = row;
      CAPTURE(row_text);
      auto f = write(kSessions, std::string(kLabels) + row + "\n");
      auto r = load_corpus(f.sessions, f.labels);
      CHECK(has_reject(r, field));
    }
  }

  TEST_CASE("session invariants") {
    const std::pair<const char*, const char*> bad[] = {
        {R"({"participant_id":"A","session_id":"s1","task":"dream","duration_limit_s":60,"transcript":"x"})", "session_id"},
        {R"({"participant_id":"A","session_id":"s9","task":"dream","duration_limit_s":30,"transcript":"x"})", "retake"},
        {R"({"participant_id":"A","session_id":"s9","task":"nightmare","duration_limit_s":30,"transcript":"x"})", "task"},
        {R"({"participant_id":"A","session_id":"s9","task":"dream","duration_limit_s":60,"transcript":"  　 "})", "transcript"},
        {R"({"participant_id":"Z","session_id":"s9","task":"dream","duration_limit_s":60,"transcript":"x"})", "participant_id"},
        {R"({"participant_id":"A","session_id":"s9","task":"dream","duration_limit_s":0,"transcript":"x"})", "duration_limit_s"},
        {R"({"participant_id":"A","session_id":"s9","task":"dream","duration_limit_s":60})", "transcript"},
        {R"({"participant_id":"A","session_id":"s9","task":"dream","duration_limit_s":60,"transcript":"x","negation_count":-1})", "negation_count"},
        {R"({"participant_id":"A","session_id":"s9","task":"dream","duration_limit_s":60,"transcript":"x","tokens":[{"surface":"x"}]})", "tokens"},
    };
    for (const auto& [row, field] : bad) {
      const std::string row_text = row;
      CAPTURE(row_text);
      auto f = write(std::string(kSessions) + row + "\n", kLabels);
      auto r = load_corpus(f.sessions, f.labels);
      CHECK(r.corpus.sessions.size() == 3);
      CHECK(has_reject(r, field));
    }
  }

  TEST_CASE("malformed JSON line is a parse reject with its line number") {
    auto f = write(std::string(kSessions) + "{not json\n", kLabels);
    auto r = load_corpus(f.sessions, f.labels);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].kind == RowIssue::Kind::parse);
    CHECK(r.rejects[0].line == 4);
  }

  TEST_CASE("retakes may repeat participant, task and duration") {
    std::string extra =
        R"({"participant_id":"A","session_id":"s1b","task":"dream","duration_limit_s":30,"transcript":"again","retake":true})"
        "\n";
    auto f = write(std::string(kSessions) + extra, kLabels);
    auto r = load_corpus(f.sessions, f.labels);
    CHECK(r.rejects.empty());
    CHECK(r.corpus.sessions.size() == 4);
  }

  TEST_CASE("BOM is stripped") {
    auto f = write(std::string("\xEF\xBB\xBF") + kSessions, std::string("\xEF\xBB\xBF") + kLabels);
    auto r = load_corpus(f.sessions, f.labels);
    CHECK(r.rejects.empty());
    CHECK(r.corpus.sessions.size() == 3);
  }

  TEST_CASE("CSV input matches JSONL input") {
    const std::string sessions_csv =
        "participant_id,session_id,task,duration_limit_s,measured_duration_s,transcript,tokens\n"
        "A,s1,dream,30,,今日は晴れ。,\n"
        "B,s2,negative,60,55.5,嫌だった。,\n"
        "C,s3,mistake,180,,失敗した。,\"[{\"\"surface\"\":\"\"失敗\"\",\"\"tag\"\":\"\"名詞\"\"},"
        "{\"\"surface\"\":\"\"した\"\",\"\"tag\"\":\"\"動詞\"\"},{\"\"surface\"\":\"\"。\"\",\"\"tag\"\":\"\"補助記号\"\"}]\"\n";
    const std::string labels_csv =
        "participant_id,spq_total,spq_odd_speech,srs_total,age,gender\n"
        "A,10,2,50,30,male\n"
        "B,41,5,81,,female\n"
        "C,20,9,80,,\n";
    auto c = write(sessions_csv, labels_csv, "csv");
    auto j = write(kSessions, kLabels);
    auto rc = load_corpus(c.sessions, c.labels);
    auto rj = load_corpus(j.sessions, j.labels);
    CHECK(rc.rejects.empty());
    CHECK(rc.corpus.sessions == rj.corpus.sessions);
    CHECK(rc.corpus.labels == rj.corpus.labels);
  }

  TEST_CASE("CSV with a bad number is rejected with its line") {
    const std::string labels_csv =
        "participant_id,spq_total,spq_odd_speech,srs_total\n"
        "A,10,2,50\nB,ten,5,81\nC,20,9,80\n";
    auto f = write(kSessions, labels_csv, "csv");
    auto r = load_corpus(f.sessions, f.labels, Format::csv);
    CHECK(has_reject(r, "spq_total"));
  }

  TEST_CASE("loading a shuffled file yields the same records") {
    std::vector<std::string> lines;
    std::string all = kSessions;
    for (int i = 0; i < 20; ++i) {
      lines.push_back(R"({"participant_id":")" + std::string(1, "ABC"[i % 3]) + R"(","session_id":"x)" +
                      std::to_string(i) + R"(","task":"favorite","duration_limit_s":)" +
                      std::to_string(10 + i) + R"(,"transcript":"t)" + std::to_string(i) + "\"}");
    }
    std::string ordered;
    for (const auto& l : lines) ordered += l + "\n";
    std::mt19937_64 rng(5);
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string shuffled;
    for (const auto& l : lines) shuffled += l + "\n";
    auto a = load_corpus(write(ordered, kLabels).sessions, write(ordered, kLabels).labels);
    auto fb = write(shuffled, kLabels);
    auto b = load_corpus(fb.sessions, fb.labels);
    auto key = [](const SessionRecord& s) { return s.session_id; };
    auto sa = a.corpus.sessions, sb = b.corpus.sessions;
    std::sort(sa.begin(), sa.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    std::sort(sb.begin(), sb.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
    CHECK(sa == sb);
    CHECK(corpus_hash(a.corpus) != corpus_hash(b.corpus));
  }

  TEST_CASE("write_jsonl round trip") {
    auto f = write(kSessions, kLabels);
    auto r = load_corpus(f.sessions, f.labels);
    r.corpus.sessions[0].negation_count = 2;
    r.corpus.sessions[0].token_timestamps = {{0, 0.0}, {1, 1.5}};
    auto out = testutil::temp_dir("roundtrip");
    write_jsonl(r.corpus, out / "s.jsonl", out / "l.jsonl");
    auto back = load_corpus(out / "s.jsonl", out / "l.jsonl");
    CHECK(back.rejects.empty());
    CHECK(back.corpus.sessions == r.corpus.sessions);
    CHECK(back.corpus.labels == r.corpus.labels);
    CHECK(corpus_hash(back.corpus) == corpus_hash(r.corpus));
  }

  TEST_CASE("summarize") {
    auto f = write(kSessions, kLabels);
    auto s = summarize(load_corpus(f.sessions, f.labels).corpus);
    CHECK(s.participants == 3);
    CHECK(s.sessions == 3);
    CHECK(s.male == 1);
    CHECK(s.female == 1);
    CHECK(s.unspecified == 1);
    const auto* spq = s.find("spq_total");
    REQUIRE(spq);
    CHECK(spq->mean == doctest::Approx(71.0 / 3.0));
    // sample SD of {10, 41, 20}
    CHECK(spq->sd == doctest::Approx(15.8219).epsilon(1e-5));
    CHECK(spq->min == 10);
    CHECK(spq->max == 41);
    CHECK(s.sessions_per_task.at(Task::dream) == 1);
    CHECK(s.sessions_per_task.at(Task::favorite) == 0);
    CHECK(s.sessions_per_duration.at(180) == 1);
  }

  TEST_CASE("summarize single participant and constant labels") {
    Corpus c;
    c.labels["A"] = LabelSet{"A", 10, 1, 20};
    auto s = summarize(c);
    CHECK(s.find("spq_total")->mean == 10.0);
    CHECK(s.find("spq_total")->sd == 0.0);
    c.labels["B"] = LabelSet{"B", 10, 1, 20};
    c.labels["C"] = LabelSet{"C", 10, 1, 20};
    for (const auto& l : summarize(c).labels) CHECK(l.sd == 0.0);
    CHECK_THROWS_AS(summarize(Corpus{}), Error);
  }

  TEST_CASE("flag_cutoffs") {
    Corpus c;
    c.labels["a"] = LabelSet{"a", 10, 1, 81};
    c.labels["b"] = LabelSet{"b", 0, 0, 0};
    c.labels["c"] = LabelSet{"c", 41, 1, 80};
    auto f = flag_cutoffs(c);
    CHECK(f["a"].srs_candidate);
    CHECK_FALSE(f["b"].spq_candidate);
    CHECK(f["c"] == CutoffFlags{false, true});
    auto custom = flag_cutoffs(c, Cutoffs{100, 5});
    CHECK_FALSE(custom["a"].srs_candidate);
    CHECK(custom["a"].spq_candidate);
  }

  TEST_CASE("flag_cutoffs is monotone in the score") {
    for (int srs = 0; srs < 195; ++srs) {
      Corpus lo, hi;
      lo.labels["p"] = LabelSet{"p", srs % 75, 0, srs};
      hi.labels["p"] = LabelSet{"p", std::min(74, srs % 75 + 1), 0, srs + 1};
      auto a = flag_cutoffs(lo)["p"], b = flag_cutoffs(hi)["p"];
      CHECK((!a.srs_candidate || b.srs_candidate));
      CHECK((!a.spq_candidate || b.spq_candidate));
    }
  }

  TEST_CASE("label_correlations") {
    Corpus c;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 12; ++i) {
      const std::string id = "p" + std::to_string(i);
      const int odd = static_cast<int>(rng() % 10);
      LabelSet l{id, odd + static_cast<int>(rng() % 60), odd, static_cast<int>(rng() % 196)};
      l.srs_cognition = static_cast<int>(rng() % 30);
      c.labels[id] = l;
      // Sessions must not affect the participant-level statistic.
      for (int k = 0; k < i % 3 + 1; ++k) {
        SessionRecord s;
        s.participant_id = id;
        s.session_id = id + "-" + std::to_string(k);
        c.sessions.push_back(s);
      }
    }
    auto self = label_correlations(c, {{LabelAxis::spq_total, LabelAxis::spq_total}});
    CHECK(self[0].rho == doctest::Approx(1.0));
    CHECK(self[0].n == 12);

    for (auto a : {LabelAxis::spq_total, LabelAxis::odd_speech, LabelAxis::srs_total, LabelAxis::srs_cognition}) {
      for (auto b : {LabelAxis::spq_total, LabelAxis::odd_speech, LabelAxis::srs_total}) {
        auto ab = label_correlations(c, {{a, b}})[0];
        auto ba = label_correlations(c, {{b, a}})[0];
        CHECK(ab.rho == doctest::Approx(ba.rho).epsilon(1e-15));
        CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-15));
      }
    }
    // Subscales absent for everyone: too few participants.
    CHECK_THROWS_AS(label_correlations(c, {{LabelAxis::spq_total, LabelAxis::srs_awareness}}), Error);
    CHECK(default_label_pairs().size() == 12);
  }
}
