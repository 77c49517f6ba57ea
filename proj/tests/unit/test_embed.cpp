#include <chrono>
#include <cmath>
#include <thread>

#include "doctest.h"
#include "ftd/embed.hpp"
#include "test_util.hpp"

using namespace ftd;
using namespace ftd::embed;

namespace {

double norm(const EmbeddingVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
  return d / (norm(a) * norm(b));
}

// Reference construction written out independently of the embedder.
EmbeddingVector reference_vector(std::uint64_t seed, std::size_t dim, const std::string& text) {
  const std::uint64_t h = fnv1a64(text, 0xcbf29ce484222325ULL ^ splitmix64(seed));
  EmbeddingVector v(dim);
  double ss = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint64_t x = splitmix64(h + i);
    v[i] = static_cast<double>(x >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    ss += v[i] * v[i];
  }
  for (double& x : v) x /= std::sqrt(ss);
  return v;
}

std::string service_cmd(const std::string& args = "") { return std::string(FAKE_SERVICE_PATH) + " " + args; }

class FlakyProvider final : public Provider {
 public:
  std::size_t dim() const override { return 3; }
  std::string identity() const override { return "flaky"; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override {
    std::vector<EmbeddingVector> out;
    for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({1.0, i == 1 ? NAN : 0.0, 0.0});
    if (!texts.empty() && texts[0] == "short") out.pop_back();
    if (!texts.empty() && texts[0] == "wide") out[0].push_back(1.0);
    return out;
  }
};

}  // namespace

TEST_SUITE("embed") {
  TEST_CASE("test embedder: identical texts give identical vectors") {
    auto p = test_embedder(1, 16);
    std::vector<std::string> texts = {"abc", "abc"};
    auto v = embed_texts(*p, texts);
    REQUIRE(v.size() == 2);
    CHECK(v[0] == v[1]);
  }

  TEST_CASE("test embedder: unit norm and bit-exact reference construction") {
    TestEmbedder e(42, 32);
    for (const std::string text : {"", "a", "犬が走る。", "the quick brown fox"}) {
      auto v = e.embed_one(text);
      CHECK(std::abs(norm(v) - 1.0) < 1e-9);
      CHECK(v == reference_vector(42, 32, text));
    }
  }

  TEST_CASE("test embedder: seeds and texts separate vectors") {
    TestEmbedder a(1, 8), b(2, 8);
    CHECK(a.embed_one("hello") != b.embed_one("hello"));
    CHECK(a.embed_one("hello") != a.embed_one("hello!"));
    const double c = cosine(a.embed_one("x"), a.embed_one("y"));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(a.identity() == "test:seed=1,dim=8");
    CHECK_THROWS_AS(TestEmbedder(1, 1), Error);
  }

  TEST_CASE("embed_texts contract checks") {
    FlakyProvider p;
    CHECK_THROWS_AS(embed_texts(p, std::vector<std::string>{}), Error);
    std::vector<std::string> one = {"ok"};
    CHECK(embed_texts(p, one).size() == 1);
    std::vector<std::string> nan = {"ok", "bad"};
    try {
      embed_texts(p, nan);
      FAIL("expected invalid output");
    } catch (const EmbeddingError& e) {
      CHECK(e.kind() == EmbeddingError::Kind::invalid_output);
    }
    std::vector<std::string> shortv = {"short", "x"};
    CHECK_THROWS_AS(embed_texts(p, shortv), EmbeddingError);
    std::vector<std::string> wide = {"wide"};
    try {
      embed_texts(p, wide);
      FAIL("expected dimension mismatch");
    } catch (const EmbeddingError& e) {
      CHECK(e.kind() == EmbeddingError::Kind::dimension_mismatch);
    }
  }

  TEST_CASE("precomputed file round trip and missing key") {
    auto dir = testutil::temp_dir("embed");
    TestEmbedder e(7, 12);
    std::vector<std::string> texts = {"犬", "猫", "犬", "長い文章です。とても長い文章です。とても長い。"};
    export_precomputed(e, texts, dir / "vectors.jsonl");
    auto file = PrecomputedProvider::load(dir / "vectors.jsonl");
    CHECK(file->dim() == 12);
    CHECK(file->size() == 3);
    auto a = file->embed(texts);
    auto b = e.embed(texts);
    CHECK(a == b);

    std::vector<std::string> absent = {"鳥"};
    try {
      file->embed(absent);
      FAIL("expected missing key");
    } catch (const EmbeddingError& err) {
      CHECK(err.kind() == EmbeddingError::Kind::missing_key);
      CHECK(std::string(err.what()).find(text_hash_hex("鳥")) != std::string::npos);
    }
  }

  TEST_CASE("precomputed file validation") {
    auto dir = testutil::temp_dir("embedbad");
    testutil::write_file(dir / "a.jsonl", "{\"dim\": 2}\n{\"hash\":\"00\",\"vector\":[1,2,3]}\n");
    CHECK_THROWS_AS(PrecomputedProvider::load(dir / "a.jsonl"), EmbeddingError);
    testutil::write_file(dir / "b.jsonl", "{\"hash\":\"00\",\"vector\":[1,2]}\n");
    CHECK_THROWS_AS(PrecomputedProvider::load(dir / "b.jsonl"), Error);
    CHECK_THROWS_AS(PrecomputedProvider::load(dir / "missing.jsonl"), Error);
  }

  TEST_CASE("service provider speaks the line protocol") {
    ServiceConfig c;
    c.command = service_cmd("--dim 6 --seed 3");
    c.batch_size = 2;
    ServiceProvider p(c);
    CHECK(p.dim() == 6);
    std::vector<std::string> texts = {"a", "b", "c", "a", "e"};
    auto v = p.embed(texts);
    TestEmbedder ref(3, 6);
    REQUIRE(v.size() == 5);
    for (std::size_t i = 0; i < texts.size(); ++i) CHECK(v[i] == ref.embed_one(texts[i]));
  }

  TEST_CASE("service provider restarts a crashed service") {
    ServiceConfig c;
    c.command = service_cmd("--crash-after 1");
    ServiceProvider p(c);
    std::vector<std::string> texts = {"x"};
    CHECK(p.embed(texts).size() == 1);
    CHECK(p.embed(texts).size() == 1);
  }

  TEST_CASE("service provider times out and retries") {
    ServiceConfig c;
    c.command = service_cmd("--hang-after 1");
    c.timeout = std::chrono::milliseconds(300);
    ServiceProvider p(c);
    std::vector<std::string> texts = {"x"};
    const auto start = std::chrono::steady_clock::now();
    CHECK(p.embed(texts).size() == 1);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
  }

  TEST_CASE("service provider failures") {
    ServiceConfig garbage;
    garbage.command = service_cmd("--garbage");
    garbage.retries = 1;
    garbage.timeout = std::chrono::milliseconds(2000);
    try {
      ServiceProvider p(garbage);
      FAIL("expected unavailable");
    } catch (const EmbeddingError& e) {
      CHECK(e.kind() == EmbeddingError::Kind::unavailable);
    }

    ServiceConfig missing;
    missing.command = "/nonexistent/embedder";
    missing.retries = 0;
    CHECK_THROWS_AS(ServiceProvider{missing}, EmbeddingError);

    ServiceConfig empty;
    CHECK_THROWS_AS(ServiceProvider{empty}, EmbeddingError);

    ServiceConfig grow;
    grow.command = service_cmd("--grow-after 1");
    ServiceProvider p(grow);
    std::vector<std::string> texts = {"x"};
    try {
      p.embed(texts);
      FAIL("expected dimension mismatch");
    } catch (const EmbeddingError& e) {
      CHECK(e.kind() == EmbeddingError::Kind::dimension_mismatch);
    }
  }

  TEST_CASE("caching provider is transparent and safe under concurrency") {
    auto inner = test_embedder(5, 8);
    CachingProvider cache(inner);
    CHECK(cache.identity() == inner->identity());
    std::vector<std::thread> threads;
    std::vector<std::vector<EmbeddingVector>> results(4);
    std::vector<std::string> texts = {"a", "b", "c", "a"};
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] { results[t] = cache.embed(texts); });
    }
    for (auto& th : threads) th.join();
    for (const auto& r : results) CHECK(r == inner->embed(texts));
    CHECK(cache.cached() == 3);
  }
}
