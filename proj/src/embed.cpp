#include "ftd/embed.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

namespace ftd::embed {

using nlohmann::json;

std::vector<EmbeddingVector> embed_texts(const Provider& provider,
                                         std::span<const std::string> texts) {
  if (texts.empty()) throw Error("embed_texts: empty text list");
  auto vectors = provider.embed(texts);
  if (vectors.size() != texts.size()) {
    throw EmbeddingError(EmbeddingError::Kind::invalid_output,
                         "provider returned " + std::to_string(vectors.size()) + " vectors for " +
                             std::to_string(texts.size()) + " texts");
  }
  const std::size_t d = provider.dim();
  for (const auto& v : vectors) {
    if (v.size() != d) {
      throw EmbeddingError(EmbeddingError::Kind::dimension_mismatch,
                           "expected dimension " + std::to_string(d) + ", got " +
                               std::to_string(v.size()));
    }
    for (double x : v) {
      if (!std::isfinite(x))
        throw EmbeddingError(EmbeddingError::Kind::invalid_output, "non-finite vector component");
    }
  }
  return vectors;
}

TestEmbedder::TestEmbedder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
  if (dim < 2) throw Error("test embedder needs dim >= 2");
}

std::string TestEmbedder::identity() const {
  return "test:seed=" + std::to_string(seed_) + ",dim=" + std::to_string(dim_);
}

EmbeddingVector TestEmbedder::embed_one(std::string_view text) const {
  const std::uint64_t h = fnv1a64(text, 0xcbf29ce484222325ULL ^ splitmix64(seed_));
  EmbeddingVector v(dim_);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const std::uint64_t x = splitmix64(h + i);
    const double u = static_cast<double>(x >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    v[i] = u;
    norm2 += u * u;
  }
  if (norm2 == 0.0) {
    v[0] = 1.0;
    return v;
  }
  const double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

std::vector<EmbeddingVector> TestEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

std::shared_ptr<const Provider> test_embedder(std::uint64_t seed, std::size_t dim) {
  return std::make_shared<TestEmbedder>(seed, dim);
}

std::shared_ptr<const PrecomputedProvider> PrecomputedProvider::load(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EmbeddingError(EmbeddingError::Kind::unavailable, "cannot open " + path.string());
  auto provider = std::shared_ptr<PrecomputedProvider>(new PrecomputedProvider());
  provider->source_ = path.string();
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(lineno == 1 ? strip_bom(line) : std::string_view(line));
    if (view.empty()) continue;
    json obj;
    try {
      obj = json::parse(view);
    } catch (const json::parse_error& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      if (!obj.contains("dim") || !obj["dim"].is_number_unsigned() || obj["dim"].get<std::size_t>() == 0)
        throw Error(path.string() + ": first line must be {\"dim\": d}");
      provider->dim_ = obj["dim"].get<std::size_t>();
      have_header = true;
      continue;
    }
    if (!obj.contains("hash") || !obj.contains("vector") || !obj["vector"].is_array())
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected hash and vector");
    auto vec = obj["vector"].get<EmbeddingVector>();
    if (vec.size() != provider->dim_) {
      throw EmbeddingError(EmbeddingError::Kind::dimension_mismatch,
                           path.string() + ":" + std::to_string(lineno) + ": vector has " +
                               std::to_string(vec.size()) + " components, header says " +
                               std::to_string(provider->dim_));
    }
    provider->vectors_.insert_or_assign(obj["hash"].get<std::string>(), std::move(vec));
  }
  if (!have_header) throw Error(path.string() + ": empty embedding file");
  return provider;
}

std::vector<EmbeddingVector> PrecomputedProvider::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const std::string key = text_hash_hex(t);
    auto it = vectors_.find(key);
    if (it == vectors_.end()) {
      throw EmbeddingError(EmbeddingError::Kind::missing_key,
                           "no vector for text hash " + key + " in " + source_);
    }
    out.push_back(it->second);
  }
  return out;
}

void export_precomputed(const Provider& provider, std::span<const std::string> texts,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << json{{"dim", provider.dim()}}.dump() << '\n';
  std::set<std::string> seen;
  std::vector<std::string> unique;
  for (const auto& t : texts) {
    if (seen.insert(t).second) unique.push_back(t);
  }
  if (unique.empty()) return;
  const auto vectors = embed_texts(provider, unique);
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const auto cps = utf8_decode(unique[i]);
    std::string preview;
    for (std::size_t k = 0; k < cps.size() && k < 24; ++k) preview += utf8_encode(cps[k]);
    out << json{{"hash", text_hash_hex(unique[i])}, {"text_preview", preview}, {"vector", vectors[i]}}
               .dump()
        << '\n';
  }
}

CachingProvider::CachingProvider(std::shared_ptr<const Provider> inner) : inner_(std::move(inner)) {
  if (!inner_) throw Error("caching provider needs an inner provider");
}

std::vector<EmbeddingVector> CachingProvider::embed(std::span<const std::string> texts) const {
  std::vector<std::string> misses;
  {
    std::lock_guard lock(mutex_);
    std::set<std::string> pending;
    for (const auto& t : texts) {
      if (!cache_.count(t) && pending.insert(t).second) misses.push_back(t);
    }
  }
  if (!misses.empty()) {
    auto fresh = embed_texts(*inner_, misses);
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < misses.size(); ++i) cache_.emplace(misses[i], std::move(fresh[i]));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  std::lock_guard lock(mutex_);
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

std::size_t CachingProvider::cached() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace ftd::embed
