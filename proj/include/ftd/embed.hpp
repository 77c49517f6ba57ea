#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ftd/common.hpp"

namespace ftd::embed {

using EmbeddingVector = std::vector<double>;

class EmbeddingError : public Error {
 public:
  enum class Kind { unavailable, missing_key, dimension_mismatch, invalid_output };
  EmbeddingError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Maps texts to fixed-dimension vectors. Implementations must tolerate
/// concurrent embed() calls.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::size_t dim() const = 0;
  /// Short description recorded in run manifests.
  virtual std::string identity() const = 0;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
};

/// Calls the provider and checks the output contract: one vector per text,
/// uniform dimension, finite components.
std::vector<EmbeddingVector> embed_texts(const Provider& provider,
                                         std::span<const std::string> texts);

/// Hermetic provider for tests and offline runs.
///
/// Component i of text s is built from
///   h = FNV-1a-64(bytes(s)) with offset basis 0xcbf29ce484222325 ^ splitmix64(seed)
///   x = splitmix64(h + i)
///   u = (x >> 11) * 2^-53 * 2 - 1
/// and the vector is divided by its Euclidean norm. Only integer arithmetic,
/// one division and one square root are involved, so results are
/// bit-identical on IEEE-754 platforms.
class TestEmbedder final : public Provider {
 public:
  TestEmbedder(std::uint64_t seed, std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::string identity() const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  EmbeddingVector embed_one(std::string_view text) const;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

std::shared_ptr<const Provider> test_embedder(std::uint64_t seed, std::size_t dim);

/// Vectors read from a file keyed by text_hash_hex(text):
///   {"dim": d}
///   {"hash": "<hex>", "text_preview": "...", "vector": [...]}
class PrecomputedProvider final : public Provider {
 public:
  static std::shared_ptr<const PrecomputedProvider> load(const std::filesystem::path& path);

  std::size_t dim() const override { return dim_; }
  std::string identity() const override { return "file:" + source_; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dim_ = 0;
  std::string source_;
  std::unordered_map<std::string, EmbeddingVector> vectors_;
};

/// Embeds `texts` with `provider` and writes them in the precomputed format.
/// Duplicate texts are written once.
void export_precomputed(const Provider& provider, std::span<const std::string> texts,
                        const std::filesystem::path& path);

struct ServiceConfig {
  /// Shell command started once per provider; it reads requests on stdin
  /// and answers on stdout, one JSON object per line.
  std::string command;
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::size_t batch_size = 256;
};

/// Newline-delimited JSON over a subprocess pipe:
///   request  {"texts": ["...", ...]}
///   response {"vectors": [[...], ...]}
/// A failed or timed-out exchange restarts the subprocess and retries.
class ServiceProvider final : public Provider {
 public:
  explicit ServiceProvider(ServiceConfig config);
  ~ServiceProvider() override;
  ServiceProvider(const ServiceProvider&) = delete;
  ServiceProvider& operator=(const ServiceProvider&) = delete;

  std::size_t dim() const override { return dim_; }
  std::string identity() const override { return "service:" + config_.command; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

 private:
  struct Process;
  std::vector<EmbeddingVector> exchange(std::span<const std::string> texts) const;

  ServiceConfig config_;
  std::size_t dim_ = 0;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<Process> process_;
};

/// Per-run memo keyed by text; repeated words are embedded once.
class CachingProvider final : public Provider {
 public:
  explicit CachingProvider(std::shared_ptr<const Provider> inner);
  std::size_t dim() const override { return inner_->dim(); }
  std::string identity() const override { return inner_->identity(); }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::size_t cached() const;

 private:
  std::shared_ptr<const Provider> inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace ftd::embed
