#pragma once

#include <cstdint>
#include <vector>

#include "ftd/corpus.hpp"
#include "ftd/mlcore/cv.hpp"

namespace ftd::synthetic {

/// Generator for pre-tagged Japanese-like corpora with a planted signal:
/// in `planted_task` sessions the rate of `planted_tag` tokens rises with
/// the participant's `planted_label`. Every other task draws that rate
/// independently of the labels.
struct SyntheticConfig {
  std::size_t participants = 30;
  std::uint64_t seed = ml::kDefaultSeed;
  std::vector<Task> tasks{std::begin(kAllTasks), std::end(kAllTasks)};
  std::vector<int> durations{30, 60, 180};
  Task planted_task = Task::negative;
  corpus::LabelAxis planted_label = corpus::LabelAxis::odd_speech;
  text::CanonicalTag planted_tag = text::CanonicalTag::interjection;
  /// 0 disables the signal.
  double strength = 1.0;
  /// Spread of the per-session deviation from the planted rate.
  double noise = 0.15;
  double wpm_mean = 120.0;
  bool timestamps = false;
};

corpus::Corpus generate(const SyntheticConfig& config);

/// Small deterministic RNG wrapper; its output is identical on every
/// standard library, unlike std::normal_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  ///< [0, 1)
  double normal();
  std::size_t below(std::size_t n);

 private:
  std::uint64_t state_;
};

}  // namespace ftd::synthetic
