#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftd {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by numerical routines on degenerate or ill-posed input.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Input shape does not match what a fitted model expects.
class SchemaError : public Error {
 public:
  using Error::Error;
};

enum class Task { dream, favorite, negative, mistake };

inline constexpr Task kAllTasks[] = {Task::dream, Task::favorite, Task::negative,
                                     Task::mistake};

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view name);

enum class Gender { male, female, unspecified };

std::string_view to_string(Gender gender);
std::optional<Gender> parse_gender(std::string_view name);

/// 64-bit FNV-1a over raw bytes. Stable across platforms; used for text keys
/// in embedding files and for the test embedder.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Lower-case, zero-padded 16 digit hex of fnv1a64(text).
std::string text_hash_hex(std::string_view text);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(char32_t cp);

std::string_view trim(std::string_view s);
std::string_view strip_bom(std::string_view s);

/// Fixed-point formatting used by all report writers.
std::string format_fixed(double value, int decimals);

}  // namespace ftd
