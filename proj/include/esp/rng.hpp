#pragma once

#include <cstdint>
#include <random>

namespace esp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; bijective on 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a sequence of integer tags.
/// Every sub-stream in the workbench (per run, per trial, per individual,
/// per evaluation) is addressed by such a path from the master seed, so the
/// order in which work is executed never changes the numbers drawn.
constexpr std::uint64_t derive_seed(std::uint64_t parent) noexcept { return parent; }

template <class Tag, class... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t parent, Tag tag, Tags... rest) noexcept {
  const std::uint64_t child = mix64(parent ^ mix64(static_cast<std::uint64_t>(tag) + 0x632be59bd9b4e019ULL));
  return derive_seed(child, rest...);
}

// Stream tags.
namespace seed_tag {
inline constexpr std::uint64_t kNetwork = 1;
inline constexpr std::uint64_t kWorld = 2;
inline constexpr std::uint64_t kExplore = 3;
inline constexpr std::uint64_t kTrial = 4;
inline constexpr std::uint64_t kEvaluation = 5;
inline constexpr std::uint64_t kSelection = 6;
inline constexpr std::uint64_t kRun = 7;
inline constexpr std::uint64_t kValidation = 8;
inline constexpr std::uint64_t kPerturb = 9;
inline constexpr std::uint64_t kMobiles = 10;
inline constexpr std::uint64_t kInit = 11;
}  // namespace seed_tag

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform integer on the closed range [lo, hi].
template <class Int>
inline Int uniform_int(Rng& rng, Int lo, Int hi) {
  return std::uniform_int_distribution<Int>(lo, hi)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

inline double gaussian(Rng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

}  // namespace esp
