#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace arf {

// SplitMix64 finalizer. Used to turn (seed, tag, index) tuples into
// independent stream seeds so parallel work is reproducible regardless of
// scheduling.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                                      std::uint64_t index = 0) {
  return mix64(mix64(seed ^ mix64(tag)) ^ mix64(index));
}

// Stream tags. Every consumer of randomness derives its own stream from the
// master seed with one of these, so adding a consumer never perturbs others.
namespace stream {
inline constexpr std::uint64_t kMarginal = 1;   // initial marginal generation
inline constexpr std::uint64_t kResample = 2;   // per-iteration leaf resampling
inline constexpr std::uint64_t kForest = 3;     // per-iteration forest fit
inline constexpr std::uint64_t kTree = 4;       // per-tree growth within a forest
inline constexpr std::uint64_t kRow = 5;        // per-row substream of a sampler
inline constexpr std::uint64_t kNoise = 6;      // dataset generators
}  // namespace stream

// Deterministic engine with portable helper draws. std::mt19937_64 output is
// fully specified by the standard; the distributions below are hand-rolled so
// sequences are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); rejects the zero draw.
  double next_unit_open() {
    double u;
    do {
      u = next_unit();
    } while (u == 0.0);
    return u;
  }

  // Unbiased uniform integer on [0, n). n must be >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(n - 1);
    std::uint64_t r;
    do {
      r = engine_() & mask;
    } while (r >= n);
    return r;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace arf
