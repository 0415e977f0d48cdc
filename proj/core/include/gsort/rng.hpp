#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gsort {

// All randomness in the library flows through std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The distribution helpers below are
// hand-rolled because std::uniform_*_distribution is implementation-defined,
// which would break bit-for-bit reproducibility across standard libraries.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Purpose tags for independent per-seed streams.
enum class Stream : std::uint64_t {
  kInstance = 0x696e7374,   // "inst"
  kPartition = 0x70617274,  // "part"
  kSparse = 0x73707273,     // "sprs"
  kMcmc = 0x6d636d63,       // "mcmc"
  kTrial = 0x7472616c,      // "tral"
};

/// Folds a sequence of words into a seed: h = splitmix64(h ^ word) for each word.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, Stream tag) noexcept {
  return derive_seed(base, {static_cast<std::uint64_t>(tag)});
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Rejection on the top of the range keeps the result exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gsort
