#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace clarify {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t s = mix_seed(base);
  for (auto p : parts) s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return s;
}

/// Seeded generator with platform-independent draws. The std distributions
/// are implementation-defined, so transcripts would differ across standard
/// libraries if we used them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Multiply-shift; bias is below 2^-32 for the sizes used here.
  std::size_t uniform_index(std::size_t n) {
    const auto hi = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::size_t>(hi >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace clarify
