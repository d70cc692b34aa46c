#pragma once

#include <cstdint>
#include <random>

namespace issf {

// splitmix64, used for seed derivation only. Stateless: returns the mixed
// value for a given input word.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from (base, index). Children for distinct indexes are
// decorrelated even when base seeds are small consecutive integers.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + 1));
}

// Counted wrapper over mt19937_64. Every stochastic decision in the library
// flows through one of these; draw_count() makes replay divergence visible in
// traces.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1), 53 usable bits.
  double next_unit() {
    ++draws_;
    return (engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_unit() < p; }

  // Uniform index in [0, n). n must be positive.
  std::size_t next_index(std::size_t n) {
    auto i = static_cast<std::size_t>(next_unit() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  std::uint64_t draw_count() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace issf
