#pragma once

// Deterministic number sources: a counter-based hash generator (every draw is
// a pure function of seed, stream and counter) and the Halton sequence.

#include <cstddef>
#include <cstdint>

namespace distdim {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
    return mix64(mix64(seed_ ^ mix64(stream)) + counter);
  }

  /// Uniform integer in [0, n); multiply-shift, bias below n / 2^64.
  std::uint64_t below(std::uint64_t n, std::uint64_t stream, std::uint64_t counter) const noexcept {
    auto wide = static_cast<unsigned __int128>(bits(stream, counter)) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Radical inverse of index in the given prime base (index 0 maps to 0).
double halton(std::uint64_t index, unsigned base) noexcept;

/// The n-th prime, 0-based (2, 3, 5, ...); n < 64.
unsigned nth_prime(std::size_t n);

}  // namespace distdim
