#include "distdim/sequence.hpp"

#include <array>
#include <stdexcept>

namespace distdim {

double halton(std::uint64_t index, unsigned base) noexcept {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= base;
    result += f * static_cast<double>(index % base);
    index /= base;
  }
  return result;
}

unsigned nth_prime(std::size_t n) {
  static const std::array<unsigned, 64> primes = [] {
    std::array<unsigned, 64> p{};
    std::size_t count = 0;
    for (unsigned c = 2; count < p.size(); ++c) {
      bool prime = true;
      for (std::size_t i = 0; i < count && p[i] * p[i] <= c; ++i)
        if (c % p[i] == 0) {
          prime = false;
          break;
        }
      if (prime) p[count++] = c;
    }
    return p;
  }();
  if (n >= primes.size()) throw std::out_of_range("nth_prime index too large");
  return primes[n];
}

}  // namespace distdim
