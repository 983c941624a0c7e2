#pragma once

// Hand-rolled generators for property tests: every draw is a pure function
// of (seed, case index), so a failing case can be replayed by its index.

#include <cstdint>
#include <vector>

#include "distdim/rational.hpp"
#include "distdim/sequence.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(7, counter_++); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1), 11, counter_++));
  }
  distdim::Vec vec(std::size_t d, double lo, double hi) {
    distdim::Vec v(d);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  /// Entries p / den with |p| <= bound.
  distdim::RVec rvec(std::size_t d, std::int64_t bound, std::int64_t den) {
    distdim::RVec v;
    for (std::size_t i = 0; i < d; ++i) v.emplace_back(distdim::BigInt(integer(-bound, bound)), distdim::BigInt(den));
    return v;
  }
  /// Point with prescribed norm range, by rescaling a nonzero draw.
  template <class Norm>
  distdim::Vec on_annulus(const Norm& norm, std::size_t d, double lo, double hi) {
    while (true) {
      distdim::Vec v = vec(d, -1.0, 1.0);
      double n = norm.eval(v);
      if (n < 1e-3) continue;
      double r = uniform(lo, hi);
      for (auto& x : v) x *= r / n;
      return v;
    }
  }

 private:
  distdim::CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace testing
