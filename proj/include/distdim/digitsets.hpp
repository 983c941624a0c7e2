#pragma once

// Block schedules, base-q digit-restricted Cantor sets F and their products
// E = F^c, with exact covering-number oracles.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "distdim/point_cloud.hpp"
#include "distdim/rational.hpp"

namespace distdim {

struct Block {
  std::int64_t m = 0;  // first active level
  std::int64_t M = 0;  // last active level (inclusive)
  bool operator==(const Block&) const = default;
};

class BlockSchedule {
 public:
  /// required: every block obeys M_k - m_k >= 2^k. relaxed: only ordering
  /// and disjointness are enforced (hand-written schedules, unit tests).
  enum class GrowthRule { required, relaxed };

  BlockSchedule(std::vector<Block> blocks, Rational target_density, unsigned q,
                GrowthRule rule = GrowthRule::required);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Rational& target_density() const noexcept { return target_; }
  unsigned base() const noexcept { return q_; }
  GrowthRule growth_rule() const noexcept { return rule_; }

  bool is_active(std::int64_t level) const;
  /// #(A ∩ [1, n]).
  std::int64_t active_count(std::int64_t n) const;
  /// Active levels in [1, n], increasing.
  std::vector<std::int64_t> active_levels(std::int64_t n) const;
  /// The checkpoint levels M_k.
  std::vector<std::int64_t> checkpoints() const;

 private:
  std::vector<Block> blocks_;
  Rational target_;
  unsigned q_;
  GrowthRule rule_;
};

/// K blocks of length exactly 2^k with closed-form gaps. rho > 0 places
/// M_k = ceil(S_k / rho) with S_k = sum_{j<=k} (2^j + 1), which keeps the
/// checkpoint density in (rho - rho^2/S_k, rho]; rho = 0 uses the gap rule
/// m_k = M_{k-1} + k 2^{k+3}. Throws std::invalid_argument for rho outside
/// [0, 1], K < 1 or q < 2.
BlockSchedule schedule_for_density(const Rational& rho, int K, unsigned q);

/// #(A ∩ [1, N]) / N.
Rational density_profile(const BlockSchedule& schedule, std::int64_t N);

class DigitFractal {
 public:
  /// ambient is c: 1 for F itself, c for the product F^c.
  DigitFractal(BlockSchedule schedule, std::int64_t depth, std::size_t ambient);

  const BlockSchedule& schedule() const noexcept { return schedule_; }
  std::int64_t depth() const noexcept { return depth_; }
  std::size_t ambient() const noexcept { return ambient_; }
  unsigned base() const noexcept { return schedule_.base(); }
  /// q^depth, the common denominator of every generated coordinate.
  BigInt denominator() const { return ipow(base(), depth_); }
  /// q^(c * #(A ∩ [1, depth])).
  BigInt point_count() const;

 private:
  BlockSchedule schedule_;
  std::int64_t depth_;
  std::size_t ambient_;
};

/// q^(c #(A ∩ [1, m])), the number of occupied q-adic cells of side q^-m.
/// Throws std::out_of_range unless 1 <= m <= depth.
BigInt exact_covering_count(const DigitFractal& fractal, std::int64_t m);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Every truncated point, exact. Throws CapExceeded above the cap.
PointCloud enumerate_points(const DigitFractal& fractal, std::uint64_t cap = kDefaultEnumerationCap);

/// n points whose active digits are drawn from CounterRng(seed); point i,
/// coordinate j, level m uses stream i and a counter derived from (j, m), so
/// any prefix of the sample is itself reproducible.
PointCloud sample_points(const DigitFractal& fractal, std::size_t n, std::uint64_t seed);

/// Base-q digit of x at level m >= 1 (floor(x q^m) mod q) for x >= 0.
unsigned digit_at(const Rational& x, std::int64_t m, unsigned q);

/// Index of the first point violating the digit structure (nonzero digit at
/// an inactive level, negative coordinate, or finer than depth), if any.
std::optional<std::size_t> first_invalid_point(const DigitFractal& fractal, const PointCloud& cloud);

}  // namespace distdim
