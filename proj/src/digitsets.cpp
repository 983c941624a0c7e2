#include "distdim/digitsets.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "distdim/errors.hpp"
#include "distdim/sequence.hpp"

namespace distdim {

namespace {

// Largest c with q^c representable in 63 bits, and q^c itself.
std::pair<int, std::uint64_t> chunk_for(unsigned q) {
  int c = 0;
  std::uint64_t p = 1;
  while (p <= (std::numeric_limits<std::uint64_t>::max() >> 1) / q) {
    p *= q;
    ++c;
  }
  return {c, p};
}

// Interprets digits[0..D-1] (level 1 first) as the integer sum digit_m q^(D-m).
BigInt from_digits(const std::vector<unsigned>& digits, unsigned q) {
  static thread_local unsigned cached_q = 0;
  static thread_local std::pair<int, std::uint64_t> chunk;
  if (cached_q != q) {
    chunk = chunk_for(q);
    cached_q = q;
  }
  BigInt n = 0;
  std::size_t i = 0;
  while (i < digits.size()) {
    std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(chunk.first), digits.size() - i);
    std::uint64_t v = 0, scale = 1;
    for (std::size_t k = 0; k < len; ++k) {
      v = v * q + digits[i + k];
      scale *= q;
    }
    n = n * scale + v;
    i += len;
  }
  return n;
}

// Digits of n (0 <= n < q^D) at levels 1..D, level 1 first.
std::vector<unsigned> to_digits(BigInt n, std::int64_t depth, unsigned q) {
  auto [c, power] = chunk_for(q);
  std::vector<unsigned> digits(static_cast<std::size_t>(depth), 0);
  std::int64_t pos = depth;  // next level to fill, from the least significant end
  while (pos > 0) {
    std::uint64_t r;
    if (n.is_zero()) break;
    r = static_cast<std::uint64_t>(n % power);
    n /= power;
    for (int k = 0; k < c && pos > 0; ++k) {
      digits[static_cast<std::size_t>(pos - 1)] = static_cast<unsigned>(r % q);
      r /= q;
      --pos;
    }
  }
  return digits;
}

}  // namespace

BlockSchedule::BlockSchedule(std::vector<Block> blocks, Rational target_density, unsigned q, GrowthRule rule)
    : blocks_(std::move(blocks)), target_(std::move(target_density)), q_(q), rule_(rule) {
  if (q_ < 2) throw std::invalid_argument("base q must be at least 2");
  if (target_ < 0 || target_ > 1) throw std::invalid_argument("target density must lie in [0, 1]");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    if (b.m < 1) throw std::invalid_argument("block levels start at 1");
    if (b.M < b.m) throw std::invalid_argument("block " + std::to_string(k + 1) + " has M_k < m_k");
    if (k > 0 && b.m <= blocks_[k - 1].M)
      throw std::invalid_argument("blocks must be disjoint and increasing (m_{k+1} > M_k)");
    if (rule_ == GrowthRule::required && k < 62 && b.M - b.m < (std::int64_t{1} << (k + 1)))
      throw std::invalid_argument("block " + std::to_string(k + 1) + " violates the growth rule M_k - m_k >= 2^k");
  }
}

bool BlockSchedule::is_active(std::int64_t level) const {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), level,
                             [](const Block& b, std::int64_t v) { return b.M < v; });
  return it != blocks_.end() && it->m <= level;
}

std::int64_t BlockSchedule::active_count(std::int64_t n) const {
  std::int64_t count = 0;
  for (const auto& b : blocks_) {
    if (b.m > n) break;
    count += std::min(b.M, n) - b.m + 1;
  }
  return count;
}

std::vector<std::int64_t> BlockSchedule::active_levels(std::int64_t n) const {
  std::vector<std::int64_t> out;
  for (const auto& b : blocks_)
    for (std::int64_t m = b.m; m <= std::min(b.M, n); ++m) out.push_back(m);
  return out;
}

std::vector<std::int64_t> BlockSchedule::checkpoints() const {
  std::vector<std::int64_t> out;
  for (const auto& b : blocks_) out.push_back(b.M);
  return out;
}

BlockSchedule schedule_for_density(const Rational& rho, int K, unsigned q) {
  if (rho < 0 || rho > 1) throw std::invalid_argument("density rho must lie in [0, 1]");
  if (K < 1) throw std::invalid_argument("block count K must be at least 1");
  if (K > 40) throw std::invalid_argument("block count K too large (levels would exceed 2^40)");
  if (q < 2) throw std::invalid_argument("base q must be at least 2");
  std::vector<Block> blocks;
  std::int64_t active = 0, previous_end = 0;
  for (int k = 1; k <= K; ++k) {
    const std::int64_t len = std::int64_t{1} << k;
    Block b;
    if (rho == 0) {
      b.m = previous_end + k * (std::int64_t{1} << (k + 3));
      b.M = b.m + len;
    } else {
      active += len + 1;
      Rational end = Rational(active) / rho;
      BigInt ceil_end = numerator(end) / denominator(end);
      if (ceil_end * denominator(end) < numerator(end)) ceil_end += 1;
      b.M = ceil_end.convert_to<std::int64_t>();
      b.m = b.M - len;
    }
    previous_end = b.M;
    blocks.push_back(b);
  }
  BlockSchedule schedule(std::move(blocks), rho, q);
  for (int k = 1; k <= K; ++k) {
    Rational err = abs(density_profile(schedule, schedule.blocks()[k - 1].M) - rho);
    if (err > Rational(2, k))
      throw std::logic_error("generated schedule misses its checkpoint density at k=" + std::to_string(k));
  }
  return schedule;
}

Rational density_profile(const BlockSchedule& schedule, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("density profile needs N >= 1");
  return Rational(schedule.active_count(N), N);
}

DigitFractal::DigitFractal(BlockSchedule schedule, std::int64_t depth, std::size_t ambient)
    : schedule_(std::move(schedule)), depth_(depth), ambient_(ambient) {
  if (depth_ < 1) throw std::invalid_argument("truncation depth must be at least 1");
  if (ambient_ < 1) throw std::invalid_argument("ambient dimension must be at least 1");
}

BigInt DigitFractal::point_count() const {
  return ipow(base(), static_cast<std::int64_t>(ambient_) * schedule_.active_count(depth_));
}

BigInt exact_covering_count(const DigitFractal& fractal, std::int64_t m) {
  if (m < 1 || m > fractal.depth())
    throw std::out_of_range("level " + std::to_string(m) + " outside [1, " + std::to_string(fractal.depth()) + "]");
  return ipow(fractal.base(), static_cast<std::int64_t>(fractal.ambient()) * fractal.schedule().active_count(m));
}

PointCloud enumerate_points(const DigitFractal& fractal, std::uint64_t cap) {
  const BigInt total = fractal.point_count();
  if (total > cap)
    throw CapExceeded("enumeration would produce " + total.str() + " points (cap " + std::to_string(cap) +
                      "); lower the depth or sample instead");
  const unsigned q = fractal.base();
  const std::int64_t D = fractal.depth();
  const auto levels = fractal.schedule().active_levels(D);

  // the one-dimensional set F, as numerators over q^D, in digit-lexicographic order
  std::vector<BigInt> line{BigInt(0)};
  for (auto m : levels) {
    BigInt weight = ipow(q, D - m);
    std::vector<BigInt> next;
    next.reserve(line.size() * q);
    for (const auto& v : line)
      for (unsigned digit = 0; digit < q; ++digit) next.push_back(v + weight * digit);
    line = std::move(next);
  }
  const std::size_t c = fractal.ambient();
  const std::size_t n = static_cast<std::size_t>(total);
  const std::size_t per = line.size();
  const BigInt den = fractal.denominator();
  bool small = fits_int64(den);
  if (small) {
    std::vector<std::int64_t> line64(per);
    for (std::size_t i = 0; i < per; ++i) line64[i] = line[i].convert_to<std::int64_t>();
    std::vector<std::int64_t> flat(n * c);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = i;
      for (std::size_t j = c; j-- > 0;) {
        flat[i * c + j] = line64[r % per];
        r /= per;
      }
    }
    return PointCloud::from_numerators(c, den, std::move(flat));
  }
  std::vector<BigInt> flat(n * c);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    for (std::size_t j = c; j-- > 0;) {
      flat[i * c + j] = line[r % per];
      r /= per;
    }
  }
  return PointCloud::from_numerators(c, den, std::move(flat));
}

PointCloud sample_points(const DigitFractal& fractal, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  const unsigned q = fractal.base();
  const std::int64_t D = fractal.depth();
  const std::size_t c = fractal.ambient();
  const auto levels = fractal.schedule().active_levels(D);
  const CounterRng rng(seed);
  std::vector<BigInt> flat(n * c);
  std::vector<unsigned> digits(static_cast<std::size_t>(D));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      std::fill(digits.begin(), digits.end(), 0u);
      for (auto m : levels) {
        std::uint64_t counter = (static_cast<std::uint64_t>(j) << 40) | static_cast<std::uint64_t>(m);
        digits[static_cast<std::size_t>(m - 1)] = static_cast<unsigned>(rng.below(q, i, counter));
      }
      flat[i * c + j] = from_digits(digits, q);
    }
  return PointCloud::from_numerators(c, fractal.denominator(), std::move(flat));
}

unsigned digit_at(const Rational& x, std::int64_t m, unsigned q) {
  if (x < 0) throw std::domain_error("digit extraction needs a nonnegative value");
  if (m < 1) throw std::out_of_range("digit level must be at least 1");
  Rational scaled = x * Rational(ipow(q, m));
  BigInt whole = numerator(scaled) / denominator(scaled);
  return static_cast<unsigned>(whole % q);
}

std::optional<std::size_t> first_invalid_point(const DigitFractal& fractal, const PointCloud& cloud) {
  if (!cloud.is_exact()) throw std::invalid_argument("digit validation needs an exact cloud");
  if (cloud.dim() != fractal.ambient()) throw std::invalid_argument("cloud dimension differs from the fractal's");
  const unsigned q = fractal.base();
  const std::int64_t D = fractal.depth();
  const BigInt full = fractal.denominator();
  std::vector<char> active(static_cast<std::size_t>(D) + 1, 0);
  for (auto m : fractal.schedule().active_levels(D)) active[static_cast<std::size_t>(m)] = 1;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = 0; j < cloud.dim(); ++j) {
      Rational x = cloud.coord(i, j);
      if (x < 0 || full % denominator(x) != 0) return i;
      BigInt n = numerator(x) * (full / denominator(x));
      if (n >= full) return i;
      auto digits = to_digits(n, D, q);
      for (std::int64_t m = 1; m <= D; ++m)
        if (digits[static_cast<std::size_t>(m - 1)] != 0 && !active[static_cast<std::size_t>(m)]) return i;
    }
  return std::nullopt;
}

}  // namespace distdim
