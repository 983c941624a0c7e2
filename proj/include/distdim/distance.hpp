#pragma once

// Distance sets, pinned distance sets, and the digit envelope that confines
// distances of digit-restricted sets under rational polyhedral norms.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distdim/covering.hpp"
#include "distdim/digitsets.hpp"
#include "distdim/norms.hpp"
#include "distdim/point_cloud.hpp"

namespace distdim {

struct DistanceSource {
  enum class Kind { full_pairs, pinned, sampled };
  Kind kind = Kind::full_pairs;
  Vec pin;                  // pinned only
  std::uint64_t pairs = 0;  // pairs evaluated
  std::uint64_t seed = 0;   // sampled only
  std::string describe() const;
};

/// Sorted, duplicate-free distance values as a one-dimensional cloud.
struct DistanceCloud {
  PointCloud values;
  DistanceSource source;
};

struct DistanceOptions {
  std::uint64_t pair_cap = 100'000'000;
  /// When set, evaluate this many deterministic index pairs instead of all.
  std::optional<std::uint64_t> sample_pairs;
  std::uint64_t seed = 0;
  /// Keep the zero distances of x = y (full pairs) or pin = x (pinned).
  bool include_zero = false;
};

/// Exact for exact clouds under polyhedral norms. Throws CapExceeded when
/// full pairs exceed the cap and no sampling was requested.
DistanceCloud distance_set(const PointCloud& cloud, const NormSpec& norm, const DistanceOptions& options = {});

DistanceCloud pinned_distance_set(const PointCloud& cloud, const NormSpec& norm, const RVec& pin,
                                  const DistanceOptions& options = {});
DistanceCloud pinned_distance_set(const PointCloud& cloud, const NormSpec& norm, const Vec& pin,
                                  const DistanceOptions& options = {});

/// Digit positions (level i carries weight q^-i) where distance digits may
/// be nonzero. shift t is the least exponent with the facet denominator
/// dividing q^t; lead covers carries running toward coarser levels.
struct DigitEnvelope {
  std::vector<Block> blocks;  // [max(0, m_k - lead), M_k + pad]
  std::int64_t pad = 0;
  std::int64_t lead = 0;
  int shift = 0;
  unsigned q = 2;

  bool contains(std::int64_t level) const;
  /// #(envelope ∩ [1, n]).
  std::int64_t active_count(std::int64_t n) const;
};

/// pad = max(2 + ceil(log_q d) + 1, shift). Throws std::invalid_argument
/// when the facet denominator divides no q^t with t <= 4, or d mismatches.
DigitEnvelope digit_envelope(const BlockSchedule& schedule, unsigned q, std::size_t d, const PolyhedralNorm& norm);

struct EnvelopeCheck {
  bool pass = true;
  std::optional<Rational> counterexample;
  std::size_t index = 0;  // position of the counterexample in the input
  std::size_t checked = 0;
};

/// Does r = sum_i s_i q^-i hold with |s_i| <= q-1 and s_i = 0 off the
/// envelope and beyond depth + shift? Values with a reduced denominator that
/// is not a power of q throw std::invalid_argument naming the value.
bool representable(const Rational& value, const DigitEnvelope& envelope, std::int64_t depth);
EnvelopeCheck verify_envelope(const DistanceCloud& distances, const DigitEnvelope& envelope, unsigned q,
                              std::int64_t depth);

struct EnvelopeCertificate {
  bool certified = false;
  std::size_t states = 0;  // largest carry-state family seen
  // witness of failure: points of E and the non-representable value
  std::size_t facet = 0;
  RVec x, y;
  Rational value;
};

/// Exhaustive certificate over every pair of the depth-D set E = F^d: runs
/// the carry automaton of every facet over all digit differences.
EnvelopeCertificate certify_envelope(const BlockSchedule& schedule, const PolyhedralNorm& norm,
                                     const DigitEnvelope& envelope, std::int64_t depth);

/// Rigorous bounds on the q^-N grid count of the distance set of E = F^d
/// at each requested level N (ascending). The upper bound counts the
/// possible partial sums per facet; the lower bound uses the scaled copy
/// ||e_l|| F inside the distance set.
CoveringProfile distance_upper_profile(const BlockSchedule& schedule, const PolyhedralNorm& norm,
                                       std::int64_t depth, const std::vector<std::int64_t>& levels);
CoveringProfile distance_lower_profile(const BlockSchedule& schedule, const PolyhedralNorm& norm,
                                       std::int64_t depth, const std::vector<std::int64_t>& levels);

/// Least t <= 4 with denominator | q^t.
std::optional<int> denominator_shift(const BigInt& denominator, unsigned q);

}  // namespace distdim
