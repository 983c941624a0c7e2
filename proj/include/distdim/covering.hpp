#pragma once

// Grid covering numbers and finite-scale dimension slopes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distdim/point_cloud.hpp"
#include "distdim/rational.hpp"

namespace distdim {

/// exact: combinatorial count from a digit structure; grid: counted on a
/// point cloud; bound: a rigorous analytic upper or lower bound.
enum class Provenance { exact, grid, bound };

std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& text);

struct ProfileEntry {
  Rational delta;
  BigInt count;
  Provenance provenance = Provenance::grid;
};

class CoveringProfile {
 public:
  CoveringProfile() = default;
  /// Requires delta strictly decreasing, counts >= 1 and nondecreasing.
  explicit CoveringProfile(std::vector<ProfileEntry> entries, std::string scale_sequence = "", RVec anchor = {});

  const std::vector<ProfileEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& scale_sequence() const noexcept { return scale_sequence_; }
  /// Lower corner of the counting grid (empty for exact profiles).
  const RVec& anchor() const noexcept { return anchor_; }

 private:
  std::vector<ProfileEntry> entries_;
  std::string scale_sequence_;
  RVec anchor_;
};

/// Inclusive scale window; unset ends are unbounded.
struct Window {
  std::optional<Rational> delta_max;
  std::optional<Rational> delta_min;
  bool contains(const Rational& delta) const;
};

enum class SlopeMode { regression, max_two_point };

std::string to_string(SlopeMode m);

struct DimensionEstimate {
  double slope = 0.0;
  /// Filled when every used entry is an exact power of the requested base,
  /// in which case the slope is a rational number.
  std::optional<Rational> exact_slope;
  Rational delta_max, delta_min;
  std::string scale_sequence;
  SlopeMode mode = SlopeMode::regression;
  double residual = 0.0;
  std::size_t used = 0;
  bool in_sanity_band(std::size_t dim) const { return slope >= -1e-12 && slope <= static_cast<double>(dim) + 0.1; }
};

/// Least-squares (or max consecutive) slope of log N against -log delta.
/// Throws std::invalid_argument when fewer than two entries fall in window.
DimensionEstimate dimension_slope(const CoveringProfile& profile, const Window& window = {},
                                  SlopeMode mode = SlopeMode::regression, unsigned exact_base = 0);

/// -log(delta) for a positive rational, robust for huge denominators.
double neg_log(const Rational& delta);

/// Occupied cells of the axis grid of mesh delta anchored at the cloud's
/// bounding-box lower corner. Exact clouds are counted with exact integer
/// cell indices. Throws std::invalid_argument on an empty cloud or delta <= 0.
std::uint64_t grid_covering_count(const PointCloud& cloud, const Rational& delta);
std::uint64_t grid_covering_count(const PointCloud& cloud, double delta);

/// Grid profile of the cloud at the given (strictly decreasing) scales.
CoveringProfile grid_profile(const PointCloud& cloud, const std::vector<Rational>& deltas,
                             std::string scale_sequence);

/// q^-m for each m, as rationals.
std::vector<Rational> q_adic_scales(unsigned q, const std::vector<std::int64_t>& levels);

}  // namespace distdim
