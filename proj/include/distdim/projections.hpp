#pragma once

// Coordinate projections, the max-projection inequality, the polyhedral
// projection identity, and fiber covers of pinned-distance families.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "distdim/covering.hpp"
#include "distdim/norms.hpp"
#include "distdim/point_cloud.hpp"

namespace distdim {

/// Keeps coordinates i_1 < ... < i_n (0-based). Exactness is preserved.
PointCloud coordinate_project(const PointCloud& cloud, const std::vector<std::size_t>& indices);

struct SubsetSlope {
  std::vector<std::size_t> indices;
  DimensionEstimate estimate;
};

struct JarvenpaaReport {
  std::size_t n = 0;
  DimensionEstimate set_estimate;
  std::vector<SubsetSlope> subsets;  // every n-subset, lexicographic order
  std::size_t best = 0;              // index into subsets
  double margin = 0.0;               // best slope - (n/d) set slope
  std::optional<Rational> exact_margin;
  double tol = 0.05;
  bool pass = false;
};

/// Grid profiles of E and of all (d choose n) coordinate projections on the
/// given scales (strictly decreasing). Passes when margin >= -tol.
JarvenpaaReport jarvenpaa_check(const PointCloud& cloud, std::size_t n, const std::vector<Rational>& scales,
                                const Window& window = {}, double tol = 0.05, unsigned exact_base = 0,
                                const std::string& scale_sequence = "");

struct IdentityReport {
  bool pass = false;
  bool cone_condition = true;
  std::optional<std::size_t> offending_point;
  std::optional<std::pair<std::size_t, std::size_t>> offending_pair;
  std::size_t pairs_checked = 0;
};

/// With V = span{v_w : w in facets}: checks every point lies in all cones
/// C(pins[l], v_{facets[l]}), then ||x - y|| = ||P_V (x - y)|| exactly on
/// all pairs (or max_pairs deterministic pairs when the cloud is large).
IdentityReport projection_identity_check(const PointCloud& cloud, const PolyhedralNorm& norm,
                                         const std::vector<std::size_t>& facets, const std::vector<RVec>& pins,
                                         std::uint64_t max_pairs = 200'000, std::uint64_t seed = 0);

/// p(x) = (||x - z_1||, ..., ||x - z_k||).
class ProjectionFamily {
 public:
  /// Pins must be pairwise distinct and of the norm's dimension.
  ProjectionFamily(NormSpec norm, std::vector<Vec> pins);

  const NormSpec& norm() const noexcept { return norm_; }
  const std::vector<Vec>& pins() const noexcept { return pins_; }
  std::size_t size() const noexcept { return pins_.size(); }
  std::size_t dim() const noexcept { return dimension(norm_); }
  Vec evaluate(std::span<const double> x) const;
  /// Indices of cloud points coinciding with a pin.
  std::vector<std::size_t> points_on_pins(const PointCloud& cloud) const;

 private:
  NormSpec norm_;
  std::vector<Vec> pins_;
};

/// p evaluated once over a cloud and sorted by the first coordinate, so each
/// fiber query scans only the slab |p_1 - xi_1| < delta.
class FiberIndex {
 public:
  FiberIndex(const ProjectionFamily& family, const PointCloud& cloud);

  const ProjectionFamily& family() const noexcept { return *family_; }
  const PointCloud& cloud() const noexcept { return *cloud_; }
  const Vec& values() const noexcept { return values_; }  // point-major, k per point
  /// {x : |p_i(x) - xi_i| < delta for all i}, ascending point index.
  std::vector<std::size_t> fiber(const Vec& xi, double delta) const;

 private:
  const ProjectionFamily* family_;
  const PointCloud* cloud_;
  Vec values_;
  std::vector<std::size_t> order_;  // sorted by p_1
  Vec sorted_first_;
};

struct FiberCoverReport {
  double delta = 0.0;
  double radius = 1.0;  // balls have radius radius * delta in the family norm
  Vec xi;
  std::size_t fiber_size = 0;
  std::vector<std::size_t> centers;  // cloud indices
  std::size_t m = 0;
  bool certified = false;
};

/// Greedy cover: the first uncovered fiber point (by cloud index) becomes a
/// center and every fiber point within radius * delta of it is removed.
FiberCoverReport fiber_cover(const FiberIndex& index, const Vec& xi, double delta, double radius = 1.0);
FiberCoverReport fiber_cover(const ProjectionFamily& family, const PointCloud& cloud, const Vec& xi, double delta,
                             double radius = 1.0);

/// Independent recheck: recomputes the fiber by brute force and confirms each
/// point is within radius * delta of a center.
bool recheck_cover(const ProjectionFamily& family, const PointCloud& cloud, const FiberCoverReport& report);

struct TransversalityScan {
  std::vector<double> deltas;
  std::vector<std::size_t> max_m;  // max over xi of m(delta)
  std::vector<std::size_t> worst_xi;  // index into xi samples
  double exponent = 0.0;              // regression slope of log max_m vs -log delta
  double residual = 0.0;
  bool all_certified = true;
};

/// Fits log max_xi m(delta) against -log delta. Needs >= 3 scales and a
/// nonempty fiber at every scale (else std::invalid_argument).
TransversalityScan weak_transversality_scan(const FiberIndex& index, const std::vector<double>& deltas,
                                            const std::vector<Vec>& xi_samples, double radius = 1.0,
                                            bool recheck = true);

/// Images p(x) of `count` deterministic cloud points plus the images of the
/// bounding-box corners.
std::vector<Vec> xi_samples(const ProjectionFamily& family, const PointCloud& cloud, std::size_t count,
                            std::uint64_t seed);

}  // namespace distdim
