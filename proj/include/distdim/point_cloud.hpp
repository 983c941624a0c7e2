#pragma once

// A finite point set in R^d. Exact clouds keep integer numerators over one
// shared denominator (int64 when everything fits, big integers otherwise);
// approximate clouds keep doubles.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "distdim/rational.hpp"

namespace distdim {

class PointCloud {
 public:
  enum class Storage { small_exact, big_exact, approximate };

  PointCloud() = default;

  static PointCloud exact(std::size_t dim, const std::vector<RVec>& points);
  /// Numerators are reduced to int64 storage automatically when they fit.
  static PointCloud from_numerators(std::size_t dim, BigInt denominator, std::vector<BigInt> flat);
  static PointCloud from_numerators(std::size_t dim, BigInt denominator, std::vector<std::int64_t> flat);
  static PointCloud approximate(std::size_t dim, const std::vector<Vec>& points);
  static PointCloud approximate_flat(std::size_t dim, Vec flat);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  Storage storage() const noexcept { return storage_; }
  bool is_exact() const noexcept { return storage_ != Storage::approximate; }

  /// Shared denominator of an exact cloud.
  const BigInt& denominator() const;
  std::int64_t numerator64(std::size_t i, std::size_t j) const { return small_[i * dim_ + j]; }
  BigInt numerator(std::size_t i, std::size_t j) const;
  Rational coord(std::size_t i, std::size_t j) const;
  double coord_double(std::size_t i, std::size_t j) const;

  RVec point(std::size_t i) const;
  Vec point_double(std::size_t i) const;

  /// Bounding box; exact clouds report numerators (over denominator()).
  BigInt lower_numerator(std::size_t j) const;
  BigInt upper_numerator(std::size_t j) const;
  Rational lower(std::size_t j) const;
  Rational upper(std::size_t j) const;
  double lower_double(std::size_t j) const;
  double upper_double(std::size_t j) const;

  const std::vector<std::int64_t>& small_data() const noexcept { return small_; }
  const std::vector<BigInt>& big_data() const noexcept { return big_; }
  const Vec& double_data() const noexcept { return approx_; }

  /// Same points translated by t (exactness preserved when t is rational and
  /// the cloud exact).
  PointCloud translated(const RVec& t) const;
  PointCloud translated(const Vec& t) const;
  /// Keeps the listed coordinates, in order.
  PointCloud select_coordinates(const std::vector<std::size_t>& indices) const;
  /// Subset by point index, in the given order.
  PointCloud subset(const std::vector<std::size_t>& indices) const;
  /// Lexicographically sorted, duplicates removed.
  PointCloud deduplicated() const;
  PointCloud to_approximate() const;

 private:
  void compute_box();

  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  Storage storage_ = Storage::approximate;
  BigInt denominator_ = 1;
  std::vector<std::int64_t> small_;
  std::vector<BigInt> big_;
  Vec approx_;
  std::vector<BigInt> lo_num_, hi_num_;
  Vec lo_d_, hi_d_;
};

}  // namespace distdim
