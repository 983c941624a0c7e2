#include "distdim/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace distdim {

namespace {

bool all_fit(const std::vector<BigInt>& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return fits_int64(x); });
}

}  // namespace

PointCloud PointCloud::exact(std::size_t dim, const std::vector<RVec>& points) {
  BigInt den = 1;
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("point has wrong dimension");
    for (const auto& v : p) den = lcm(den, boost::multiprecision::denominator(v));
  }
  std::vector<BigInt> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points)
    for (const auto& v : p)
      flat.push_back(boost::multiprecision::numerator(v) * (den / boost::multiprecision::denominator(v)));
  return from_numerators(dim, std::move(den), std::move(flat));
}

PointCloud PointCloud::from_numerators(std::size_t dim, BigInt denominator, std::vector<BigInt> flat) {
  if (dim == 0) throw std::invalid_argument("point cloud dimension must be positive");
  if (denominator <= 0) throw std::invalid_argument("cloud denominator must be positive");
  if (flat.size() % dim != 0) throw std::invalid_argument("flat coordinate list is not a multiple of dim");
  PointCloud c;
  c.dim_ = dim;
  c.size_ = flat.size() / dim;
  c.denominator_ = std::move(denominator);
  if (all_fit(flat)) {
    c.storage_ = Storage::small_exact;
    c.small_.reserve(flat.size());
    for (const auto& v : flat) c.small_.push_back(v.convert_to<std::int64_t>());
  } else {
    c.storage_ = Storage::big_exact;
    c.big_ = std::move(flat);
  }
  c.compute_box();
  return c;
}

PointCloud PointCloud::from_numerators(std::size_t dim, BigInt denominator, std::vector<std::int64_t> flat) {
  if (dim == 0) throw std::invalid_argument("point cloud dimension must be positive");
  if (denominator <= 0) throw std::invalid_argument("cloud denominator must be positive");
  if (flat.size() % dim != 0) throw std::invalid_argument("flat coordinate list is not a multiple of dim");
  PointCloud c;
  c.dim_ = dim;
  c.size_ = flat.size() / dim;
  c.denominator_ = std::move(denominator);
  c.storage_ = Storage::small_exact;
  c.small_ = std::move(flat);
  c.compute_box();
  return c;
}

PointCloud PointCloud::approximate(std::size_t dim, const std::vector<Vec>& points) {
  Vec flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("point has wrong dimension");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return approximate_flat(dim, std::move(flat));
}

PointCloud PointCloud::approximate_flat(std::size_t dim, Vec flat) {
  if (dim == 0) throw std::invalid_argument("point cloud dimension must be positive");
  if (flat.size() % dim != 0) throw std::invalid_argument("flat coordinate list is not a multiple of dim");
  for (double v : flat)
    if (!std::isfinite(v)) throw std::invalid_argument("point cloud coordinates must be finite");
  PointCloud c;
  c.dim_ = dim;
  c.size_ = flat.size() / dim;
  c.storage_ = Storage::approximate;
  c.approx_ = std::move(flat);
  c.compute_box();
  return c;
}

void PointCloud::compute_box() {
  lo_num_.assign(dim_, 0);
  hi_num_.assign(dim_, 0);
  lo_d_.assign(dim_, 0.0);
  hi_d_.assign(dim_, 0.0);
  if (size_ == 0) return;
  for (std::size_t j = 0; j < dim_; ++j) {
    switch (storage_) {
      case Storage::small_exact: {
        std::int64_t lo = small_[j], hi = small_[j];
        for (std::size_t i = 1; i < size_; ++i) {
          lo = std::min(lo, small_[i * dim_ + j]);
          hi = std::max(hi, small_[i * dim_ + j]);
        }
        lo_num_[j] = lo;
        hi_num_[j] = hi;
        break;
      }
      case Storage::big_exact: {
        const BigInt* lo = &big_[j];
        const BigInt* hi = &big_[j];
        for (std::size_t i = 1; i < size_; ++i) {
          const BigInt& v = big_[i * dim_ + j];
          if (v < *lo) lo = &v;
          if (v > *hi) hi = &v;
        }
        lo_num_[j] = *lo;
        hi_num_[j] = *hi;
        break;
      }
      case Storage::approximate: {
        double lo = approx_[j], hi = approx_[j];
        for (std::size_t i = 1; i < size_; ++i) {
          lo = std::min(lo, approx_[i * dim_ + j]);
          hi = std::max(hi, approx_[i * dim_ + j]);
        }
        lo_d_[j] = lo;
        hi_d_[j] = hi;
        break;
      }
    }
    if (storage_ != Storage::approximate) {
      lo_d_[j] = to_double(Rational(lo_num_[j], denominator_));
      hi_d_[j] = to_double(Rational(hi_num_[j], denominator_));
    }
  }
}

const BigInt& PointCloud::denominator() const {
  if (!is_exact()) throw std::logic_error("approximate cloud has no exact denominator");
  return denominator_;
}

BigInt PointCloud::numerator(std::size_t i, std::size_t j) const {
  switch (storage_) {
    case Storage::small_exact:
      return small_[i * dim_ + j];
    case Storage::big_exact:
      return big_[i * dim_ + j];
    default:
      throw std::logic_error("approximate cloud has no exact numerators");
  }
}

Rational PointCloud::coord(std::size_t i, std::size_t j) const {
  if (storage_ == Storage::approximate) return Rational(approx_[i * dim_ + j]);
  return Rational(numerator(i, j), denominator_);
}

double PointCloud::coord_double(std::size_t i, std::size_t j) const {
  switch (storage_) {
    case Storage::small_exact:
      if (fits_int64(denominator_) && denominator_ < (BigInt(1) << 53))
        return static_cast<double>(small_[i * dim_ + j]) / denominator_.convert_to<double>();
      return to_double(coord(i, j));
    case Storage::big_exact:
      return to_double(coord(i, j));
    default:
      return approx_[i * dim_ + j];
  }
}

RVec PointCloud::point(std::size_t i) const {
  RVec p(dim_);
  for (std::size_t j = 0; j < dim_; ++j) p[j] = coord(i, j);
  return p;
}

Vec PointCloud::point_double(std::size_t i) const {
  Vec p(dim_);
  for (std::size_t j = 0; j < dim_; ++j) p[j] = coord_double(i, j);
  return p;
}

BigInt PointCloud::lower_numerator(std::size_t j) const {
  if (!is_exact()) throw std::logic_error("approximate cloud has no exact bounding box");
  return lo_num_.at(j);
}
BigInt PointCloud::upper_numerator(std::size_t j) const {
  if (!is_exact()) throw std::logic_error("approximate cloud has no exact bounding box");
  return hi_num_.at(j);
}
Rational PointCloud::lower(std::size_t j) const {
  return is_exact() ? Rational(lo_num_.at(j), denominator_) : Rational(lo_d_.at(j));
}
Rational PointCloud::upper(std::size_t j) const {
  return is_exact() ? Rational(hi_num_.at(j), denominator_) : Rational(hi_d_.at(j));
}
double PointCloud::lower_double(std::size_t j) const { return lo_d_.at(j); }
double PointCloud::upper_double(std::size_t j) const { return hi_d_.at(j); }

PointCloud PointCloud::translated(const RVec& t) const {
  if (t.size() != dim_) throw std::invalid_argument("translation has wrong dimension");
  if (!is_exact()) return translated(to_double(t));
  BigInt den = denominator_;
  for (const auto& v : t) den = lcm(den, boost::multiprecision::denominator(v));
  BigInt scale = den / denominator_;
  std::vector<BigInt> flat;
  flat.reserve(size_ * dim_);
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      flat.push_back(numerator(i, j) * scale + boost::multiprecision::numerator(t[j]) * (den / boost::multiprecision::denominator(t[j])));
  return from_numerators(dim_, den, std::move(flat));
}

PointCloud PointCloud::translated(const Vec& t) const {
  if (t.size() != dim_) throw std::invalid_argument("translation has wrong dimension");
  Vec flat(size_ * dim_);
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) flat[i * dim_ + j] = coord_double(i, j) + t[j];
  return approximate_flat(dim_, std::move(flat));
}

PointCloud PointCloud::select_coordinates(const std::vector<std::size_t>& indices) const {
  if (indices.empty()) throw std::invalid_argument("coordinate selection is empty");
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= dim_) throw std::out_of_range("coordinate index out of range");
    for (std::size_t b = 0; b < a; ++b)
      if (indices[a] == indices[b]) throw std::invalid_argument("coordinate indices must be distinct");
  }
  const std::size_t n = indices.size();
  switch (storage_) {
    case Storage::small_exact: {
      std::vector<std::int64_t> flat(size_ * n);
      for (std::size_t i = 0; i < size_; ++i)
        for (std::size_t a = 0; a < n; ++a) flat[i * n + a] = small_[i * dim_ + indices[a]];
      return from_numerators(n, denominator_, std::move(flat));
    }
    case Storage::big_exact: {
      std::vector<BigInt> flat(size_ * n);
      for (std::size_t i = 0; i < size_; ++i)
        for (std::size_t a = 0; a < n; ++a) flat[i * n + a] = big_[i * dim_ + indices[a]];
      return from_numerators(n, denominator_, std::move(flat));
    }
    default: {
      Vec flat(size_ * n);
      for (std::size_t i = 0; i < size_; ++i)
        for (std::size_t a = 0; a < n; ++a) flat[i * n + a] = approx_[i * dim_ + indices[a]];
      return approximate_flat(n, std::move(flat));
    }
  }
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& indices) const {
  switch (storage_) {
    case Storage::small_exact: {
      std::vector<std::int64_t> flat;
      flat.reserve(indices.size() * dim_);
      for (auto i : indices) flat.insert(flat.end(), small_.begin() + i * dim_, small_.begin() + (i + 1) * dim_);
      return from_numerators(dim_, denominator_, std::move(flat));
    }
    case Storage::big_exact: {
      std::vector<BigInt> flat;
      flat.reserve(indices.size() * dim_);
      for (auto i : indices) flat.insert(flat.end(), big_.begin() + i * dim_, big_.begin() + (i + 1) * dim_);
      return from_numerators(dim_, denominator_, std::move(flat));
    }
    default: {
      Vec flat;
      flat.reserve(indices.size() * dim_);
      for (auto i : indices) flat.insert(flat.end(), approx_.begin() + i * dim_, approx_.begin() + (i + 1) * dim_);
      return approximate_flat(dim_, std::move(flat));
    }
  }
}

PointCloud PointCloud::deduplicated() const {
  std::vector<std::size_t> order(size_);
  std::iota(order.begin(), order.end(), 0);
  auto compare = [&](auto const& data) {
    auto less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(data.begin() + a * dim_, data.begin() + (a + 1) * dim_,
                                          data.begin() + b * dim_, data.begin() + (b + 1) * dim_);
    };
    auto equal = [&](std::size_t a, std::size_t b) {
      return std::equal(data.begin() + a * dim_, data.begin() + (a + 1) * dim_, data.begin() + b * dim_);
    };
    std::sort(order.begin(), order.end(), less);
    order.erase(std::unique(order.begin(), order.end(), equal), order.end());
  };
  switch (storage_) {
    case Storage::small_exact:
      compare(small_);
      break;
    case Storage::big_exact:
      compare(big_);
      break;
    default:
      compare(approx_);
      break;
  }
  return subset(order);
}

PointCloud PointCloud::to_approximate() const {
  if (!is_exact()) return *this;
  Vec flat(size_ * dim_);
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) flat[i * dim_ + j] = coord_double(i, j);
  return approximate_flat(dim_, std::move(flat));
}

}  // namespace distdim
