#include "distdim/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace distdim {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::exact:
      return "exact";
    case Provenance::grid:
      return "grid";
    case Provenance::bound:
      return "bound";
  }
  return "grid";
}

Provenance parse_provenance(const std::string& text) {
  if (text == "exact") return Provenance::exact;
  if (text == "grid") return Provenance::grid;
  if (text == "bound") return Provenance::bound;
  throw std::invalid_argument("unknown provenance \"" + text + "\"");
}

std::string to_string(SlopeMode m) { return m == SlopeMode::regression ? "regression" : "max-two-point"; }

CoveringProfile::CoveringProfile(std::vector<ProfileEntry> entries, std::string scale_sequence, RVec anchor)
    : entries_(std::move(entries)), scale_sequence_(std::move(scale_sequence)), anchor_(std::move(anchor)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].delta <= 0) throw std::invalid_argument("profile scales must be positive");
    if (entries_[i].count < 1) throw std::invalid_argument("profile counts must be at least 1");
    if (i == 0) continue;
    if (entries_[i].delta >= entries_[i - 1].delta)
      throw std::invalid_argument("profile scales must be strictly decreasing");
    if (entries_[i].count < entries_[i - 1].count)
      throw std::invalid_argument("profile counts must not decrease as the scale shrinks");
  }
}

bool Window::contains(const Rational& delta) const {
  if (delta_max && delta > *delta_max) return false;
  if (delta_min && delta < *delta_min) return false;
  return true;
}

double neg_log(const Rational& delta) {
  if (delta <= 0) throw std::domain_error("scale must be positive");
  return log_big(denominator(delta)) - log_big(numerator(delta));
}

DimensionEstimate dimension_slope(const CoveringProfile& profile, const Window& window, SlopeMode mode,
                                  unsigned exact_base) {
  std::vector<const ProfileEntry*> used;
  for (const auto& e : profile.entries())
    if (window.contains(e.delta)) used.push_back(&e);
  if (used.size() < 2) throw std::invalid_argument("fewer than two profile entries inside the window");

  const std::size_t n = used.size();
  Vec x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = neg_log(used[i]->delta);
    y[i] = log_big(used[i]->count);
  }
  DimensionEstimate est;
  est.mode = mode;
  est.used = n;
  est.delta_max = used.front()->delta;
  est.delta_min = used.back()->delta;
  est.scale_sequence = profile.scale_sequence();

  double intercept = 0.0;
  if (mode == SlopeMode::regression) {
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("degenerate window: all scales equal");
    est.slope = sxy / sxx;
    intercept = my - est.slope * mx;
    for (std::size_t i = 0; i < n; ++i)
      est.residual = std::max(est.residual, std::abs(y[i] - intercept - est.slope * x[i]));
  } else {
    est.slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) est.slope = std::max(est.slope, (y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    // residual: distance of the points from the line through the first point
    for (std::size_t i = 0; i < n; ++i)
      est.residual = std::max(est.residual, std::abs(y[i] - y[0] - est.slope * (x[i] - x[0])));
  }

  if (exact_base >= 2) {
    std::vector<std::int64_t> a(n), b(n);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      auto ea = numerator(used[i]->delta) == 1 ? exact_log(denominator(used[i]->delta), exact_base) : std::nullopt;
      auto eb = exact_log(used[i]->count, exact_base);
      ok = ea && eb;
      if (ok) a[i] = *ea, b[i] = *eb;
    }
    if (ok) {
      if (mode == SlopeMode::regression) {
        BigInt sa = 0, sb = 0, saa = 0, sab = 0;
        for (std::size_t i = 0; i < n; ++i) {
          sa += a[i];
          sb += b[i];
          saa += BigInt(a[i]) * a[i];
          sab += BigInt(a[i]) * b[i];
        }
        BigInt den = BigInt(n) * saa - sa * sa;
        if (den != 0) est.exact_slope = Rational(BigInt(n) * sab - sa * sb, den);
      } else {
        Rational best(-1);
        for (std::size_t i = 1; i < n; ++i) {
          Rational s(BigInt(b[i] - b[i - 1]), BigInt(a[i] - a[i - 1]));
          if (i == 1 || s > best) best = s;
        }
        est.exact_slope = best;
      }
    }
  }
  return est;
}

namespace {

// Counts distinct rows of a (points x dim) table of nonnegative cell indices.
// Packs rows into one 64-bit key when the index ranges allow it.
std::uint64_t count_distinct_rows(const std::vector<std::uint64_t>& idx, std::size_t dim,
                                  const std::vector<std::uint64_t>& extent) {
  const std::size_t n = idx.size() / dim;
  unsigned __int128 capacity = 1;
  bool packable = true;
  for (auto e : extent) {
    capacity *= static_cast<unsigned __int128>(e) + 1;
    if (capacity > std::numeric_limits<std::uint64_t>::max()) {
      packable = false;
      break;
    }
  }
  if (packable) {
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t k = 0;
      for (std::size_t j = 0; j < dim; ++j) k = k * (extent[j] + 1) + idx[i * dim + j];
      keys[i] = k;
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto row = [&](std::size_t i) { return idx.begin() + static_cast<std::ptrdiff_t>(i * dim); };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::lexicographical_compare(row(a), row(a) + dim, row(b), row(b) + dim); });
  std::uint64_t distinct = n ? 1 : 0;
  for (std::size_t i = 1; i < n; ++i)
    if (!std::equal(row(order[i]), row(order[i]) + dim, row(order[i - 1]))) ++distinct;
  return distinct;
}

std::uint64_t count_distinct_big(const std::vector<BigInt>& idx, std::size_t dim) {
  const std::size_t n = idx.size() / dim;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto row = [&](std::size_t i) { return idx.begin() + static_cast<std::ptrdiff_t>(i * dim); };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::lexicographical_compare(row(a), row(a) + dim, row(b), row(b) + dim); });
  std::uint64_t distinct = n ? 1 : 0;
  for (std::size_t i = 1; i < n; ++i)
    if (!std::equal(row(order[i]), row(order[i]) + dim, row(order[i - 1]))) ++distinct;
  return distinct;
}

}  // namespace

std::uint64_t grid_covering_count(const PointCloud& cloud, const Rational& delta) {
  if (cloud.empty()) throw std::invalid_argument("cannot cover an empty cloud");
  if (delta <= 0) throw std::invalid_argument("grid mesh must be positive");
  if (!cloud.is_exact()) return grid_covering_count(cloud, to_double(delta));

  const std::size_t d = cloud.dim(), n = cloud.size();
  // cell index = floor((num - lo) / (Q * delta)) = floor((num - lo) * b / (Q * a))
  const BigInt a = numerator(delta), b = denominator(delta);
  const BigInt scaled = cloud.denominator() * a;
  std::vector<std::uint64_t> extent(d);
  bool small = cloud.storage() == PointCloud::Storage::small_exact && scaled % b == 0;
  BigInt width = small ? BigInt(scaled / b) : BigInt(0);
  for (std::size_t j = 0; j < d && small; ++j) {
    BigInt span = cloud.upper_numerator(j) - cloud.lower_numerator(j);
    small = fits_int64(width) && fits_int64(span);
    if (small) extent[j] = static_cast<std::uint64_t>((span / width).convert_to<std::int64_t>());
  }
  if (small) {
    const auto w = width.convert_to<std::int64_t>();
    std::vector<std::int64_t> lo(d);
    for (std::size_t j = 0; j < d; ++j) lo[j] = cloud.lower_numerator(j).convert_to<std::int64_t>();
    const auto& data = cloud.small_data();
    if (d == 1) {
      // single coordinate: the distinct cell indices of a sorted run
      std::vector<std::uint64_t> keys(n);
      for (std::size_t i = 0; i < n; ++i) keys[i] = static_cast<std::uint64_t>((data[i] - lo[0]) / w);
      if (!std::is_sorted(keys.begin(), keys.end())) std::sort(keys.begin(), keys.end());
      return static_cast<std::uint64_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    }
    std::vector<std::uint64_t> idx(n * d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) idx[i * d + j] = static_cast<std::uint64_t>((data[i * d + j] - lo[j]) / w);
    return count_distinct_rows(idx, d, extent);
  }

  std::vector<BigInt> idx(n * d);
  for (std::size_t j = 0; j < d; ++j) {
    const BigInt lo = cloud.lower_numerator(j);
    for (std::size_t i = 0; i < n; ++i) idx[i * d + j] = ((cloud.numerator(i, j) - lo) * b) / scaled;
  }
  bool fits = true;
  for (std::size_t j = 0; j < d && fits; ++j) {
    BigInt top = ((cloud.upper_numerator(j) - cloud.lower_numerator(j)) * b) / scaled;
    fits = top < BigInt(std::numeric_limits<std::int64_t>::max());
    if (fits) extent[j] = top.convert_to<std::uint64_t>();
  }
  if (fits) {
    std::vector<std::uint64_t> small_idx(n * d);
    for (std::size_t k = 0; k < idx.size(); ++k) small_idx[k] = idx[k].convert_to<std::uint64_t>();
    return count_distinct_rows(small_idx, d, extent);
  }
  return count_distinct_big(idx, d);
}

std::uint64_t grid_covering_count(const PointCloud& cloud, double delta) {
  if (cloud.empty()) throw std::invalid_argument("cannot cover an empty cloud");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("grid mesh must be positive");
  if (cloud.is_exact()) return grid_covering_count(cloud, Rational(delta));
  const std::size_t d = cloud.dim(), n = cloud.size();
  std::vector<std::uint64_t> extent(d);
  for (std::size_t j = 0; j < d; ++j) {
    double cells = std::floor((cloud.upper_double(j) - cloud.lower_double(j)) / delta);
    if (cells > 0x1p62) throw std::invalid_argument("grid mesh too fine for a floating point cloud");
    extent[j] = static_cast<std::uint64_t>(cells);
  }
  const auto& data = cloud.double_data();
  std::vector<std::uint64_t> idx(n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double c = std::floor((data[i * d + j] - cloud.lower_double(j)) / delta);
      idx[i * d + j] = std::min(static_cast<std::uint64_t>(std::max(c, 0.0)), extent[j]);
    }
  if (d == 1) {
    std::sort(idx.begin(), idx.end());
    return static_cast<std::uint64_t>(std::unique(idx.begin(), idx.end()) - idx.begin());
  }
  return count_distinct_rows(idx, d, extent);
}

CoveringProfile grid_profile(const PointCloud& cloud, const std::vector<Rational>& deltas,
                             std::string scale_sequence) {
  std::vector<ProfileEntry> entries;
  entries.reserve(deltas.size());
  for (const auto& delta : deltas) entries.push_back({delta, BigInt(grid_covering_count(cloud, delta)), Provenance::grid});
  RVec anchor;
  for (std::size_t j = 0; j < cloud.dim(); ++j) anchor.push_back(cloud.lower(j));
  return CoveringProfile(std::move(entries), std::move(scale_sequence), std::move(anchor));
}

std::vector<Rational> q_adic_scales(unsigned q, const std::vector<std::int64_t>& levels) {
  std::vector<Rational> out;
  out.reserve(levels.size());
  for (auto m : levels) {
    if (m < 0) throw std::invalid_argument("scale level must be nonnegative");
    out.emplace_back(BigInt(1), ipow(q, m));
  }
  return out;
}

}  // namespace distdim
