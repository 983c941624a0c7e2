#include "distdim/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "distdim/linalg.hpp"
#include "distdim/sequence.hpp"

namespace distdim {

PointCloud coordinate_project(const PointCloud& cloud, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("projection needs at least one coordinate");
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= cloud.dim()) throw std::out_of_range("projection index out of range");
    if (a > 0 && indices[a] <= indices[a - 1])
      throw std::invalid_argument("projection indices must be strictly increasing");
  }
  return cloud.select_coordinates(indices);
}

namespace {

void next_subsets(std::size_t d, std::size_t n, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    out.push_back(pick);
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == d - n + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

JarvenpaaReport jarvenpaa_check(const PointCloud& cloud, std::size_t n, const std::vector<Rational>& scales,
                                const Window& window, double tol, unsigned exact_base,
                                const std::string& scale_sequence) {
  const std::size_t d = cloud.dim();
  if (cloud.empty()) throw std::invalid_argument("projection check on an empty cloud");
  if (n < 1 || n > d) throw std::invalid_argument("projection rank n must lie in [1, d]");
  JarvenpaaReport r;
  r.n = n;
  r.tol = tol;
  r.set_estimate = dimension_slope(grid_profile(cloud, scales, scale_sequence), window, SlopeMode::regression,
                                   exact_base);
  std::vector<std::vector<std::size_t>> subsets;
  next_subsets(d, n, subsets);
  for (auto& s : subsets) {
    auto est = dimension_slope(grid_profile(coordinate_project(cloud, s), scales, scale_sequence), window,
                               SlopeMode::regression, exact_base);
    r.subsets.push_back({std::move(s), std::move(est)});
  }
  for (std::size_t i = 1; i < r.subsets.size(); ++i)
    if (r.subsets[i].estimate.slope > r.subsets[r.best].estimate.slope) r.best = i;
  const double ratio = static_cast<double>(n) / static_cast<double>(d);
  r.margin = r.subsets[r.best].estimate.slope - ratio * r.set_estimate.slope;
  bool exact = r.set_estimate.exact_slope.has_value();
  for (const auto& s : r.subsets) exact = exact && s.estimate.exact_slope.has_value();
  if (exact) {
    Rational best = *r.subsets.front().estimate.exact_slope;
    for (const auto& s : r.subsets) best = std::max(best, *s.estimate.exact_slope);
    r.exact_margin = best - Rational(static_cast<long long>(n), static_cast<long long>(d)) * *r.set_estimate.exact_slope;
  }
  r.pass = r.exact_margin ? *r.exact_margin >= -Rational(tol) : r.margin >= -tol;
  return r;
}

IdentityReport projection_identity_check(const PointCloud& cloud, const PolyhedralNorm& norm,
                                         const std::vector<std::size_t>& facets, const std::vector<RVec>& pins,
                                         std::uint64_t max_pairs, std::uint64_t seed) {
  const std::size_t d = norm.dim();
  if (cloud.dim() != d) throw std::invalid_argument("cloud and norm dimensions differ");
  if (facets.empty() || facets.size() != pins.size())
    throw std::invalid_argument("need one pin per chosen facet");
  std::vector<RVec> basis;
  for (auto f : facets) {
    if (f >= norm.facet_count()) throw std::out_of_range("facet index out of range");
    basis.push_back(norm.facets()[f]);
  }
  if (linalg::rank(basis) != basis.size()) throw std::invalid_argument("chosen facets are linearly dependent");
  for (const auto& z : pins)
    if (z.size() != d) throw std::invalid_argument("pin has wrong dimension");

  // P_V = B^T (B B^T)^-1 B, as a d x d rational matrix
  linalg::Matrix<Rational> proj(d, RVec(d, Rational(0)));
  for (std::size_t c = 0; c < d; ++c) {
    RVec e(d, Rational(0));
    e[c] = 1;
    RVec col = linalg::project_onto_span(basis, e);
    for (std::size_t r = 0; r < d; ++r) proj[r][c] = col[r];
  }

  std::vector<RVec> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) pts[i] = cloud.point(i);

  IdentityReport report;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t l = 0; l < facets.size(); ++l)
      if (!cone_contains(norm, pins[l], facets[l], pts[i])) {
        report.cone_condition = false;
        report.offending_point = i;
        return report;
      }

  auto check_pair = [&](std::size_t a, std::size_t b) {
    RVec w(d), pw(d, Rational(0));
    for (std::size_t j = 0; j < d; ++j) w[j] = pts[a][j] - pts[b][j];
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) pw[r] += proj[r][c] * w[c];
    ++report.pairs_checked;
    return norm.eval(w) == norm.eval(pw);
  };
  const std::size_t n = pts.size();
  const unsigned __int128 total = static_cast<unsigned __int128>(n) * (n > 0 ? n - 1 : 0) / 2;
  report.pass = true;
  if (total <= max_pairs) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (!check_pair(a, b)) {
          report.pass = false;
          report.offending_pair = {a, b};
          return report;
        }
  } else {
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < max_pairs; ++k) {
      auto a = static_cast<std::size_t>(rng.below(n, 0x1de7, 2 * k));
      auto b = static_cast<std::size_t>((a + 1 + rng.below(n - 1, 0x1de7, 2 * k + 1)) % n);
      if (!check_pair(std::min(a, b), std::max(a, b))) {
        report.pass = false;
        report.offending_pair = {std::min(a, b), std::max(a, b)};
        return report;
      }
    }
  }
  return report;
}

ProjectionFamily::ProjectionFamily(NormSpec norm, std::vector<Vec> pins) : norm_(std::move(norm)), pins_(std::move(pins)) {
  if (pins_.empty()) throw std::invalid_argument("projection family needs at least one pin");
  const std::size_t d = dimension(norm_);
  for (std::size_t i = 0; i < pins_.size(); ++i) {
    if (pins_[i].size() != d) throw std::invalid_argument("pin has wrong dimension");
    for (std::size_t j = 0; j < i; ++j)
      if (pins_[i] == pins_[j]) throw std::invalid_argument("pins must be pairwise distinct");
  }
}

Vec ProjectionFamily::evaluate(std::span<const double> x) const {
  const std::size_t d = dim();
  if (x.size() != d) throw std::invalid_argument("point has wrong dimension");
  Vec out(pins_.size()), w(d);
  for (std::size_t i = 0; i < pins_.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) w[j] = x[j] - pins_[i][j];
    out[i] = eval(norm_, w);
  }
  return out;
}

std::vector<std::size_t> ProjectionFamily::points_on_pins(const PointCloud& cloud) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Vec p = cloud.point_double(i);
    for (const auto& z : pins_)
      if (p == z) {
        out.push_back(i);
        break;
      }
  }
  return out;
}

FiberIndex::FiberIndex(const ProjectionFamily& family, const PointCloud& cloud) : family_(&family), cloud_(&cloud) {
  if (cloud.dim() != family.dim()) throw std::invalid_argument("cloud and family dimensions differ");
  const std::size_t n = cloud.size(), k = family.size(), d = cloud.dim();
  values_.resize(n * k);
  Vec x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[j] = cloud.coord_double(i, j);
    Vec v = family.evaluate(x);
    std::copy(v.begin(), v.end(), values_.begin() + static_cast<std::ptrdiff_t>(i * k));
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return values_[a * k] < values_[b * k]; });
  sorted_first_.resize(n);
  for (std::size_t i = 0; i < n; ++i) sorted_first_[i] = values_[order_[i] * k];
}

std::vector<std::size_t> FiberIndex::fiber(const Vec& xi, double delta) const {
  const std::size_t k = family_->size();
  if (xi.size() != k) throw std::invalid_argument("xi has wrong dimension");
  if (!(delta > 0.0)) throw std::invalid_argument("fiber width must be positive");
  auto lo = std::upper_bound(sorted_first_.begin(), sorted_first_.end(), xi[0] - delta);
  auto hi = std::lower_bound(sorted_first_.begin(), sorted_first_.end(), xi[0] + delta);
  std::vector<std::size_t> out;
  for (auto it = lo; it < hi; ++it) {
    std::size_t i = order_[static_cast<std::size_t>(it - sorted_first_.begin())];
    bool inside = true;
    for (std::size_t c = 0; c < k && inside; ++c) inside = std::abs(values_[i * k + c] - xi[c]) < delta;
    if (inside) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::uint64_t bucket_key(const std::vector<std::int64_t>& cell) {
  std::uint64_t h = 0x51ed270b27ULL;
  for (auto c : cell) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

FiberCoverReport greedy_cover(const NormSpec& norm, const PointCloud& cloud, std::vector<std::size_t> fiber,
                              const Vec& xi, double delta, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("cover radius factor must be positive");
  FiberCoverReport report;
  report.delta = delta;
  report.radius = radius;
  report.xi = xi;
  report.fiber_size = fiber.size();
  const std::size_t d = cloud.dim();
  const double r = radius * delta;
  const double side = r * linf_bound(norm);

  std::vector<Vec> pts(fiber.size());
  std::vector<std::vector<std::int64_t>> cells(fiber.size(), std::vector<std::int64_t>(d));
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t a = 0; a < fiber.size(); ++a) {
    pts[a] = cloud.point_double(fiber[a]);
    for (std::size_t j = 0; j < d; ++j) cells[a][j] = static_cast<std::int64_t>(std::floor(pts[a][j] / side));
    buckets[bucket_key(cells[a])].push_back(a);
  }
  std::vector<char> covered(fiber.size(), 0);
  std::vector<std::int64_t> probe(d);
  Vec w(d);
  std::size_t offsets = 1;
  for (std::size_t j = 0; j < d; ++j) offsets *= 3;
  for (std::size_t a = 0; a < fiber.size(); ++a) {
    if (covered[a]) continue;
    report.centers.push_back(fiber[a]);
    for (std::size_t o = 0; o < offsets; ++o) {
      std::size_t code = o;
      for (std::size_t j = 0; j < d; ++j) {
        probe[j] = cells[a][j] + static_cast<std::int64_t>(code % 3) - 1;
        code /= 3;
      }
      auto it = buckets.find(bucket_key(probe));
      if (it == buckets.end()) continue;
      for (auto b : it->second) {
        if (covered[b] || cells[b] != probe) continue;
        for (std::size_t j = 0; j < d; ++j) w[j] = pts[b][j] - pts[a][j];
        if (eval(norm, w) <= r) covered[b] = 1;
      }
    }
    covered[a] = 1;
  }
  report.m = report.centers.size();
  return report;
}

bool covers(const NormSpec& norm, const PointCloud& cloud, const std::vector<std::size_t>& fiber,
            const FiberCoverReport& report) {
  if (fiber.size() != report.fiber_size) return false;
  const std::size_t d = cloud.dim();
  const double r = report.radius * report.delta;
  // ||w|| <= r forces |w_j| <= r * linf_bound, so a covering center lies in
  // one of the 3^d cells around the point
  const double side = r * linf_bound(norm);
  auto cell_of = [&](const Vec& x) {
    std::vector<std::int64_t> c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = static_cast<std::int64_t>(std::floor(x[j] / side));
    return c;
  };
  std::vector<Vec> centers;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (auto c : report.centers) {
    if (!std::binary_search(fiber.begin(), fiber.end(), c)) return false;
    centers.push_back(cloud.point_double(c));
    buckets[bucket_key(cell_of(centers.back()))].push_back(centers.size() - 1);
  }
  std::size_t offsets = 1;
  for (std::size_t j = 0; j < d; ++j) offsets *= 3;
  Vec w(d);
  std::vector<std::int64_t> probe(d);
  for (auto i : fiber) {
    Vec x = cloud.point_double(i);
    auto home = cell_of(x);
    bool hit = false;
    for (std::size_t o = 0; o < offsets && !hit; ++o) {
      std::size_t code = o;
      for (std::size_t j = 0; j < d; ++j) {
        probe[j] = home[j] + static_cast<std::int64_t>(code % 3) - 1;
        code /= 3;
      }
      auto it = buckets.find(bucket_key(probe));
      if (it == buckets.end()) continue;
      for (auto c : it->second) {
        for (std::size_t j = 0; j < d; ++j) w[j] = x[j] - centers[c][j];
        if (eval(norm, w) <= r) {
          hit = true;
          break;
        }
      }
    }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

FiberCoverReport fiber_cover(const FiberIndex& index, const Vec& xi, double delta, double radius) {
  auto report = greedy_cover(index.family().norm(), index.cloud(), index.fiber(xi, delta), xi, delta, radius);
  return report;
}

FiberCoverReport fiber_cover(const ProjectionFamily& family, const PointCloud& cloud, const Vec& xi, double delta,
                             double radius) {
  FiberIndex index(family, cloud);
  auto report = fiber_cover(index, xi, delta, radius);
  report.certified = recheck_cover(family, cloud, report);
  return report;
}

bool recheck_cover(const ProjectionFamily& family, const PointCloud& cloud, const FiberCoverReport& report) {
  std::vector<std::size_t> fiber;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Vec v = family.evaluate(cloud.point_double(i));
    bool inside = true;
    for (std::size_t c = 0; c < v.size() && inside; ++c) inside = std::abs(v[c] - report.xi[c]) < report.delta;
    if (inside) fiber.push_back(i);
  }
  return covers(family.norm(), cloud, fiber, report);
}

TransversalityScan weak_transversality_scan(const FiberIndex& index, const std::vector<double>& deltas,
                                            const std::vector<Vec>& xi_samples, double radius, bool recheck) {
  if (deltas.size() < 3) throw std::invalid_argument("transversality scan needs at least 3 scales");
  if (xi_samples.empty()) throw std::invalid_argument("transversality scan needs xi samples");
  TransversalityScan scan;
  scan.deltas = deltas;
  const std::size_t k = index.family().size();
  const Vec& values = index.values();
  for (double delta : deltas) {
    std::size_t best = 0, worst = 0;
    for (std::size_t s = 0; s < xi_samples.size(); ++s) {
      auto report = fiber_cover(index, xi_samples[s], delta, radius);
      if (recheck) {
        // linear rescan of the stored values, independent of the sorted slab
        std::vector<std::size_t> fiber;
        for (std::size_t i = 0; i < index.cloud().size(); ++i) {
          bool inside = true;
          for (std::size_t c = 0; c < k && inside; ++c)
            inside = std::abs(values[i * k + c] - xi_samples[s][c]) < delta;
          if (inside) fiber.push_back(i);
        }
        report.certified = covers(index.family().norm(), index.cloud(), fiber, report);
        scan.all_certified = scan.all_certified && report.certified;
      }
      if (report.m > best) {
        best = report.m;
        worst = s;
      }
    }
    scan.max_m.push_back(best);
    scan.worst_xi.push_back(worst);
  }
  const std::size_t n = deltas.size();
  Vec x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (scan.max_m[i] == 0) throw std::invalid_argument("every sampled fiber is empty at some scale");
    x[i] = -std::log(deltas[i]);
    y[i] = std::log(static_cast<double>(scan.max_m[i]));
  }
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("degenerate scale sequence");
  scan.exponent = sxy / sxx;
  for (std::size_t i = 0; i < n; ++i)
    scan.residual = std::max(scan.residual, std::abs(y[i] - my - scan.exponent * (x[i] - mx)));
  return scan;
}

std::vector<Vec> xi_samples(const ProjectionFamily& family, const PointCloud& cloud, std::size_t count,
                            std::uint64_t seed) {
  if (cloud.empty()) throw std::invalid_argument("xi sampling needs a nonempty cloud");
  std::vector<Vec> out;
  const CounterRng rng(seed);
  for (std::size_t s = 0; s < count; ++s) {
    auto i = static_cast<std::size_t>(rng.below(cloud.size(), 0xf1be, s));
    out.push_back(family.evaluate(cloud.point_double(i)));
  }
  const std::size_t d = cloud.dim();
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    Vec c(d);
    for (std::size_t j = 0; j < d; ++j) c[j] = (corner >> j) & 1 ? cloud.upper_double(j) : cloud.lower_double(j);
    out.push_back(family.evaluate(c));
  }
  return out;
}

}  // namespace distdim
