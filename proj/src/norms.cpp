#include "distdim/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "distdim/errors.hpp"
#include "distdim/linalg.hpp"
#include "distdim/sequence.hpp"

namespace distdim {

namespace {

template <class T>
void require_dim(std::size_t expected, std::span<const T> x) {
  if (x.size() != expected)
    throw std::invalid_argument("vector of dimension " + std::to_string(x.size()) + " given to a norm on R^" +
                                std::to_string(expected));
}

double euclid(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Index of the facet attaining the max for x, or throws when two facets with
// different functionals tie. Equality in doubles is relative to the max.
std::size_t unique_argmax(const PolyhedralNorm& norm, std::span<const double> x, std::size_t pin) {
  const std::size_t m = norm.facet_count();
  Vec vals(m);
  std::size_t best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    vals[i] = std::abs(norm.inner(i, x));
    if (vals[i] > vals[best]) best = i;
  }
  if (vals[best] == 0.0) throw GradientUndefined("gradient undefined at the pin itself", pin);
  const double slack = 1e-12 * vals[best];
  for (std::size_t i = 0; i < m; ++i) {
    if (i == best || vals[best] - vals[i] > slack) continue;
    if (!norm.same_functional(i, best))
      throw GradientUndefined("point lies on a cone boundary (facets " + std::to_string(best) + " and " +
                                  std::to_string(i) + " tie)",
                              pin);
  }
  return best;
}

}  // namespace

PolyhedralNorm::PolyhedralNorm(std::vector<RVec> facets) : facets_(std::move(facets)) {
  if (facets_.empty()) throw std::invalid_argument("polyhedral norm needs at least one facet");
  dim_ = facets_.front().size();
  if (dim_ == 0) throw std::invalid_argument("facets must have positive dimension");
  for (const auto& f : facets_)
    if (f.size() != dim_) throw std::invalid_argument("facets have inconsistent dimensions");
  if (facets_.size() < dim_ || linalg::rank(facets_) != dim_)
    throw std::invalid_argument("facet functionals do not span R^" + std::to_string(dim_) +
                                "; the result would only be a seminorm");
  for (const auto& f : facets_)
    for (const auto& v : f) denominator_ = lcm(denominator_, denominator(v));
  for (const auto& f : facets_) {
    std::vector<BigInt> row;
    Vec rowd;
    for (const auto& v : f) {
      row.push_back(numerator(v) * (denominator_ / denominator(v)));
      rowd.push_back(to_double(v));
    }
    numerators_.push_back(std::move(row));
    facets_d_.push_back(std::move(rowd));
  }
}

Rational PolyhedralNorm::inner(std::size_t facet, std::span<const Rational> x) const {
  require_dim(dim_, x);
  Rational acc = 0;
  for (std::size_t j = 0; j < dim_; ++j) acc += facets_.at(facet)[j] * x[j];
  return acc;
}

double PolyhedralNorm::inner(std::size_t facet, std::span<const double> x) const {
  require_dim(dim_, x);
  double acc = 0.0;
  const auto& f = facets_d_.at(facet);
  for (std::size_t j = 0; j < dim_; ++j) acc += f[j] * x[j];
  return acc;
}

Rational PolyhedralNorm::eval(std::span<const Rational> x) const {
  Rational best = 0;
  for (std::size_t i = 0; i < facets_.size(); ++i) best = std::max(best, Rational(abs(inner(i, x))));
  return best;
}

double PolyhedralNorm::eval(std::span<const double> x) const {
  double best = 0.0;
  for (std::size_t i = 0; i < facets_.size(); ++i) best = std::max(best, std::abs(inner(i, x)));
  return best;
}

bool PolyhedralNorm::same_functional(std::size_t a, std::size_t b) const {
  const auto& u = facets_.at(a);
  const auto& v = facets_.at(b);
  bool plus = true, minus = true;
  for (std::size_t j = 0; j < dim_; ++j) {
    plus = plus && u[j] == v[j];
    minus = minus && u[j] == -v[j];
  }
  return plus || minus;
}

SmoothNorm SmoothNorm::lp(double p, Vec weights) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("l^p exponent must lie in (1, inf)");
  if (weights.empty()) throw std::invalid_argument("l^p norm needs at least one weight");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("l^p weights must be positive and finite");
  return SmoothNorm(p, std::move(weights));
}

double SmoothNorm::eval(std::span<const double> x) const {
  require_dim(dim(), x);
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += weights_[i] * std::pow(std::abs(x[i]) / scale, p_);
  return scale * std::pow(acc, 1.0 / p_);
}

Vec SmoothNorm::gradient(std::span<const double> x) const {
  const double n = eval(x);
  if (n == 0.0) throw std::domain_error("norm is not differentiable at the origin");
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = std::abs(x[i]) / n;
    g[i] = x[i] == 0.0 ? 0.0 : std::copysign(weights_[i] * std::pow(r, p_ - 1.0), x[i]);
  }
  return g;
}

double SmoothNorm::dual_eval(std::span<const double> f) const {
  require_dim(dim(), f);
  const double q = p_ / (p_ - 1.0);
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += std::pow(weights_[i], 1.0 - q) * std::pow(std::abs(f[i]) / scale, q);
  return scale * std::pow(acc, 1.0 / q);
}

std::size_t dimension(const NormSpec& norm) {
  return std::visit([](const auto& n) { return n.dim(); }, norm);
}

double eval(const NormSpec& norm, std::span<const double> x) {
  return std::visit([&](const auto& n) { return n.eval(x); }, norm);
}

std::string describe(const NormSpec& norm) {
  std::ostringstream out;
  if (const auto* poly = std::get_if<PolyhedralNorm>(&norm)) {
    out << "polyhedral(d=" << poly->dim() << ", facets=" << poly->facet_count()
        << ", q=" << poly->common_denominator() << ")";
  } else {
    const auto& s = std::get<SmoothNorm>(norm);
    out.precision(17);
    out << "lp(d=" << s.dim() << ", p=" << s.exponent() << ", weights=[";
    for (std::size_t i = 0; i < s.dim(); ++i) out << (i ? "," : "") << s.weights()[i];
    out << "])";
  }
  return out.str();
}

Vec gradient(const NormSpec& norm, std::span<const double> x) {
  if (const auto* poly = std::get_if<PolyhedralNorm>(&norm)) {
    require_dim(poly->dim(), x);
    std::size_t i = unique_argmax(*poly, x, 0);
    Vec g = poly->facets_double()[i];
    if (poly->inner(i, x) < 0)
      for (double& v : g) v = -v;
    return g;
  }
  return std::get<SmoothNorm>(norm).gradient(x);
}

RVec gradient(const PolyhedralNorm& norm, std::span<const Rational> x) {
  require_dim(norm.dim(), x);
  const std::size_t m = norm.facet_count();
  std::vector<Rational> vals(m);
  std::size_t best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    vals[i] = abs(norm.inner(i, x));
    if (vals[i] > vals[best]) best = i;
  }
  if (vals[best] == 0) throw GradientUndefined("norm is not differentiable at the origin", 0);
  for (std::size_t i = 0; i < m; ++i)
    if (i != best && vals[i] == vals[best] && !norm.same_functional(i, best))
      throw GradientUndefined("point lies on a cone boundary", 0);
  RVec g = norm.facets()[best];
  if (norm.inner(best, x) < 0)
    for (auto& v : g) v = -v;
  return g;
}

DualityReport duality_check(const SmoothNorm& norm, std::span<const double> x, double tol) {
  const double nx = norm.eval(x);
  if (nx == 0.0) throw std::domain_error("duality check needs x != 0");
  DualityReport r;
  r.functional = norm.gradient(x);
  for (double& v : r.functional) v *= nx;
  double pairing = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) pairing += r.functional[i] * x[i];
  const double nf = norm.dual_eval(r.functional);
  r.pairing_residual = std::abs(pairing - nf * nx) / (nx * nx);
  r.norm_residual = std::abs(nf - nx) / nx;
  r.pass = r.pairing_residual <= tol && r.norm_residual <= tol;
  return r;
}

bool cone_contains(const PolyhedralNorm& norm, std::span<const Rational> apex, std::size_t facet,
                   std::span<const Rational> y) {
  if (facet >= norm.facet_count()) throw std::out_of_range("facet index out of range");
  require_dim(norm.dim(), apex);
  require_dim(norm.dim(), y);
  RVec w(norm.dim());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = apex[j] - y[j];
  return norm.eval(w) == abs(norm.inner(facet, w));
}

bool cone_contains(const PolyhedralNorm& norm, std::span<const double> apex, std::size_t facet,
                   std::span<const double> y) {
  if (facet >= norm.facet_count()) throw std::out_of_range("facet index out of range");
  require_dim(norm.dim(), apex);
  require_dim(norm.dim(), y);
  Vec w(norm.dim());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = apex[j] - y[j];
  return norm.eval(w) == std::abs(norm.inner(facet, w));
}

ConeSpec::ConeSpec(Vec apex, std::vector<Vec> basis, double aperture)
    : apex_(std::move(apex)), basis_(std::move(basis)), aperture_(aperture) {
  if (!(aperture_ > 0.0 && aperture_ < 1.0)) throw std::invalid_argument("cone aperture must lie in (0, 1)");
  if (basis_.size() > apex_.size()) throw std::invalid_argument("subspace basis larger than the ambient space");
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].size() != apex_.size()) throw std::invalid_argument("basis vector has wrong dimension");
    for (std::size_t j = 0; j <= i; ++j) {
      double expect = i == j ? 1.0 : 0.0;
      if (std::abs(linalg::dot(basis_[i], basis_[j]) - expect) > 1e-12)
        throw std::invalid_argument("cone subspace basis is not orthonormal");
    }
  }
}

ConeSpec ConeSpec::spanned_by(Vec apex, const std::vector<Vec>& vectors, double aperture) {
  std::vector<Vec> basis;
  for (const auto& v : vectors) {
    Vec w = v;
    // two passes of modified Gram-Schmidt keep orthonormality at 1e-15
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        double c = linalg::dot(w, b);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= c * b[j];
      }
    double n = euclid(w);
    if (n <= 1e-12 * std::max(1.0, euclid(v))) continue;
    for (double& x : w) x /= n;
    basis.push_back(std::move(w));
  }
  return ConeSpec(std::move(apex), std::move(basis), aperture);
}

bool cone_X_contains(const ConeSpec& cone, std::span<const double> x) {
  require_dim(cone.apex().size(), x);
  Vec w(x.size());
  bool zero = true;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = x[j] - cone.apex()[j];
    zero = zero && w[j] == 0.0;
  }
  if (zero) throw std::domain_error("cone membership is undefined at the apex");
  const double full = euclid(w);
  Vec perp = w;
  for (const auto& b : cone.basis()) {
    double c = linalg::dot(w, b);
    for (std::size_t j = 0; j < w.size(); ++j) perp[j] -= c * b[j];
  }
  return euclid(perp) < cone.aperture() * full;
}

double transversality_volume(const NormSpec& norm, std::span<const double> x, const std::vector<Vec>& pins) {
  const std::size_t d = dimension(norm);
  require_dim(d, x);
  std::vector<Vec> grads;
  for (std::size_t i = 0; i < pins.size(); ++i) {
    if (pins[i].size() != d) throw std::invalid_argument("pin has wrong dimension");
    Vec w(d);
    bool zero = true;
    for (std::size_t j = 0; j < d; ++j) {
      w[j] = x[j] - pins[i][j];
      zero = zero && w[j] == 0.0;
    }
    if (zero) throw GradientUndefined("point coincides with pin " + std::to_string(i), i);
    if (const auto* poly = std::get_if<PolyhedralNorm>(&norm)) {
      std::size_t f = unique_argmax(*poly, w, i);
      Vec g = poly->facets_double()[f];
      if (poly->inner(f, w) < 0)
        for (double& v : g) v = -v;
      grads.push_back(std::move(g));
    } else {
      grads.push_back(std::get<SmoothNorm>(norm).gradient(w));
    }
  }
  return linalg::parallelepiped_volume(grads);
}

std::vector<Vec> sphere_sample(std::size_t dim, std::size_t count) {
  if (dim == 0) throw std::invalid_argument("sphere sample needs dim >= 1");
  std::vector<Vec> out;
  out.reserve(count);
  if (dim == 1) {
    for (std::size_t i = 0; i < count; ++i) out.push_back({i % 2 ? -1.0 : 1.0});
    return out;
  }
  if (dim == 2) {
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t i = 0; i < count; ++i) {
      double t = two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  // Halton points pushed through the Gaussian-free "normalize the cube" map
  // would cluster toward corners; use Box-Muller on pairs instead.
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::uint64_t i = 1; out.size() < count; ++i) {
    Vec v(dim);
    for (std::size_t j = 0; j < dim; j += 2) {
      double u1 = halton(i, nth_prime(j)), u2 = halton(i, nth_prime(j + 1));
      if (u1 <= 0.0) u1 = 0.5;
      double r = std::sqrt(-2.0 * std::log(u1));
      v[j] = r * std::cos(two_pi * u2);
      if (j + 1 < dim) v[j + 1] = r * std::sin(two_pi * u2);
    }
    double n = euclid(v);
    if (n == 0.0) continue;
    for (double& x : v) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

double direction_constant(const SmoothNorm& norm) {
  // The cosine of the angle between z and grad||z||. Using <z, grad>/|z|
  // alone is not scale-free in the gradient (|grad| can far exceed 1 for
  // weighted norms) and would not yield a valid cone aperture.
  const std::size_t samples = norm.dim() <= 2 ? 20000 : 50000;
  double worst = 1.0;
  for (const auto& z : sphere_sample(norm.dim(), samples)) {
    Vec g = norm.gradient(z);
    double c = linalg::dot(z, g) / (euclid(z) * euclid(g));
    worst = std::min(worst, c);
  }
  return 0.9 * worst;
}

double direction_aperture(const SmoothNorm& norm) {
  double lambda = direction_constant(norm);
  return std::sqrt(1.0 - lambda * lambda);
}

double modulus_h(const SmoothNorm& norm, double eps, std::size_t budget) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("modulus scale must be finite and >= 0");
  if (eps == 0.0) return 0.0;
  if (budget == 0) throw std::invalid_argument("modulus sample budget must be positive");
  const std::size_t d = norm.dim();
  // smallest n with 2^-n <= eps, so every sampled displacement obeys ||x-y|| < eps
  int n0 = static_cast<int>(std::ceil(-std::log2(eps)));
  if (std::ldexp(1.0, -n0) > eps) ++n0;
  constexpr int kLevels = 20;
  const double two_pi = 2.0 * std::acos(-1.0);

  // One fixed Halton design reused on every level: direction of x, radius,
  // direction of the displacement, and its relative length.
  auto unit = [&](std::uint64_t i, std::size_t base_offset) {
    Vec v(d);
    if (d == 1) {
      v[0] = halton(i, nth_prime(base_offset)) < 0.5 ? -1.0 : 1.0;
    } else {
      for (std::size_t j = 0; j < d; j += 2) {
        double u1 = halton(i, nth_prime(base_offset + j));
        double u2 = halton(i, nth_prime(base_offset + j + 1));
        double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
        v[j] = r * std::cos(two_pi * u2);
        if (j + 1 < d) v[j + 1] = r * std::sin(two_pi * u2);
      }
    }
    double n = norm.eval(v);
    if (n == 0.0) v.assign(d, 0.0), v[0] = 1.0, n = norm.eval(v);
    for (double& x : v) x /= n;
    return v;
  };
  const std::size_t stride = d + (d % 2);
  std::vector<Vec> xs, ws;
  std::vector<double> taus;
  for (std::uint64_t i = 1; i <= budget; ++i) {
    Vec u = unit(i, 0);
    double radius = 0.5 + 1.5 * halton(i, nth_prime(2 * stride));
    for (double& v : u) v *= radius;
    xs.push_back(std::move(u));
    ws.push_back(unit(i, stride));
    taus.push_back(halton(i, nth_prime(2 * stride + 1)));
  }

  double best = 0.0;
  Vec y(d);
  for (int level = n0; level <= n0 + kLevels; ++level) {
    const double r = std::ldexp(1.0, -level);
    for (std::size_t s = 0; s < xs.size(); ++s) {
      const Vec& x = xs[s];
      Vec g = norm.gradient(x);
      double lin = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double w = r * taus[s] * ws[s][j];
        y[j] = x[j] - w;
        lin += g[j] * w;
      }
      double gap = std::abs(lin) - std::abs(norm.eval(x) - norm.eval(y));
      best = std::max(best, gap);
    }
  }
  return best;
}

double neighbourhood_constant(std::size_t k, double volume_bound) {
  if (!(volume_bound > 0.0)) throw std::invalid_argument("transversality bound L must be positive");
  return std::sqrt(static_cast<double>(k)) / volume_bound;
}

double linf_bound(const NormSpec& norm) {
  if (const auto* s = std::get_if<SmoothNorm>(&norm)) {
    double w = *std::min_element(s->weights().begin(), s->weights().end());
    return std::pow(w, -1.0 / s->exponent());
  }
  // Vertices of the unit ball {|<v, v_i>| <= 1}: every choice of d linearly
  // independent facets with signs gives a candidate; keep feasible ones.
  const auto& poly = std::get<PolyhedralNorm>(norm);
  const std::size_t d = poly.dim(), m = poly.facet_count();
  const auto& f = poly.facets_double();
  std::vector<std::size_t> pick(d);
  for (std::size_t i = 0; i < d; ++i) pick[i] = i;
  double best = 0.0;
  while (true) {
    linalg::Matrix<double> a;
    for (auto i : pick) a.push_back(f[i]);
    for (std::uint64_t signs = 0; signs < (1ULL << (d - 1)); ++signs) {
      Vec b(d);
      for (std::size_t j = 0; j < d; ++j) b[j] = j == 0 || !((signs >> (j - 1)) & 1) ? 1.0 : -1.0;
      auto v = linalg::solve(a, b, 1e-12);
      if (!v) break;
      bool feasible = true;
      for (std::size_t i = 0; i < m && feasible; ++i) feasible = std::abs(linalg::dot(f[i], *v)) <= 1.0 + 1e-9;
      if (!feasible) continue;
      for (double x : *v) best = std::max(best, std::abs(x));
    }
    // next combination
    std::size_t i = d;
    while (i > 0 && pick[i - 1] == m - d + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best * (1.0 + 1e-12);
}

}  // namespace distdim
