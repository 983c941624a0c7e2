#pragma once

// Polyhedral and smooth (weighted l^p) norms on R^d, their gradients, duality
// mapping, and the cone families C(x, v) and X(a, V, s).

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "distdim/rational.hpp"

namespace distdim {

/// ||x|| = max_i |<x, v_i>| over a spanning set of rational facet functionals.
class PolyhedralNorm {
 public:
  /// Throws std::invalid_argument when the facets are ragged, fewer than d,
  /// or fail to span R^d (the result would only be a seminorm).
  explicit PolyhedralNorm(std::vector<RVec> facets);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t facet_count() const noexcept { return facets_.size(); }
  const std::vector<RVec>& facets() const noexcept { return facets_; }
  const std::vector<Vec>& facets_double() const noexcept { return facets_d_; }

  /// Least q with q * v_i integral for every facet entry.
  const BigInt& common_denominator() const noexcept { return denominator_; }
  /// Integer numerators p with v_i = p_i / common_denominator().
  const std::vector<std::vector<BigInt>>& facet_numerators() const noexcept { return numerators_; }

  Rational eval(std::span<const Rational> x) const;
  double eval(std::span<const double> x) const;

  Rational inner(std::size_t facet, std::span<const Rational> x) const;
  double inner(std::size_t facet, std::span<const double> x) const;

  /// True when facets a and b define the same functional up to sign.
  bool same_functional(std::size_t a, std::size_t b) const;

 private:
  std::size_t dim_ = 0;
  std::vector<RVec> facets_;
  std::vector<Vec> facets_d_;
  BigInt denominator_ = 1;
  std::vector<std::vector<BigInt>> numerators_;
};

/// Weighted l^p norm (sum_i w_i |x_i|^p)^(1/p), 1 < p < infinity.
class SmoothNorm {
 public:
  static SmoothNorm lp(double p, Vec weights);

  std::size_t dim() const noexcept { return weights_.size(); }
  double exponent() const noexcept { return p_; }
  const Vec& weights() const noexcept { return weights_; }

  double eval(std::span<const double> x) const;
  /// Closed-form gradient; throws std::domain_error at the origin.
  Vec gradient(std::span<const double> x) const;
  /// The conjugate norm: weighted l^{p'} with weights w_i^{1-p'}.
  double dual_eval(std::span<const double> f) const;

 private:
  SmoothNorm(double p, Vec weights) : p_(p), weights_(std::move(weights)) {}
  double p_;
  Vec weights_;
};

using NormSpec = std::variant<PolyhedralNorm, SmoothNorm>;

std::size_t dimension(const NormSpec& norm);
double eval(const NormSpec& norm, std::span<const double> x);
std::string describe(const NormSpec& norm);

/// Gradient of the norm at x. Polyhedral norms are differentiable only in
/// cone interiors, where the gradient is sign(<x, v_i>) v_i for the unique
/// maximizing functional; ties throw GradientUndefined.
Vec gradient(const NormSpec& norm, std::span<const double> x);
RVec gradient(const PolyhedralNorm& norm, std::span<const Rational> x);

struct DualityReport {
  bool pass = false;
  Vec functional;               // f = ||x|| grad ||x||
  double pairing_residual = 0;  // |<f,x> - ||f||_dual ||x||| / ||x||^2
  double norm_residual = 0;     // | ||f||_dual - ||x|| | / ||x||
};

/// Checks that f = ||x|| grad||x|| is a norming functional of x, i.e. that
/// it lies in the duality mapping J x.
DualityReport duality_check(const SmoothNorm& norm, std::span<const double> x, double tol);

/// Membership of y in C(x, v_i) = { y : ||x - y|| = |<x - y, v_i>| }.
/// Facet index is 0-based. Exact for rational input.
bool cone_contains(const PolyhedralNorm& norm, std::span<const Rational> apex, std::size_t facet,
                   std::span<const Rational> y);
bool cone_contains(const PolyhedralNorm& norm, std::span<const double> apex, std::size_t facet,
                   std::span<const double> y);

/// X(a, V, s) = { x : ||P_{V^perp}(x - a)|| < s ||x - a|| } with Euclidean norms.
class ConeSpec {
 public:
  /// basis must be orthonormal to 1e-12 and 0 < aperture < 1.
  ConeSpec(Vec apex, std::vector<Vec> basis, double aperture);
  /// Orthonormalizes the spanning vectors first (Gram-Schmidt).
  static ConeSpec spanned_by(Vec apex, const std::vector<Vec>& vectors, double aperture);

  const Vec& apex() const noexcept { return apex_; }
  const std::vector<Vec>& basis() const noexcept { return basis_; }
  double aperture() const noexcept { return aperture_; }

 private:
  Vec apex_;
  std::vector<Vec> basis_;
  double aperture_;
};

/// Throws std::domain_error when x equals the apex.
bool cone_X_contains(const ConeSpec& cone, std::span<const double> x);

/// |(grad p_{z_1}(x) | ... | grad p_{z_k}(x))| with p_z(x) = ||x - z||, as
/// sqrt of the Gram determinant. GradientUndefined names the offending pin.
double transversality_volume(const NormSpec& norm, std::span<const double> x, const std::vector<Vec>& pins);

/// Lambda: 0.9 times the smallest cosine between z and grad||z|| over a dense
/// deterministic sphere sample.
double direction_constant(const SmoothNorm& norm);
/// eta = sqrt(1 - Lambda^2); z lies in X(0, span grad||z||, eta).
double direction_aperture(const SmoothNorm& norm);

/// Empirical modulus h(eps): sup of |<grad||x||, x-y>| - | ||x|| - ||y|| |
/// over ||x - y|| < eps, sampled on the annulus 1/2 <= ||x|| <= 2 with a
/// Halton sequence. eps is quantized down to a dyadic 2^-n and the value is a
/// running max over all finer dyadic levels, so h is monotone in eps.
double modulus_h(const SmoothNorm& norm, double eps, std::size_t budget = 4096);

/// C(L) = sqrt(k) / L, the inverse-Gram operator bound used for fiber
/// neighbourhoods.
double neighbourhood_constant(std::size_t k, double volume_bound);

/// c with ||v||_inf <= c ||v|| for all v.
double linf_bound(const NormSpec& norm);

/// Deterministic near-uniform unit vectors in R^d.
std::vector<Vec> sphere_sample(std::size_t dim, std::size_t count);

}  // namespace distdim
