#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "distdim/errors.hpp"
#include "distdim/norms.hpp"

using namespace distdim;

namespace {

PolyhedralNorm linf2() { return PolyhedralNorm({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}); }

PolyhedralNorm hexagonal() {
  return PolyhedralNorm({{Rational(4, 6), Rational(0)}, {Rational(2, 6), Rational(3, 6)}, {Rational(-2, 6), Rational(3, 6)}});
}

std::vector<SmoothNorm> smooth_family() {
  return {SmoothNorm::lp(1.5, {1, 1}), SmoothNorm::lp(2, {1, 1}), SmoothNorm::lp(3, {1, 1}),
          SmoothNorm::lp(4, {1, 1}), SmoothNorm::lp(3, {1, 100}), SmoothNorm::lp(2.5, {0.5, 2, 1})};
}

double euclid(const Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("polyhedral eval examples") {
  auto n = linf2();
  CHECK(n.eval(RVec{Rational(3), Rational(-4)}) == 4);
  CHECK(n.eval(RVec{Rational(0), Rational(0)}) == 0);
  PolyhedralNorm rotated({{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(-1, 2)}});
  CHECK(rotated.common_denominator() == 2);
  CHECK(rotated.eval(RVec{Rational(1), Rational(1)}) == 1);
  CHECK(rotated.eval(Vec{1.0, 1.0}) == 1.0);
}

TEST_CASE("polyhedral construction rejects seminorms and ragged input") {
  CHECK_THROWS_AS(PolyhedralNorm({{Rational(1), Rational(1)}, {Rational(2), Rational(2)}}), std::invalid_argument);
  CHECK_THROWS_AS(PolyhedralNorm({{Rational(1), Rational(0)}}), std::invalid_argument);
  CHECK_THROWS_AS(PolyhedralNorm({{Rational(1), Rational(0)}, {Rational(1)}}), std::invalid_argument);
  CHECK_THROWS_AS(PolyhedralNorm({}), std::invalid_argument);
}

TEST_CASE("smooth norm construction validates parameters") {
  CHECK_THROWS_AS(SmoothNorm::lp(1.0, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SmoothNorm::lp(INFINITY, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SmoothNorm::lp(2, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(SmoothNorm::lp(2, {}), std::invalid_argument);
}

TEST_CASE("smooth gradient examples") {
  auto l2 = SmoothNorm::lp(2, {1, 1});
  auto g = l2.gradient(Vec{3, 4});
  CHECK(g[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.8).epsilon(1e-15));
  for (double p : {1.5, 2.0, 3.0, 4.0, 7.0}) {
    auto e = SmoothNorm::lp(p, {1, 1, 1}).gradient(Vec{1, 0, 0});
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 0.0);
  }
  // p = 4 at (1,1): each entry ||x||^(1-p) x_i^(p-1) = 2^(-3/4); the
  // frozen value agrees with a central difference of (x^4 + y^4)^(1/4).
  auto g4 = SmoothNorm::lp(4, {1, 1}).gradient(Vec{1, 1});
  const double expected = std::pow(2.0, -0.75);
  CHECK(g4[0] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(g4[1] == doctest::Approx(expected).epsilon(1e-14));
  const double h = 1e-6;
  const double fd = (std::pow(std::pow(1 + h, 4) + 1, 0.25) - std::pow(std::pow(1 - h, 4) + 1, 0.25)) / (2 * h);
  CHECK(fd == doctest::Approx(expected).epsilon(1e-8));
  CHECK_THROWS_AS(l2.gradient(Vec{0, 0}), std::domain_error);
}

TEST_CASE("duality check examples") {
  auto r2 = duality_check(SmoothNorm::lp(2, {1, 1}), Vec{3, 4}, 1e-9);
  CHECK(r2.pass);
  CHECK(r2.functional[0] == doctest::Approx(3.0));
  CHECK(r2.functional[1] == doctest::Approx(4.0));
  CHECK(r2.pairing_residual < 1e-15);
  CHECK(r2.norm_residual < 1e-15);

  auto r3 = duality_check(SmoothNorm::lp(3, {1, 1}), Vec{1, 2}, 1e-9);
  CHECK(r3.pass);
  // oracle: f = (1, 4) / 9^(1/3)
  CHECK(r3.functional[0] == doctest::Approx(0.4807498567691361).epsilon(1e-13));
  CHECK(r3.functional[1] == doctest::Approx(1.9229994270765445).epsilon(1e-13));

  auto r4 = duality_check(SmoothNorm::lp(4, {1, 1}), Vec{0, 1}, 1e-9);
  CHECK(r4.pass);
  CHECK(r4.functional[0] == 0.0);
  CHECK(r4.functional[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(duality_check(SmoothNorm::lp(4, {1, 1}), Vec{0, 0}, 1e-9), std::domain_error);
}

TEST_CASE("dual norm is the conjugate weighted norm") {
  auto n = SmoothNorm::lp(3, {2, 5});
  testing::Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    Vec f = gen.vec(2, -2, 2);
    // sup over the unit sphere of <f, x>, by dense sampling
    double best = 0;
    for (int k = 0; k < 20000; ++k) {
      double t = 2 * M_PI * k / 20000.0;
      Vec x{std::cos(t), std::sin(t)};
      double nx = n.eval(x);
      best = std::max(best, (f[0] * x[0] + f[1] * x[1]) / nx);
    }
    CHECK(n.dual_eval(f) == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("cone_contains examples") {
  auto n = linf2();
  RVec origin{Rational(0), Rational(0)};
  CHECK(cone_contains(n, origin, 0, RVec{Rational(2), Rational(1)}));
  CHECK_FALSE(cone_contains(n, origin, 0, RVec{Rational(1), Rational(2)}));
  CHECK(cone_contains(n, Vec{0, 0}, 0, Vec{2, 1}));
  CHECK_THROWS_AS(cone_contains(n, origin, 2, origin), std::out_of_range);
}

TEST_CASE("hexagonal cones agree with a brute-force argmax") {
  auto hex = hexagonal();
  testing::Gen gen(5);
  for (int i = 0; i < 500; ++i) {
    RVec x = gen.rvec(2, 30, 7), y = gen.rvec(2, 30, 7);
    RVec w{x[0] - y[0], x[1] - y[1]};
    Rational best = 0;
    for (std::size_t f = 0; f < 3; ++f) best = std::max(best, Rational(abs(hex.inner(f, w))));
    for (std::size_t f = 0; f < 3; ++f) CHECK(cone_contains(hex, x, f, y) == (abs(hex.inner(f, w)) == best));
  }
}

TEST_CASE("cone X membership examples") {
  ConeSpec cone({0, 0}, {{1, 0}}, 0.5);
  CHECK(cone_X_contains(cone, Vec{1, 0.4}));
  CHECK(cone_X_contains(cone, Vec{-3, 0}));
  CHECK_FALSE(cone_X_contains(cone, Vec{0, 2}));
  CHECK_THROWS_AS(cone_X_contains(cone, Vec{0, 0}), std::domain_error);
  CHECK_THROWS_AS(ConeSpec({0, 0}, {{1, 0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConeSpec({0, 0}, {{1, 1}}, 0.5), std::invalid_argument);
  auto spanned = ConeSpec::spanned_by({0, 0, 0}, {{1, 1, 0}, {2, 2, 0}, {0, 0, 3}}, 0.3);
  CHECK(spanned.basis().size() == 2);
}

TEST_CASE("transversality volume examples") {
  NormSpec l2 = SmoothNorm::lp(2, {1, 1});
  CHECK(transversality_volume(l2, Vec{0.5, 0.5}, {{0, 0}, {1, 0}}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(transversality_volume(l2, Vec{3, 0}, {{0, 0}, {1, 0}}) == doctest::Approx(0.0).scale(1.0));
  CHECK(transversality_volume(l2, Vec{0.3, 0.9}, {{0, 0}}) == doctest::Approx(1.0).epsilon(1e-14));
  // l^4, k = 1: the Euclidean length of the gradient
  NormSpec l4 = SmoothNorm::lp(4, {1, 1});
  Vec g = std::get<SmoothNorm>(l4).gradient(Vec{0.3, 0.9});
  CHECK(transversality_volume(l4, Vec{0.3, 0.9}, {{0, 0}}) == doctest::Approx(euclid(g)).epsilon(1e-14));
}

TEST_CASE("transversality volume errors name the pin") {
  NormSpec l2 = SmoothNorm::lp(2, {1, 1});
  try {
    transversality_volume(l2, Vec{1, 0}, {{0, 0}, {1, 0}});
    FAIL("expected GradientUndefined");
  } catch (const GradientUndefined& e) {
    CHECK(e.pin() == 1);
  }
  NormSpec box = linf2();
  try {
    // (1,1) - (0,0) lies on the diagonal where both facets tie
    transversality_volume(box, Vec{1, 1}, {{5, 0}, {0, 0}});
    FAIL("expected GradientUndefined");
  } catch (const GradientUndefined& e) {
    CHECK(e.pin() == 1);
  }
  CHECK(transversality_volume(box, Vec{3, 1}, {{0, 0}, {3, 5}}) == doctest::Approx(1.0));
}

TEST_CASE("polyhedral gradient is the maximizing facet") {
  auto hex = hexagonal();
  auto g = gradient(NormSpec(hex), Vec{1, 0});
  CHECK(g[0] == doctest::Approx(4.0 / 6));
  CHECK(g[1] == 0.0);
  auto gm = gradient(hex, RVec{Rational(-1), Rational(0)});
  CHECK(gm[0] == Rational(-4, 6));
  CHECK_THROWS_AS(gradient(hex, RVec{Rational(0), Rational(0)}), GradientUndefined);
  // duplicated functionals (v and -v listed) do not count as a tie
  PolyhedralNorm twice({{Rational(1), Rational(0)}, {Rational(-1), Rational(0)}, {Rational(0), Rational(1)}});
  CHECK(gradient(NormSpec(twice), Vec{2, 1})[0] == 1.0);
}

TEST_CASE("modulus h examples") {
  auto l2 = SmoothNorm::lp(2, {1, 1});
  CHECK(modulus_h(l2, 0.0) == 0.0);
  const double h1 = modulus_h(l2, 0.1);
  CHECK(h1 >= 0.0);
  CHECK(h1 <= 0.01);
  double prev_ratio = INFINITY;
  for (double eps : {0.1, 0.01, 0.001}) {
    double ratio = modulus_h(l2, eps) / eps;
    CHECK(ratio < prev_ratio);
    prev_ratio = ratio;
  }
  CHECK(prev_ratio < 1e-2);
  CHECK_THROWS_AS(modulus_h(l2, -1.0), std::invalid_argument);
}

TEST_CASE("modulus h is monotone in eps") {
  testing::Gen gen(3);
  for (const auto& n : {SmoothNorm::lp(4, {1, 1}), SmoothNorm::lp(1.5, {1, 2})}) {
    for (int i = 0; i < 20; ++i) {
      double a = gen.uniform(1e-4, 0.5), b = gen.uniform(1e-4, 0.5);
      if (a > b) std::swap(a, b);
      CHECK(modulus_h(n, a, 512) <= modulus_h(n, b, 512));
    }
  }
}

TEST_CASE("direction constant oracle values") {
  CHECK(direction_constant(SmoothNorm::lp(2, {1, 1})) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(direction_constant(SmoothNorm::lp(4, {1, 1})) == doctest::Approx(0.8485281374463268).epsilon(1e-5));
  CHECK(direction_constant(SmoothNorm::lp(1.5, {1, 1})) == doctest::Approx(0.8776554759689812).epsilon(1e-5));
  CHECK(direction_constant(SmoothNorm::lp(3, {1, 100})) == doctest::Approx(0.35032923827824464).epsilon(1e-3));
  double lambda = direction_constant(SmoothNorm::lp(4, {1, 1}));
  CHECK(direction_aperture(SmoothNorm::lp(4, {1, 1})) == doctest::Approx(std::sqrt(1 - lambda * lambda)));
}

TEST_CASE("linf bounds") {
  CHECK(linf_bound(NormSpec(hexagonal())) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(linf_bound(NormSpec(linf2())) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(linf_bound(NormSpec(SmoothNorm::lp(2, {4, 1}))) == doctest::Approx(1.0));
  CHECK(linf_bound(NormSpec(SmoothNorm::lp(2, {0.25, 1}))) == doctest::Approx(2.0));
  CHECK(neighbourhood_constant(4, 0.5) == doctest::Approx(4.0));
  CHECK_THROWS_AS(neighbourhood_constant(2, 0.0), std::invalid_argument);
}

TEST_CASE("property: linf bound dominates on random vectors") {
  testing::Gen gen(17);
  std::vector<NormSpec> norms{hexagonal(), linf2(), SmoothNorm::lp(3, {1, 100})};
  for (const auto& n : norms) {
    double c = linf_bound(n);
    for (int i = 0; i < 1000; ++i) {
      Vec v = gen.vec(2, -5, 5);
      CHECK(std::max(std::abs(v[0]), std::abs(v[1])) <= c * eval(n, v) * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: homogeneity") {
  testing::Gen gen(1);
  auto hex = hexagonal();
  for (int i = 0; i < 1000; ++i) {
    RVec x = gen.rvec(2, 100, 9);
    Rational t(BigInt(gen.integer(-50, 50)), BigInt(gen.integer(1, 20)));
    RVec tx{t * x[0], t * x[1]};
    CHECK(hex.eval(tx) == abs(t) * hex.eval(x));
  }
  for (const auto& n : smooth_family()) {
    for (int i = 0; i < 1000; ++i) {
      Vec x = gen.vec(n.dim(), -3, 3);
      double t = gen.uniform(-10, 10);
      Vec tx = x;
      for (auto& v : tx) v *= t;
      CHECK(n.eval(tx) == doctest::Approx(std::abs(t) * n.eval(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: triangle inequality") {
  testing::Gen gen(2);
  auto hex = hexagonal();
  for (int i = 0; i < 1000; ++i) {
    RVec a = gen.rvec(2, 50, 6), b = gen.rvec(2, 50, 6);
    RVec s{a[0] + b[0], a[1] + b[1]};
    CHECK(hex.eval(s) <= hex.eval(a) + hex.eval(b));
  }
  for (const auto& n : smooth_family()) {
    for (int i = 0; i < 1000; ++i) {
      Vec a = gen.vec(n.dim(), -3, 3), b = gen.vec(n.dim(), -3, 3), s(n.dim());
      for (std::size_t j = 0; j < s.size(); ++j) s[j] = a[j] + b[j];
      CHECK(n.eval(s) <= (n.eval(a) + n.eval(b)) * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: every nonzero vector lies in the cone of its maximizing facet") {
  testing::Gen gen(4);
  auto hex = hexagonal();
  RVec origin{Rational(0), Rational(0)};
  for (int i = 0; i < 1000; ++i) {
    RVec y = gen.rvec(2, 40, 5);
    if (y[0] == 0 && y[1] == 0) continue;
    std::size_t best = 0;
    for (std::size_t f = 1; f < 3; ++f)
      if (abs(hex.inner(f, y)) > abs(hex.inner(best, y))) best = f;
    CHECK(hex.eval(y) > 0);
    CHECK(cone_contains(hex, origin, best, y));
  }
}

TEST_CASE("property: Euler identity and finite differences") {
  testing::Gen gen(6);
  for (const auto& n : smooth_family()) {
    for (int i = 0; i < 1000; ++i) {
      Vec x = gen.on_annulus(n, n.dim(), 0.5, 2.0);
      Vec g = n.gradient(x);
      double pair = 0;
      for (std::size_t j = 0; j < x.size(); ++j) pair += g[j] * x[j];
      CHECK(pair == doctest::Approx(n.eval(x)).epsilon(1e-9));
      for (std::size_t j = 0; j < x.size(); ++j) {
        Vec up = x, down = x;
        up[j] += 1e-6;
        down[j] -= 1e-6;
        CHECK(std::abs((n.eval(up) - n.eval(down)) / 2e-6 - g[j]) <= 1e-5);
      }
    }
  }
}

TEST_CASE("property: transversality volume is invariant along rays (Euclidean)") {
  testing::Gen gen(8);
  NormSpec l2 = SmoothNorm::lp(2, {1, 1, 1});
  for (int i = 0; i < 1000; ++i) {
    Vec x = gen.vec(3, -1, 1);
    std::vector<Vec> pins{gen.vec(3, -3, 3), gen.vec(3, -3, 3)};
    std::vector<Vec> moved = pins;
    for (auto& z : moved) {
      double t = gen.uniform(0.2, 5.0);
      for (std::size_t j = 0; j < 3; ++j) z[j] = x[j] + t * (z[j] - x[j]);
    }
    CHECK(transversality_volume(l2, x, pins) == doctest::Approx(transversality_volume(l2, x, moved)).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("property: z lies in X(0, span grad||z||, eta)") {
  testing::Gen gen(9);
  for (const auto& n : smooth_family()) {
    const double eta = direction_aperture(n);
    for (int i = 0; i < 1000; ++i) {
      Vec z = gen.vec(n.dim(), -5, 5);
      auto cone = ConeSpec::spanned_by(Vec(n.dim(), 0.0), {n.gradient(z)}, eta);
      CHECK(cone_X_contains(cone, z));
    }
  }
}

TEST_CASE("describe is stable") {
  CHECK(describe(NormSpec(hexagonal())) == "polyhedral(d=2, facets=3, q=6)");
  CHECK(describe(NormSpec(SmoothNorm::lp(4, {1, 2}))) == "lp(d=2, p=4, weights=[1,2])");
}
