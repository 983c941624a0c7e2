#include <cmath>
#include <set>

#include "doctest.h"
#include "support.hpp"

#include "distdim/digitsets.hpp"
#include "distdim/errors.hpp"
#include "distdim/projections.hpp"

using namespace distdim;
using Rule = BlockSchedule::GrowthRule;

namespace {

PolyhedralNorm linf2() { return PolyhedralNorm({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}); }

PointCloud grid_cloud(std::size_t side, double lo, double hi) {
  Vec flat;
  flat.reserve(2 * side * side);
  const double h = (hi - lo) / static_cast<double>(side);
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) {
      flat.push_back(lo + (static_cast<double>(i) + 0.5) * h);
      flat.push_back(lo + (static_cast<double>(j) + 0.5) * h);
    }
  return PointCloud::approximate_flat(2, std::move(flat));
}

std::set<RVec> rows(const PointCloud& c) {
  std::set<RVec> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.insert(c.point(i));
  return out;
}

}  // namespace

TEST_CASE("coordinate projection examples") {
  auto c = PointCloud::exact(2, {{Rational(1, 3), Rational(2)}});
  auto p = coordinate_project(c, {0});
  CHECK(p.dim() == 1);
  CHECK(p.coord(0, 0) == Rational(1, 3));
  CHECK(rows(coordinate_project(c, {0, 1})) == rows(c));

  auto sched = BlockSchedule({{1, 1}, {3, 4}}, Rational(1), 3, Rule::relaxed);
  auto E = enumerate_points(DigitFractal(sched, 4, 2));
  auto F = enumerate_points(DigitFractal(sched, 4, 1));
  CHECK(rows(coordinate_project(E, {0}).deduplicated()) == rows(F));
  CHECK(rows(coordinate_project(E, {1}).deduplicated()) == rows(F));
}

TEST_CASE("coordinate projection errors") {
  auto c = PointCloud::exact(3, {{Rational(0), Rational(1), Rational(2)}});
  CHECK_THROWS_AS(coordinate_project(c, {}), std::invalid_argument);
  CHECK_THROWS_AS(coordinate_project(c, {3}), std::out_of_range);
  CHECK_THROWS_AS(coordinate_project(c, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(coordinate_project(c, {2, 0}), std::invalid_argument);
}

TEST_CASE("max-projection inequality examples") {
  auto sched = BlockSchedule({{1, 2}, {5, 8}}, Rational(1), 3, Rule::relaxed);
  auto E = enumerate_points(DigitFractal(sched, 8, 2));
  auto scales = q_adic_scales(3, sched.checkpoints());
  auto r = jarvenpaa_check(E, 1, scales, {}, 0.05, 3, "checkpoint");
  CHECK(r.subsets.size() == 2);
  CHECK(r.pass);
  REQUIRE(r.exact_margin);
  CHECK(*r.exact_margin == 0);
  CHECK(r.subsets[0].estimate.slope == doctest::Approx(r.set_estimate.slope / 2));

  // a horizontal segment: the first coordinate carries everything
  std::vector<RVec> seg;
  for (int i = 0; i < 1024; ++i) seg.push_back({Rational(i, 1024), Rational(0)});
  auto s = jarvenpaa_check(PointCloud::exact(2, seg), 1, q_adic_scales(2, {1, 2, 3, 4, 5, 6, 7, 8}), {}, 0.05, 2);
  CHECK(s.subsets[s.best].indices == std::vector<std::size_t>{0});
  CHECK(s.subsets[0].estimate.slope == doctest::Approx(1.0));
  REQUIRE(s.exact_margin);
  CHECK(*s.exact_margin == Rational(1, 2));

  auto full = jarvenpaa_check(E, 2, scales, {}, 0.05, 3);
  CHECK(full.margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(full.pass);
}

TEST_CASE("max-projection inequality errors") {
  auto c = PointCloud::exact(2, {{Rational(0), Rational(0)}, {Rational(1), Rational(1)}});
  CHECK_THROWS_AS(jarvenpaa_check(c, 0, q_adic_scales(2, {1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(jarvenpaa_check(c, 3, q_adic_scales(2, {1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(jarvenpaa_check(c, 1, q_adic_scales(2, {1})), std::invalid_argument);
}

TEST_CASE("projection identity examples") {
  // V = R^2: the identity holds for any cloud
  testing::Gen gen(59);
  std::vector<RVec> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(gen.rvec(2, 1, 16));
  auto free_cloud = PointCloud::exact(2, pts);
  auto big = Rational(1000);
  auto r = projection_identity_check(free_cloud, linf2(), {0, 1}, {{-big, Rational(0)}, {Rational(0), -big}});
  CHECK(r.pass);
  CHECK(r.pairs_checked == 40u * 39u / 2);

  // points on a line of slope 1/2 inside the cone of z far to the left
  std::vector<RVec> line;
  for (int i = 0; i < 30; ++i) line.push_back({Rational(i, 7), Rational(i, 14)});
  auto cone_cloud = PointCloud::exact(2, line);
  auto ok = projection_identity_check(cone_cloud, linf2(), {0}, {{-big, Rational(0)}});
  CHECK(ok.pass);
  CHECK(ok.cone_condition);

  // a vertical pair breaks the identity
  line.push_back({Rational(0), Rational(1, 3)});
  auto bad = projection_identity_check(PointCloud::exact(2, line), linf2(), {0}, {{-big, Rational(0)}});
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.offending_pair);
  auto [i, j] = *bad.offending_pair;
  CHECK((i == 30 || j == 30));
}

TEST_CASE("projection identity reports cone violations") {
  auto cloud = PointCloud::exact(2, {{Rational(0), Rational(0)}, {Rational(0), Rational(5)}});
  auto r = projection_identity_check(cloud, linf2(), {0}, {{Rational(-1), Rational(0)}});
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.cone_condition);
  CHECK(r.offending_point == std::optional<std::size_t>(1));
}

TEST_CASE("projection family errors") {
  auto e = SmoothNorm::lp(2.0, {1.0, 1.0});
  CHECK_THROWS_AS(ProjectionFamily(e, {{0.0, 0.0}, {0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ProjectionFamily(e, {{0.0, 0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ProjectionFamily(e, {}), std::invalid_argument);
  ProjectionFamily fam(e, {{0.0, 0.0}});
  auto cloud = PointCloud::approximate(2, {{0.0, 0.0}, {1.0, 1.0}});
  CHECK(fam.points_on_pins(cloud) == std::vector<std::size_t>{0});
}

TEST_CASE("fiber cover examples") {
  ProjectionFamily fam(SmoothNorm::lp(2.0, {1.0, 1.0}), {{0.0, 0.0}, {4.0, 0.0}});
  auto cloud = grid_cloud(1000, 0.0, 4.0);
  FiberIndex index(fam, cloud);
  // two transversal circle intersections at (2, +-sqrt(2.5^2 - 4)) = (2, 1.5)
  auto rep = fiber_cover(fam, cloud, {2.5, 2.5}, 0.05, 2.0);
  CHECK(rep.fiber_size > 0);
  CHECK(rep.m >= 1);
  CHECK(rep.m <= 4);
  CHECK(rep.certified);
  CHECK(recheck_cover(fam, cloud, rep));

  auto far = fiber_cover(index, {100.0, 100.0}, 0.05);
  CHECK(far.m == 0);
  CHECK(far.fiber_size == 0);
  CHECK(recheck_cover(fam, cloud, far));

  CHECK_THROWS_AS(fiber_cover(index, {2.5, 2.5}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fiber_cover(index, {2.5}, 0.1), std::invalid_argument);
}

TEST_CASE("fiber index agrees with a linear scan") {
  testing::Gen gen(61);
  ProjectionFamily fam(SmoothNorm::lp(4.0, {1.0, 1.0}), {{-1.0, 0.0}, {0.0, -1.0}});
  auto cloud = grid_cloud(200, 0.0, 1.0);
  FiberIndex index(fam, cloud);
  for (int t = 0; t < 50; ++t) {
    Vec xi = fam.evaluate(gen.vec(2, 0, 1));
    double delta = gen.uniform(0.005, 0.1);
    std::vector<std::size_t> brute;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      Vec p = fam.evaluate(cloud.point_double(i));
      if (std::abs(p[0] - xi[0]) < delta && std::abs(p[1] - xi[1]) < delta) brute.push_back(i);
    }
    CHECK(index.fiber(xi, delta) == brute);
  }
}

TEST_CASE("transversality scan examples") {
  auto cloud = grid_cloud(1000, 0.0, 1.0);
  std::vector<double> deltas{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};

  ProjectionFamily two(SmoothNorm::lp(2.0, {1.0, 1.0}), {{-1.0, 0.0}, {0.0, -1.0}});
  FiberIndex i2(two, cloud);
  auto s2 = weak_transversality_scan(i2, deltas, xi_samples(two, cloud, 60, 3));
  CHECK(s2.exponent <= 0.1);
  CHECK(s2.all_certified);

  ProjectionFamily four(SmoothNorm::lp(4.0, {1.0, 1.0}), {{-1.0, 0.0}, {0.0, -1.0}});
  FiberIndex i4(four, cloud);
  CHECK(weak_transversality_scan(i4, deltas, xi_samples(four, cloud, 60, 3)).exponent <= 0.15);

  ProjectionFamily one(linf2(), {{-1.0, -1.0}});
  FiberIndex i1(one, cloud);
  auto s1 = weak_transversality_scan(i1, deltas, xi_samples(one, cloud, 60, 3));
  CHECK(s1.exponent >= 0.8);
  CHECK(s1.exponent <= 1.2);

  CHECK_THROWS_AS(weak_transversality_scan(i2, {0.1, 0.05}, xi_samples(two, cloud, 5, 1)), std::invalid_argument);
  CHECK_THROWS_AS(weak_transversality_scan(i2, deltas, {{100.0, 100.0}}), std::invalid_argument);
}

TEST_CASE("property: covers are certified and roughly monotone in delta") {
  testing::Gen gen(67);
  auto cloud = grid_cloud(400, 0.0, 1.0);
  ProjectionFamily fam(SmoothNorm::lp(3.0, {1.0, 2.0}), {{-0.5, 0.2}, {0.3, -0.7}});
  FiberIndex index(fam, cloud);
  auto xis = xi_samples(fam, cloud, 40, 9);
  CHECK(xis.size() == 44);  // 40 images + 4 corners
  for (const auto& xi : xis) {
    double delta = gen.uniform(0.01, 0.05);
    auto small = fiber_cover(index, xi, delta);
    auto large = fiber_cover(index, xi, 2 * delta);
    CHECK(recheck_cover(fam, cloud, small));
    CHECK(recheck_cover(fam, cloud, large));
    if (small.fiber_size > 0) CHECK(small.m >= 1);
    CHECK(large.m <= 9 * std::max<std::size_t>(small.m, 1));  // c_d with d = 2
  }
}

TEST_CASE("property: identity holds exactly on clouds built inside the cones") {
  testing::Gen gen(71);
  auto hex = PolyhedralNorm({{Rational(4, 6), Rational(0)}, {Rational(2, 6), Rational(3, 6)}, {Rational(-2, 6), Rational(3, 6)}});
  for (int t = 0; t < 20; ++t) {
    // a short segment in a direction where facet 0 strictly dominates
    RVec base = gen.rvec(2, 1, 8);
    RVec dir{Rational(1), Rational(BigInt(gen.integer(-2, 2)), BigInt(10))};
    std::vector<RVec> pts;
    for (int i = 0; i < 15; ++i) pts.push_back({base[0] + dir[0] * Rational(i, 15), base[1] + dir[1] * Rational(i, 15)});
    RVec pin{base[0] - Rational(1000), base[1] - dir[1] * Rational(1000)};
    auto r = projection_identity_check(PointCloud::exact(2, pts), hex, {0}, {pin});
    CHECK(r.pass);
  }
}
