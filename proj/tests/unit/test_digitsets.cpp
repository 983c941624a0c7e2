#include <set>

#include "doctest.h"
#include "support.hpp"

#include "distdim/digitsets.hpp"
#include "distdim/errors.hpp"

using namespace distdim;
using Rule = BlockSchedule::GrowthRule;

namespace {

// Brute-force count of active levels, independent of BlockSchedule.
std::int64_t recount(const std::vector<std::pair<std::int64_t, std::int64_t>>& blocks, std::int64_t N) {
  std::int64_t c = 0;
  for (std::int64_t n = 1; n <= N; ++n)
    for (auto [m, M] : blocks)
      if (m <= n && n <= M) {
        ++c;
        break;
      }
  return c;
}

std::vector<std::pair<std::int64_t, std::int64_t>> pairs(const BlockSchedule& s) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& b : s.blocks()) out.emplace_back(b.m, b.M);
  return out;
}

}  // namespace

TEST_CASE("schedule for rho = 1/2, K = 8 matches the oracle blocks") {
  auto s = schedule_for_density(Rational(1, 2), 8, 3);
  std::vector<std::pair<std::int64_t, std::int64_t>> expected{{4, 6},     {12, 16},   {26, 34},   {52, 68},
                                                              {102, 134}, {200, 264}, {394, 522}, {780, 1036}};
  CHECK(pairs(s) == expected);
  Rational d = density_profile(s, 1036);
  CHECK(abs(d - Rational(1, 2)) <= Rational(1, 20));
  CHECK(Rational(recount(expected, 1036), 1036) == d);
  for (std::size_t k = 0; k < 8; ++k) CHECK(s.blocks()[k].M - s.blocks()[k].m == (std::int64_t{1} << (k + 1)));
}

TEST_CASE("schedule for rho = 1 abuts its blocks") {
  auto s = schedule_for_density(Rational(1), 3, 2);
  for (std::size_t k = 1; k < 3; ++k) CHECK(s.blocks()[k].m == s.blocks()[k - 1].M + 1);
  const std::int64_t M3 = s.blocks().back().M;
  CHECK(density_profile(s, M3) >= 1 - Rational(3, M3));
  CHECK(Rational(recount(pairs(s), M3), M3) == density_profile(s, M3));
}

TEST_CASE("schedule for rho = 0 uses the growing gap rule") {
  auto s = schedule_for_density(Rational(0), 3, 3);
  std::vector<std::pair<std::int64_t, std::int64_t>> expected{{16, 18}, {82, 86}, {278, 286}};
  CHECK(pairs(s) == expected);
  CHECK(density_profile(s, 286) == Rational(17, 286));
  CHECK(density_profile(s, 286) <= Rational(1, 10));
}

TEST_CASE("schedule construction errors") {
  CHECK_THROWS_AS(schedule_for_density(Rational(3, 2), 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(schedule_for_density(Rational(-1, 2), 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(schedule_for_density(Rational(1, 2), 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(schedule_for_density(Rational(1, 2), 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(BlockSchedule({{0, 4}}, Rational(1), 2), std::invalid_argument);
  CHECK_THROWS_AS(BlockSchedule({{1, 4}, {4, 12}}, Rational(1), 2), std::invalid_argument);
  CHECK_THROWS_AS(BlockSchedule({{3, 2}}, Rational(1), 2, Rule::relaxed), std::invalid_argument);
  // [1,2] has length 1 < 2^1: only the relaxed rule admits it
  CHECK_THROWS_AS(BlockSchedule({{1, 2}}, Rational(1), 2), std::invalid_argument);
  CHECK_NOTHROW(BlockSchedule({{1, 2}}, Rational(1), 2, Rule::relaxed));
}

TEST_CASE("property: generated schedules meet the checkpoint bound") {
  testing::Gen gen(21);
  for (int i = 0; i < 200; ++i) {
    Rational rho(BigInt(gen.integer(0, 64)), BigInt(64));
    int K = static_cast<int>(gen.integer(1, 10));
    auto s = schedule_for_density(rho, K, static_cast<unsigned>(gen.integer(2, 5)));
    for (int k = 1; k <= K; ++k) {
      const auto& b = s.blocks()[k - 1];
      CHECK(b.M - b.m == (std::int64_t{1} << k));
      if (k > 1) CHECK(b.m > s.blocks()[k - 2].M);
      CHECK(abs(density_profile(s, b.M) - rho) <= Rational(2, k));
      if (rho > 0) CHECK(density_profile(s, b.M) <= rho);
    }
  }
}

TEST_CASE("density profile examples") {
  CHECK(density_profile(BlockSchedule({{1, 4}}, Rational(1), 2, Rule::relaxed), 4) == 1);
  CHECK(density_profile(BlockSchedule({{3, 4}}, Rational(1), 2, Rule::relaxed), 4) == Rational(1, 2));
  CHECK(density_profile(BlockSchedule({{1, 2}, {5, 8}}, Rational(1), 2, Rule::relaxed), 8) == Rational(3, 4));
  CHECK_THROWS_AS(density_profile(BlockSchedule({{1, 2}}, Rational(1), 2, Rule::relaxed), 0), std::invalid_argument);
}

TEST_CASE("exact covering count examples") {
  DigitFractal f1(BlockSchedule({{1, 2}}, Rational(1), 3, Rule::relaxed), 2, 1);
  CHECK(exact_covering_count(f1, 2) == 9);
  DigitFractal f2(BlockSchedule({{1, 2}}, Rational(1), 3, Rule::relaxed), 2, 2);
  CHECK(exact_covering_count(f2, 2) == 81);
  CHECK(enumerate_points(f2).size() == 81);
  DigitFractal late(BlockSchedule({{5, 6}}, Rational(1), 3, Rule::relaxed), 6, 2);
  CHECK(exact_covering_count(late, 4) == 1);
  CHECK_THROWS_AS(exact_covering_count(late, 0), std::out_of_range);
  CHECK_THROWS_AS(exact_covering_count(late, 7), std::out_of_range);
}

TEST_CASE("enumeration examples") {
  auto one = enumerate_points(DigitFractal(BlockSchedule({{1, 1}}, Rational(1), 2, Rule::relaxed), 1, 1));
  REQUIRE(one.size() == 2);
  CHECK(one.coord(0, 0) == 0);
  CHECK(one.coord(1, 0) == Rational(1, 2));
  auto two = enumerate_points(DigitFractal(BlockSchedule({{2, 2}}, Rational(1), 3, Rule::relaxed), 2, 1));
  REQUIRE(two.size() == 3);
  std::set<Rational> got{two.coord(0, 0), two.coord(1, 0), two.coord(2, 0)};
  CHECK(got == std::set<Rational>{Rational(0), Rational(1, 9), Rational(2, 9)});
  DigitFractal huge(BlockSchedule({{1, 20}}, Rational(1), 3, Rule::relaxed), 20, 2);
  CHECK_THROWS_AS(enumerate_points(huge), CapExceeded);
}

TEST_CASE("sampling is deterministic and valid") {
  DigitFractal f(schedule_for_density(Rational(1, 2), 6, 3), 264, 2);
  auto a = sample_points(f, 1, 99);
  auto b = sample_points(f, 1, 99);
  CHECK(a.point(0) == b.point(0));
  CHECK_FALSE(first_invalid_point(f, a).has_value());
  CHECK_THROWS_AS(sample_points(f, 0, 1), std::invalid_argument);

  DigitFractal g(schedule_for_density(Rational(1, 2), 2, 3), 18, 2);
  auto big = sample_points(g, 100000, 7);
  CHECK_FALSE(first_invalid_point(g, big).has_value());
  auto again = sample_points(g, 100000, 7);
  CHECK(big.small_data() == again.small_data());
  // prefixes are stable: the first points do not depend on n
  auto prefix = sample_points(g, 10, 7);
  for (std::size_t i = 0; i < 10; ++i) CHECK(prefix.point(i) == big.point(i));
}

TEST_CASE("validator rejects digits on inactive levels") {
  DigitFractal f(BlockSchedule({{2, 3}}, Rational(1), 3, Rule::relaxed), 4, 1);
  auto bad = PointCloud::exact(1, {{Rational(1, 3)}});  // digit at level 1
  CHECK(first_invalid_point(f, bad) == std::optional<std::size_t>(0));
  auto fine = PointCloud::exact(1, {{Rational(1, 9) + Rational(2, 27)}});
  CHECK_FALSE(first_invalid_point(f, fine).has_value());
  auto deep = PointCloud::exact(1, {{Rational(1, 243)}});  // finer than depth
  CHECK(first_invalid_point(f, deep).has_value());
}

TEST_CASE("property: covering count is multiplicative, monotone and matches the density") {
  testing::Gen gen(23);
  for (int i = 0; i < 50; ++i) {
    auto s = schedule_for_density(Rational(BigInt(gen.integer(1, 8)), BigInt(8)), static_cast<int>(gen.integer(1, 5)),
                                  static_cast<unsigned>(gen.integer(2, 4)));
    const std::int64_t D = s.blocks().back().M + 2;
    const std::size_t c = static_cast<std::size_t>(gen.integer(2, 4));
    DigitFractal F(s, D, 1), E(s, D, c);
    BigInt prev = 0;
    for (std::int64_t m = 1; m <= D; ++m) {
      BigInt nf = exact_covering_count(F, m), ne = exact_covering_count(E, m);
      CHECK(ne == pow(nf, static_cast<unsigned>(c)));
      CHECK(ne >= prev);
      prev = ne;
    }
    for (auto M : s.checkpoints()) {
      auto e = exact_log(exact_covering_count(E, M), s.base());
      REQUIRE(e);
      CHECK(Rational(*e, M) == Rational(static_cast<long long>(c)) * density_profile(s, M));
    }
  }
}

TEST_CASE("property: enumerated points vanish at inactive levels") {
  DigitFractal f(BlockSchedule({{2, 3}, {6, 7}}, Rational(1), 3, Rule::relaxed), 8, 2);
  auto cloud = enumerate_points(f);
  CHECK(cloud.size() == 6561);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::int64_t m : {1, 4, 5, 8}) CHECK(digit_at(cloud.coord(i, j), m, 3) == 0);
  CHECK(digit_at(Rational(5, 9), 1, 3) == 1);
  CHECK(digit_at(Rational(5, 9), 2, 3) == 2);
}
