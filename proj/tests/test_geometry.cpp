#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <stab/geometry.hpp>

using namespace stab;

TEST(Wrap, ReducesToUnitInterval) {
  EXPECT_EQ(wrap(1.0), 0.0);
  EXPECT_EQ(wrap(-0.25), 0.75);
  EXPECT_EQ(wrap(2.5), 0.5);
  EXPECT_GE(wrap(-1e-20), 0.0);
  EXPECT_LT(wrap(-1e-20), 1.0);
  EXPECT_THROW(wrap(std::nan("")), std::domain_error);
  EXPECT_THROW(wrap(INFINITY), std::domain_error);
}

TEST(Wrap, SignedDifferenceIsShortest) {
  EXPECT_NEAR(wdiff(0.05, 0.95), 0.1, 1e-15);
  EXPECT_NEAR(wdiff(0.95, 0.05), -0.1, 1e-15);
  EXPECT_NEAR(wdiff(0.3, 0.1), 0.2, 1e-15);
}

TEST(Distance, CircleUsesShorterArc) {
  const auto C = PhaseSpace::circle();
  EXPECT_NEAR(distance(C, {0.05}, {0.95}), 0.1, 1e-15);
  EXPECT_NEAR(distance(C, {0.0}, {0.5}), 0.5, 1e-15);
}

TEST(Distance, TorusIsFlatEuclidean) {
  const auto T = PhaseSpace::torus();
  EXPECT_NEAR(distance(T, {0.0, 0.0}, {0.9, 0.9}), std::sqrt(0.02), 1e-15);
  EXPECT_NEAR(distance(T, {0.1, 0.2}, {0.4, 0.6}), 0.5, 1e-15);
}

TEST(Distance, ProductTakesMaxOfFactors) {
  const auto P = PhaseSpace::product();
  EXPECT_NEAR(distance(P, {0.0, 0.0, 0.0}, {0.1, 0.5, 0.0}), 0.5, 1e-15);
  EXPECT_NEAR(distance(P, {0.0, 0.0, 0.0}, {0.3, 0.0, 0.1}), 0.3, 1e-15);
}

TEST(Distance, SpaceMismatchThrows) {
  EXPECT_THROW(distance(PhaseSpace::torus(), {0.1}, {0.2, 0.3}), std::invalid_argument);
  EXPECT_THROW(check_space(PhaseSpace::circle(), {0.1, 0.2}), std::invalid_argument);
}

TEST(Distance, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 rng(5);
  for (auto s : {PhaseSpace::circle(), PhaseSpace::torus(), PhaseSpace::product()}) {
    auto pts = sample(s, RandomUniform{300, 9});
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
      const Point &x = pts[i], &y = pts[i + 1], &z = pts[i + 2];
      EXPECT_EQ(distance(s, x, x), 0.0);
      EXPECT_NEAR(distance(s, x, y), distance(s, y, x), 1e-16);
      EXPECT_LE(distance(s, x, z), distance(s, x, y) + distance(s, y, z) + 1e-15);
      EXPECT_LE(distance(s, x, y), diameter_bound(s) + 1e-15);
    }
  }
}

TEST(Samplers, GridCoversLatticeInOrder) {
  auto g = sample(PhaseSpace::torus(), UniformGrid{4});
  ASSERT_EQ(g.size(), 16u);
  EXPECT_EQ(g[0], (Point{0.0, 0.0}));
  EXPECT_EQ(g[1], (Point{0.0, 0.25}));
  EXPECT_EQ(g[15], (Point{0.75, 0.75}));
  EXPECT_EQ(sample(PhaseSpace::product(), UniformGrid{3}).size(), 27u);
}

TEST(Samplers, RandomMatchesPortableRecipe) {
  auto pts = sample(PhaseSpace::torus(), RandomUniform{50, 77});
  std::mt19937_64 rng(77);
  for (const auto& p : pts)
    for (int i = 0; i < 2; ++i) {
      const double expect = static_cast<double>(rng() >> 11) / 9007199254740992.0;
      EXPECT_EQ(p[i], expect);
      EXPECT_GE(p[i], 0.0);
      EXPECT_LT(p[i], 1.0);
    }
  EXPECT_EQ(sample(PhaseSpace::torus(), RandomUniform{50, 77}), pts);
}

TEST(Samplers, ParseAndDescribe) {
  auto s = parse_sampler("grid:32");
  EXPECT_EQ(std::get<UniformGrid>(s).resolution, 32);
  auto r = parse_sampler("random:100:5");
  EXPECT_EQ(std::get<RandomUniform>(r).count, 100u);
  EXPECT_EQ(std::get<RandomUniform>(r).seed, 5u);
  EXPECT_EQ(describe(r), "random:100:5");
  EXPECT_THROW(parse_sampler("lattice:3"), std::invalid_argument);
  EXPECT_THROW(parse_sampler("grid"), std::invalid_argument);
  EXPECT_THROW(sample(PhaseSpace::circle(), UniformGrid{0}), std::invalid_argument);
}

TEST(Points, MakePointWrapsAndChecksDimension) {
  auto p = make_point(PhaseSpace::torus(), {1.25, -0.5});
  EXPECT_EQ(p, (Point{0.25, 0.5}));
  EXPECT_THROW(make_point(PhaseSpace::torus(), {0.1}), std::invalid_argument);
  EXPECT_THROW((Point{0.1, 0.2, 0.3, 0.4}), std::invalid_argument);
}
