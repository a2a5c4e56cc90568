#include "reachdec/error.hpp"
#include "reachdec/sets.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace reachdec;
using namespace testing_support;

namespace {

Vector v2(double a, double b) { return Vector2(a, b); }

HPolygon unit_square() {
  return HPolygon({{Vector2(1, 0), 1}, {Vector2(0, 1), 1}, {Vector2(-1, 0), 1}, {Vector2(0, -1), 1}});
}

LazySet unit_box(int n) { return Hyperrectangle(Vector::Zero(n), Vector::Ones(n)); }

}  // namespace

TEST(Support, BoxClosedForm) { EXPECT_DOUBLE_EQ(support_function(unit_box(2), v2(1, 1)), 2.0); }

TEST(Support, MinkowskiSumOfBoxes) {
  EXPECT_DOUBLE_EQ(support_function(minkowski_sum(unit_box(2), unit_box(2)), v2(1, 0)), 2.0);
}

TEST(Support, RotatedSegment) {
  Matrix rot(2, 2);
  rot << 0, -1, 1, 0;
  const LazySet segment = Hyperrectangle(v2(0, 0), v2(1, 0));
  EXPECT_NEAR(support_function(linear_map(rot, segment), v2(0, 1)), 1.0, 1e-15);
}

TEST(Support, BallNorms) {
  const Vector l = v2(3, -4);
  EXPECT_DOUBLE_EQ(support_function(BallP(Vector::Zero(2), 1.0, Norm::Inf), l), 7.0);
  EXPECT_DOUBLE_EQ(support_function(BallP(Vector::Zero(2), 1.0, Norm::Two), l), 5.0);
  EXPECT_DOUBLE_EQ(support_function(BallP(Vector::Zero(2), 1.0, Norm::One), l), 4.0);
}

TEST(Support, DimensionMismatchNamesNode) {
  try {
    minkowski_sum(unit_box(2), unit_box(3));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.module(), "sets");
    EXPECT_EQ(e.kind(), "dimension");
  }
  EXPECT_THROW(support_function(unit_box(2), Vector::Ones(3)), Error);
}

TEST(SupportVector, BoxFace) {
  const Vector x = support_vector(unit_box(2), v2(1, 0));
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_LE(std::abs(x[1]), 1.0);
}

TEST(SupportVector, Singleton) {
  const Vector p = v2(3, -2);
  EXPECT_EQ(support_vector(Singleton(p), v2(0.3, 7)), p);
}

TEST(SupportVector, CartesianProduct) {
  const LazySet x = cartesian_product({Hyperrectangle(Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)),
                                       Hyperrectangle(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0))});
  EXPECT_EQ(support_vector(x, v2(1, 1)), v2(1, 2));
}

TEST(SupportVector, MatchesSupportFunctionOnAllKinds) {
  std::mt19937_64 rng(11);
  Matrix m = random_matrix(rng, 2, 2);
  const std::vector<LazySet> sets = {
      random_box(rng, 2),
      BallP(v2(0.5, -1), 2.0, Norm::Two),
      BallP(v2(0.5, -1), 2.0, Norm::One),
      BallP(v2(0.5, -1), 2.0, Norm::Inf),
      HPolygon(random_polygon_constraints(rng, 9)),
      Singleton(v2(1, 2)),
      linear_map(m, random_box(rng, 2)),
      minkowski_sum(random_box(rng, 2), HPolygon(random_polygon_constraints(rng, 5))),
      convex_hull(random_box(rng, 2), BallP(v2(3, 3), 1.0, Norm::Two)),
      cartesian_product({random_box(rng, 1), random_box(rng, 1)}),
  };
  for (const auto& x : sets) {
    for (int t = 0; t < 200; ++t) {
      const Vector l = random_vector(rng, 2);
      const double rho = support_function(x, l);
      EXPECT_NEAR(l.dot(support_vector(x, l)), rho, 1e-9 * (1.0 + std::abs(rho))) << x.describe();
    }
  }
}

TEST(Polygon, SquareVertices) {
  const HPolygon sq = unit_square();
  EXPECT_DOUBLE_EQ(polygon_support_vector(sq, Vector2(1, 0)).x(), 1.0);
  EXPECT_EQ(polygon_support_vector(sq, Vector2(1, 1)), Vector2(1, 1));
}

TEST(Polygon, TwelveGonMatchesVertexEnumeration) {
  std::mt19937_64 rng(12);
  const auto cs = random_polygon_constraints(rng, 12);
  const HPolygon p(cs);
  for (int t = 0; t < 100; ++t) {
    const Vector2 l = random_vector(rng, 2);
    EXPECT_NEAR(l.dot(polygon_support_vector(p, l)), vertex_enumeration_max(cs, l), 1e-9);
  }
}

TEST(Polygon, RejectsInfeasibleAndUnbounded) {
  EXPECT_THROW(HPolygon({{Vector2(1, 0), -1}, {Vector2(-1, 0), -1}, {Vector2(0, 1), 1}, {Vector2(0, -1), 1}}),
               Error);
  EXPECT_THROW(HPolygon({{Vector2(1, 0), 1}, {Vector2(0, 1), 1}}), Error);
}

TEST(Polygon, AngularOrderIsCounterClockwise) {
  std::mt19937_64 rng(13);
  const HPolygon p(random_polygon_constraints(rng, 20));
  const auto& cs = p.constraints();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Vector2& a = cs[i].normal;
    const Vector2& b = cs[(i + 1) % cs.size()].normal;
    EXPECT_GT(a.x() * b.y() - a.y() * b.x(), 0.0);
  }
}

TEST(IntervalHull, Examples) {
  const Hyperrectangle a = symmetric_interval_hull(Hyperrectangle(v2(1, 0), v2(1, 1)));
  EXPECT_EQ(a.center(), v2(0, 0));
  EXPECT_EQ(a.radius(), v2(2, 1));
  EXPECT_EQ(symmetric_interval_hull(Singleton(v2(-3, 2))).radius(), v2(3, 2));
  EXPECT_EQ(symmetric_interval_hull(minkowski_sum(unit_box(2), Singleton(v2(1, 1)))).radius(), v2(2, 2));
}

TEST(IntervalHull, ContainsSet) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 50; ++t) {
    const LazySet x = linear_map(random_matrix(rng, 3, 3), random_box(rng, 3));
    const LazySet h = symmetric_interval_hull(x);
    for (int i = 0; i < 3; ++i) {
      Vector e = Vector::Zero(3);
      e[i] = 1.0;
      EXPECT_LE(support_function(x, e), support_function(h, e) + 1e-12);
      EXPECT_LE(support_function(x, -e), support_function(h, -e) + 1e-12);
    }
  }
}

TEST(Contains, ConcreteSetsAndProducts) {
  EXPECT_TRUE(contains(unit_box(2), v2(1, -1)));
  EXPECT_FALSE(contains(unit_box(2), v2(1.01, 0)));
  EXPECT_TRUE(contains(unit_box(2), v2(1.01, 0), 0.02));
  EXPECT_TRUE(contains(unit_square(), v2(0.5, 0.5)));
  EXPECT_TRUE(contains(BallP(v2(0, 0), 1.0, Norm::Two), v2(0.6, 0.8)));
  EXPECT_FALSE(contains(BallP(v2(0, 0), 1.0, Norm::One), v2(0.6, 0.8)));
  EXPECT_TRUE(contains(cartesian_product({unit_box(2), unit_square()}), Vector::Constant(4, 0.9)));
}

TEST(Contains, SupportsCheckOnLazySet) {
  const LazySet x = minkowski_sum(unit_box(2), unit_box(2));
  EXPECT_TRUE(satisfies_supports(x, v2(2, 2), Matrix(2, 0), 0.0));
  EXPECT_FALSE(satisfies_supports(x, v2(2.1, 0), Matrix(2, 0), 0.0));
}
