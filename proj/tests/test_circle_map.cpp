#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "automorph/circle_map.hpp"

using namespace automorph;

namespace {

const double kNuCrit = 1.0 / kTwoPi;

std::vector<AnalyticCircleMap> stock_maps() {
  return {
      AnalyticCircleMap::rotation(0.25),
      AnalyticCircleMap::arnold(0.0, kNuCrit),
      AnalyticCircleMap::arnold(0.1, 0.05),
      AnalyticCircleMap::arnold(0.3, kNuCrit),
      AnalyticCircleMap::arnold(0.2, 0.1),
      AnalyticCircleMap(0.4, {0.05, 0.02}, {0.03}),
  };
}

}  // namespace

TEST(LiftEval, RotationTranslates) { EXPECT_DOUBLE_EQ(lift_eval(AnalyticCircleMap::rotation(0.25), 0.5), 0.75); }

TEST(LiftEval, ArnoldAtZero) { EXPECT_DOUBLE_EQ(lift_eval(AnalyticCircleMap::arnold(0.0, kNuCrit), 0.0), 0.0); }

TEST(LiftEval, ArnoldMatchesHighPrecisionFormula) {
  // x + a + nu sin(2 pi x) at x = 0.3 with a = 0.1, nu = 0.05, from mpmath at 50 digits.
  EXPECT_NEAR(lift_eval(AnalyticCircleMap::arnold(0.1, 0.05), 0.3), 0.44755282581475767, 1e-15);
}

TEST(Derivative, ArnoldCriticalValues) {
  const auto f = AnalyticCircleMap::arnold(0.0, kNuCrit);
  EXPECT_NEAR(derivative(f, 0.0, 1), 2.0, 1e-15);
  EXPECT_NEAR(derivative(f, 0.5, 1), 0.0, 1e-15);
  EXPECT_NEAR(derivative(f, 0.5, 3), 4.0 * M_PI * M_PI, 1e-12);
}

TEST(Derivative, RotationIsOne) {
  const auto f = AnalyticCircleMap::rotation(0.3);
  for (double x : {0.0, 0.17, 0.5, 0.93}) EXPECT_DOUBLE_EQ(derivative(f, x, 1), 1.0);
}

TEST(Derivative, RejectsOrderOutsideOneToThree) {
  const auto f = AnalyticCircleMap::rotation(0.3);
  EXPECT_THROW(derivative(f, 0.1, 0), InvalidArgument);
  EXPECT_THROW(derivative(f, 0.1, 4), InvalidArgument);
}

TEST(Derivative, FiniteDifferencesAgreeAwayFromCriticalPoints) {
  const double h = 1e-5;
  for (const auto& f : stock_maps()) {
    for (double x : {0.05, 0.21, 0.33, 0.71, 0.88}) {
      const double fd = (f.lift(x + h) - f.lift(x - h)) / (2 * h);
      const double d = derivative(f, x, 1);
      if (std::abs(d) < 1e-2) continue;
      EXPECT_NEAR(fd, d, 1e-6 * std::abs(d));
      const double fd2 = (f.slope(x + h) - f.slope(x - h)) / (2 * h);
      EXPECT_NEAR(fd2, derivative(f, x, 2), 1e-6 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST(Inverse, RotationAndIdentity) {
  EXPECT_NEAR(inverse(AnalyticCircleMap::rotation(0.25), 0.1), 0.85, 1e-14);
  EXPECT_NEAR(inverse(AnalyticCircleMap::rotation(0.0), 0.7), 0.7, 1e-14);
}

TEST(Inverse, RoundTripThroughCriticalPoint) {
  const auto f = AnalyticCircleMap::arnold(0.3, kNuCrit);
  EXPECT_NEAR(inverse(f, f.eval(0.42)), 0.42, 1e-12);
  // The critical value itself: the slope vanishes, bisection still brackets it.
  EXPECT_NEAR(inverse(f, f.eval(0.5), 1e-15), 0.5, 1e-5);
  EXPECT_LE(circle_distance(f.eval(inverse(f, f.eval(0.5), 1e-15)), f.eval(0.5)), 1e-14);
}

TEST(Inverse, RejectsNonHomeomorphism) {
  EXPECT_THROW(inverse(AnalyticCircleMap::arnold(0.0, 2.0 / kTwoPi), 0.3), NotHomeomorphism);
}

TEST(Iterate, Basics) {
  EXPECT_NEAR(iterate(AnalyticCircleMap::rotation(0.25), 0.0, 4), 0.0, 1e-15);
  const auto f = AnalyticCircleMap::arnold(0.2, 0.1);
  EXPECT_DOUBLE_EQ(iterate(f, 0.37, 0), 0.37);
}

TEST(Iterate, MatchesRepeatedLiftEvaluation) {
  const auto f = AnalyticCircleMap::arnold(0.2, 0.1);
  double x = 0.0;
  for (int k = 0; k < 13; ++k) x = 0.2 + x + 0.1 * std::sin(kTwoPi * x);
  EXPECT_NEAR(iterate(f, 0.0, 13), x - std::floor(x), 1e-13);
}

TEST(Iterate, BackwardUndoesForward) {
  const auto f = AnalyticCircleMap::arnold(0.3, 0.12);
  const double y = iterate(f, 0.61, 25);
  EXPECT_NEAR(iterate(f, y, -25), 0.61, 25 * 1e-13);
}

TEST(CriticalPoints, ArnoldCritical) {
  for (double a : {0.0, 0.3, 0.77}) {
    const auto cps = critical_points(AnalyticCircleMap::arnold(a, kNuCrit));
    ASSERT_EQ(cps.size(), 1u);
    EXPECT_NEAR(cps[0].location, 0.5, 1e-7);
    EXPECT_EQ(cps[0].order, 3);
    EXPECT_FALSE(cps[0].order_is_lower_bound);
  }
}

TEST(CriticalPoints, DiffeomorphismsHaveNone) {
  EXPECT_TRUE(critical_points(AnalyticCircleMap::arnold(0.1, 0.9 / kTwoPi)).empty());
  EXPECT_TRUE(critical_points(AnalyticCircleMap::rotation(0.4)).empty());
}

TEST(CriticalPoints, TwoCriticalPoints) {
  // F' = 1 + cos(4 pi x): zeros at 1/4 and 3/4, both cubic.
  const auto f = AnalyticCircleMap(0.1, {0.0, 1.0 / (2.0 * kTwoPi)}, {});
  const auto cps = critical_points(f);
  ASSERT_EQ(cps.size(), 2u);
  EXPECT_NEAR(cps[0].location, 0.25, 1e-7);
  EXPECT_NEAR(cps[1].location, 0.75, 1e-7);
  EXPECT_EQ(cps[0].order, 3);
}

TEST(CriticalPoints, HigherOrder) {
  // F' = 1 + (4/3) cos 2 pi x + (1/3) cos 4 pi x = (2/3)(1 + cos 2 pi x)^2
  // vanishes to fourth order at 1/2.
  const double c1 = 4.0 / 3.0 / kTwoPi;
  const double c2 = 1.0 / 3.0 / (2.0 * kTwoPi);
  const auto f = AnalyticCircleMap(0.0, {c1, c2}, {});
  EXPECT_NEAR(f.slope(0.5), 0.0, 1e-14);
  const auto cps = critical_points(f);
  ASSERT_EQ(cps.size(), 1u);
  EXPECT_EQ(cps[0].order, 5);
}

TEST(CriticalPoints, RejectsNonHomeomorphism) {
  EXPECT_THROW(critical_points(AnalyticCircleMap::arnold(0.0, 2.0 / kTwoPi)), NotHomeomorphism);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(AnalyticCircleMap::arnold(0.3, kNuCrit)), MapClass::Multicritical);
  EXPECT_EQ(classify(AnalyticCircleMap::arnold(0.3, 0.5 / kTwoPi)), MapClass::Diffeomorphism);
  EXPECT_EQ(classify(AnalyticCircleMap::arnold(0.3, 2.0 / kTwoPi)), MapClass::NotHomeomorphism);
}

TEST(Properties, Equivariance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& f : stock_maps()) {
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      EXPECT_NEAR(f.lift(x + 1.0) - f.lift(x) - 1.0, 0.0, 1e-12);
    }
  }
}

TEST(Properties, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& f : stock_maps()) {
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      // The inverse is accurate to tol in y; in x that is tol / F'(x).
      if (f.slope(x) < 0.1) continue;
      EXPECT_LE(circle_distance(inverse(f, f.lift(x)), x), 10 * kInverseTol);
    }
  }
}

TEST(Properties, Monotone) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& f : stock_maps()) {
    for (int i = 0; i < 200; ++i) {
      double x = u(rng), y = x + u(rng);
      EXPECT_LE(f.lift(x), f.lift(y));
      EXPECT_LE(f.lift(y), f.lift(x + 1.0));
    }
  }
}
