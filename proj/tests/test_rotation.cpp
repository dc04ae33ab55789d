#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "automorph/rotation.hpp"

using namespace automorph;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const double kSilver = std::sqrt(2.0) - 1.0;
const double kNuCrit = 1.0 / kTwoPi;
// Critical Arnold map with golden rotation number.
const double kGoldenCriticalA = 0.60666106347021809;

// Sign of F^q - id - p on a fine grid; nullopt when the grid is inconclusive.
std::optional<Comparison> dense_oracle(const AnalyticCircleMap& f, std::int64_t p, std::int64_t q) {
  constexpr int n = 50'000;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < n; ++i) {
    double x = static_cast<double>(i) / n;
    const double x0 = x;
    for (std::int64_t k = 0; k < q; ++k) x = f.lift(x);
    const double g = x - x0 - static_cast<double>(p);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  if (lo > 1e-6) return Comparison::Above;
  if (hi < -1e-6) return Comparison::Below;
  if (lo < -1e-6 && hi > 1e-6) return Comparison::Equal;
  return std::nullopt;
}

bool nested(const DynamicalPartition& fine, const DynamicalPartition& coarse) {
  const double slack = 1e-12;
  for (const auto& I : fine.intervals) {
    bool found = false;
    for (const auto& J : coarse.intervals) {
      for (double shift : {-1.0, 0.0, 1.0}) {
        if (I.left + shift >= J.left - slack && I.right() + shift <= J.right() + slack) found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST(Compare, RotationExamples) {
  EXPECT_EQ(compare_to_rational(AnalyticCircleMap::rotation(0.3), 1, 3), Comparison::Below);
  EXPECT_EQ(compare_to_rational(AnalyticCircleMap::rotation(0.3), 1, 4), Comparison::Above);
  EXPECT_EQ(compare_to_rational(AnalyticCircleMap::rotation(0.25), 1, 4), Comparison::Equal);
}

TEST(Compare, FixedPointIsEqual) {
  EXPECT_EQ(compare_to_rational(AnalyticCircleMap::arnold(0.0, kNuCrit), 0, 1), Comparison::Equal);
}

TEST(Compare, AgreesWithDenseGrid) {
  int checked = 0;
  for (double a : {0.05, 0.2, 0.25, 0.33, 0.48, 0.61, 0.7}) {
    for (double nu : {0.08, kNuCrit}) {
      const auto f = AnalyticCircleMap::arnold(a, nu);
      for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 1}, {1, 4}, {1, 3}, {2, 5}, {1, 2}, {3, 5}, {2, 3}}) {
        const auto expected = dense_oracle(f, p, q);
        if (!expected) continue;
        EXPECT_EQ(compare_to_rational(f, p, q), *expected) << a << " " << nu << " " << p << "/" << q;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 80);
}

TEST(Compare, RejectsBadArguments) {
  EXPECT_THROW(compare_to_rational(AnalyticCircleMap::rotation(0.3), 1, 0), InvalidArgument);
  EXPECT_THROW(compare_to_rational(AnalyticCircleMap::arnold(0.0, 2.0 / kTwoPi), 1, 2), NotHomeomorphism);
}

TEST(RotationNumber, GoldenRotation) {
  const auto rho = rotation_number(AnalyticCircleMap::rotation(kGolden));
  EXPECT_TRUE(rho.certified);
  EXPECT_FALSE(rho.rational);
  EXPECT_NEAR(rho.value, kGolden, 1e-10);
  EXPECT_LE(rho.error, 1e-10);
  EXPECT_LE(rho.lower.value(), kGolden);
  EXPECT_GE(rho.upper.value(), kGolden);
  const auto golden = convergents(ContinuedFraction::golden(), rho.ladder.back().q);
  ASSERT_GE(rho.ladder.size(), 20u);
  for (std::size_t i = 0; i < rho.ladder.size(); ++i) EXPECT_EQ(rho.ladder[i], golden[i]) << i;
}

TEST(RotationNumber, SilverRotationAtTightTolerance) {
  const auto rho = rotation_number(AnalyticCircleMap::rotation(kSilver), 1e-14, 100'000'000);
  EXPECT_NEAR(rho.value, kSilver, 1e-14);
  for (std::size_t i = 1; i < 10; ++i) EXPECT_EQ(rho.ladder[i].q, convergents(ContinuedFraction::silver())[i].q);
}

TEST(RotationNumber, RationalCases) {
  const auto r1 = rotation_number(AnalyticCircleMap::rotation(0.25));
  EXPECT_TRUE(r1.rational);
  EXPECT_EQ(r1.lower, (Convergent{1, 4}));
  const auto r2 = rotation_number(AnalyticCircleMap::arnold(0.0, kNuCrit));
  EXPECT_TRUE(r2.rational);
  EXPECT_DOUBLE_EQ(r2.value, 0.0);
  // Inside the 1/2 tongue: a period-2 orbit exists, the orbit of 0 is not periodic.
  const auto r3 = rotation_number(AnalyticCircleMap::arnold(0.5, 0.1));
  EXPECT_TRUE(r3.rational);
  EXPECT_EQ(r3.lower, (Convergent{1, 2}));
  EXPECT_EQ(r3.error, 0.0);
}

TEST(RotationNumber, IntegerPartIsKept) {
  const auto rho = rotation_number(AnalyticCircleMap::rotation(2.0 + kGolden));
  EXPECT_NEAR(rho.value, 2.0 + kGolden, 1e-10);
}

TEST(RotationNumber, BudgetFallbackIsUncertified) {
  const auto rho = rotation_number(AnalyticCircleMap::rotation(kGolden), 1e-14, 1000);
  EXPECT_FALSE(rho.certified);
  EXPECT_NEAR(rho.error, 1e-3, 1e-12);
  EXPECT_NEAR(rho.value, kGolden, 2e-3);
}

TEST(RotationNumber, CriticalGoldenLadderAlternates) {
  const auto f = AnalyticCircleMap::arnold(kGoldenCriticalA, kNuCrit);
  const auto rho = rotation_number(f, 1e-12, 100'000'000);
  ASSERT_TRUE(rho.certified);
  ASSERT_GE(rho.ladder.size(), 12u);
  for (std::size_t n = 0; n < 12; ++n) {
    EXPECT_EQ(compare_to_rational(f, rho.ladder[n].p, rho.ladder[n].q),
              n % 2 == 0 ? Comparison::Above : Comparison::Below)
        << n;
  }
}

TEST(RotationNumber, MonotoneInOffset) {
  double prev = -1.0;
  for (double a = 0.0; a <= 1.0; a += 0.05) {
    const auto rho = rotation_number(AnalyticCircleMap::arnold(a, 0.1), 1e-8, 10'000'000);
    EXPECT_GE(rho.value + rho.error, prev);
    prev = rho.value - rho.error;
  }
}

TEST(RotationNumber, ToDepthStopsShortOfFloatingPointTongues) {
  const auto f = AnalyticCircleMap::arnold(kGoldenCriticalA, kNuCrit);
  const auto rho = rotation_to_depth(f, 16);
  EXPECT_TRUE(rho.certified);
  EXPECT_FALSE(rho.rational);
  EXPECT_GE(rho.ladder.size(), 16u);
  EXPECT_EQ(rho.ladder[15], (Convergent{610, 987}));
}

TEST(CommonQuotients, OpenIntervalAroundGolden) {
  const auto ks = common_quotients({8, 13}, {13, 21});
  ASSERT_GE(ks.size(), 6u);
  for (std::size_t i = 1; i < 6; ++i) EXPECT_EQ(ks[i], 1) << i;
}

TEST(ClosestReturns, GoldenRotationIsFibonacci) {
  EXPECT_EQ(closest_return_times(AnalyticCircleMap::rotation(kGolden), 8),
            (std::vector<std::int64_t>{1, 2, 3, 5, 8, 13, 21, 34}));
}

TEST(ClosestReturns, SilverRotation) {
  EXPECT_EQ(closest_return_times(AnalyticCircleMap::rotation(kSilver), 5),
            (std::vector<std::int64_t>{1, 2, 5, 12, 29}));
}

TEST(ClosestReturns, CriticalGoldenMap) {
  EXPECT_EQ(closest_return_times(AnalyticCircleMap::arnold(kGoldenCriticalA, kNuCrit), 10),
            (std::vector<std::int64_t>{1, 2, 3, 5, 8, 13, 21, 34, 55, 89}));
}

TEST(ClosestReturns, RoundingFloorRaisesAccuracyFault) {
  EXPECT_THROW(closest_return_times(AnalyticCircleMap::rotation(kGolden), 45, false), AccuracyFault);
}

TEST(ClosestReturns, RationalRejected) {
  EXPECT_THROW(closest_return_times(AnalyticCircleMap::rotation(0.25), 3), InvalidArgument);
}

TEST(Partition, GoldenLevelTwoHasFiveIntervals) {
  const auto P = build_partition(AnalyticCircleMap::rotation(kGolden), 2);
  EXPECT_EQ(P.intervals.size(), 5u);
  EXPECT_EQ(P.qn(), 2);
  EXPECT_EQ(P.qn1(), 3);
  EXPECT_NEAR(P.total_length(), 1.0, 1e-12);
}

TEST(Partition, GoldenLevelFourMatchesSortedOrbit) {
  // The gaps between the sorted points k * alpha mod 1, k < q_n + q_{n+1},
  // are exactly the partition lengths.
  const auto P = build_partition(AnalyticCircleMap::rotation(kGolden), 4);
  ASSERT_EQ(P.intervals.size(), 13u);
  std::vector<double> pts;
  for (int k = 0; k < 13; ++k) {
    const double x = k * kGolden;
    pts.push_back(x - std::floor(x));
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> gaps;
  for (std::size_t i = 0; i < pts.size(); ++i) gaps.push_back((i + 1 < pts.size() ? pts[i + 1] : 1.0 + pts[0]) - pts[i]);
  for (std::size_t i = 0; i < 13; ++i) {
    EXPECT_NEAR(P.intervals[i].left, pts[i], 1e-12);
    EXPECT_NEAR(P.intervals[i].length, gaps[i], 1e-12);
  }
}

TEST(Partition, CriticalMapSumsToOneAndRefines) {
  const auto f = AnalyticCircleMap::arnold(kGoldenCriticalA, kNuCrit);
  const auto rho = rotation_number(f, 1e-14, 100'000'000);
  DynamicalPartition prev = build_partition(f, 1, rho);
  for (int n = 2; n <= 10; ++n) {
    const auto P = build_partition(f, n, rho);
    EXPECT_EQ(P.intervals.size(), static_cast<std::size_t>(P.qn() + P.qn1()));
    EXPECT_NEAR(P.total_length(), 1.0, 1e-12);
    EXPECT_TRUE(nested(P, prev)) << n;
    prev = P;
  }
}

TEST(Partition, LevelBeyondLadderRejected) {
  const auto f = AnalyticCircleMap::rotation(kGolden);
  const auto rho = rotation_number(f, 1e-4, 1'000'000);
  EXPECT_THROW(build_partition(f, static_cast<int>(rho.ladder.size()), rho), InvalidArgument);
  EXPECT_THROW(build_partition(AnalyticCircleMap::rotation(0.25), 1), InvalidArgument);
}

TEST(RealBounds, GoldenRotationRatioIsGoldenMean) {
  for (int n : {2, 5, 9}) {
    EXPECT_NEAR(real_bounds_ratio(build_partition(AnalyticCircleMap::rotation(kGolden), n)), 1.0 / kGolden, 1e-8);
  }
}

TEST(ReturnDerivative, RotationIsOne) {
  const auto f = AnalyticCircleMap::rotation(kGolden);
  const auto rho = rotation_number(f);
  EXPECT_DOUBLE_EQ(max_return_derivative(f, 6, rho), 1.0);
  EXPECT_DOUBLE_EQ(max_return_derivative(f, std::int64_t{13}, 64), 1.0);
}

TEST(ReturnDerivative, CriticalMapStaysBounded) {
  const auto f = AnalyticCircleMap::arnold(kGoldenCriticalA, kNuCrit);
  const auto rho = rotation_number(f, 1e-12, 100'000'000);
  for (int n = 4; n <= 8; ++n) {
    const double d = max_return_derivative(f, n, rho, 1024);
    EXPECT_GT(d, 1.0);
    EXPECT_LT(d, 10.0);
  }
}
