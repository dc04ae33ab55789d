#include <cmath>

#include <gtest/gtest.h>

#include "automorph/continued_fraction.hpp"

using namespace automorph;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const double kSilver = std::sqrt(2.0) - 1.0;
}  // namespace

TEST(Expand, GoldenMean) {
  const auto cf = cf_expand(kGolden, 6);
  EXPECT_EQ(cf.quotients(), (std::vector<std::int64_t>{0, 1, 1, 1, 1, 1}));
  EXPECT_FALSE(cf.terminated());
}

TEST(Expand, HalfTerminates) {
  const auto cf = cf_expand(0.5, 10);
  EXPECT_EQ(cf.quotients(), (std::vector<std::int64_t>{0, 2}));
  EXPECT_TRUE(cf.terminated());
}

TEST(Expand, RationalsStayCanonical) {
  const auto cf = cf_expand(5.0 / 12.0, 10);
  EXPECT_EQ(cf.quotients(), (std::vector<std::int64_t>{0, 2, 2, 2}));
  EXPECT_TRUE(cf.terminated());
  EXPECT_EQ(cf_expand(0.3, 10).quotients(), (std::vector<std::int64_t>{0, 3, 3}));
}

TEST(Expand, SilverMean) {
  const auto cf = cf_expand(kSilver, 8);
  EXPECT_EQ(cf.quotients(), (std::vector<std::int64_t>{0, 2, 2, 2, 2, 2, 2, 2}));
}

TEST(Expand, IntegerPart) {
  EXPECT_EQ(cf_expand(3.25, 5).quotients(), (std::vector<std::int64_t>{3, 4}));
  EXPECT_THROW(cf_expand(-0.75, 5), InvalidArgument);  // k_0 >= 0 only
}

TEST(Expand, RejectsBadInput) {
  EXPECT_THROW(cf_expand(std::nan(""), 4), InvalidArgument);
  EXPECT_THROW(cf_expand(0.3, 0), InvalidArgument);
}

TEST(Rational, Euclid) {
  EXPECT_EQ(cf_of_rational(5, 12).quotients(), (std::vector<std::int64_t>{0, 2, 2, 2}));
  EXPECT_EQ(cf_of_rational(7, 3).quotients(), (std::vector<std::int64_t>{2, 3}));
  EXPECT_THROW(cf_of_rational(1, 0), InvalidArgument);
}

TEST(Convergents, GoldenLadder) {
  const auto ladder = convergents(ContinuedFraction::golden(), 100);
  const std::vector<Convergent> expected{{0, 1}, {1, 1}, {1, 2}, {2, 3}, {3, 5},
                                         {5, 8}, {8, 13}, {13, 21}, {21, 34}, {34, 55}, {55, 89}};
  ASSERT_EQ(ladder.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(ladder[i], expected[i]) << i;
}

TEST(Convergents, SilverLadder) {
  const auto ladder = convergents(ContinuedFraction::silver(), 30);
  const std::vector<Convergent> expected{{0, 1}, {1, 2}, {2, 5}, {5, 12}, {12, 29}};
  ASSERT_EQ(ladder.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(ladder[i], expected[i]) << i;
}

TEST(Convergents, FiniteExpansionStops) {
  const auto ladder = convergents(cf_of_rational(5, 12));
  ASSERT_EQ(ladder.size(), 4u);
  EXPECT_EQ(ladder.back(), (Convergent{5, 12}));
}

TEST(Convergents, DeterminantIdentity) {
  const auto ladder = convergents(ContinuedFraction({0, 3, 1, 4, 1, 5, 9, 2, 6}));
  for (std::size_t n = 1; n < ladder.size(); ++n) {
    const auto det = ladder[n].p * ladder[n - 1].q - ladder[n - 1].p * ladder[n].q;
    EXPECT_EQ(det, (n % 2 == 1) ? 1 : -1) << n;
  }
}

TEST(Convergents, AlternateAroundTheValue) {
  const auto ladder = convergents(ContinuedFraction::golden(), 1'000'000);
  for (std::size_t n = 0; n < ladder.size(); ++n) {
    const double d = ladder[n].value() - kGolden;
    if (n % 2 == 0) EXPECT_LT(d, 0.0) << n;
    else EXPECT_GT(d, 0.0) << n;
  }
}

TEST(Value, PeriodicExpansions) {
  EXPECT_NEAR(cf_value(ContinuedFraction::golden()), kGolden, 1e-15);
  EXPECT_NEAR(cf_value(ContinuedFraction::silver()), kSilver, 1e-15);
  EXPECT_NEAR(cf_value(ContinuedFraction({1, 1}, 1)), (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
}

TEST(Value, RoundTripThroughExpansion) {
  for (double x : {0.1234567, 0.7071, 0.333, 0.9}) {
    EXPECT_NEAR(cf_value(cf_expand(x, 30)), x, 1e-14) << x;
  }
}

TEST(Periodic, QuotientFollowsTail) {
  const ContinuedFraction cf({0, 3, 1, 2}, 2);
  EXPECT_EQ(cf.expanded(8), (std::vector<std::int64_t>{0, 3, 1, 2, 1, 2, 1, 2}));
  EXPECT_TRUE(cf.is_periodic());
}

TEST(Periodic, RejectsInvalidQuotients) {
  EXPECT_THROW(ContinuedFraction({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(ContinuedFraction({0, 1}, 2), InvalidArgument);
}

TEST(Format, Strings) {
  EXPECT_EQ(to_string(Convergent{5, 12}), "5/12");
  EXPECT_EQ(ContinuedFraction::golden().str(), "[0; 1 ...]");
  EXPECT_EQ(cf_of_rational(5, 12).str(), "[0; 2, 2, 2]");
}
