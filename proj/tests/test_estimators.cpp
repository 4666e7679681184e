#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

#include "dbb/estimators.hpp"
#include "dbb/rng.hpp"

namespace dbb {
namespace {

TEST(RewardGroup, RejectsNonBinaryValues) {
  EXPECT_THROW(RewardGroup({0, 2}), std::invalid_argument);
  EXPECT_THROW(RewardGroup(std::vector<std::uint8_t>{1, 0, 3}), std::invalid_argument);
  EXPECT_EQ(RewardGroup({1, 0, 1}).successes(), 2u);
  EXPECT_EQ(RewardGroup::from_counts(8, 3).successes(), 3u);
  EXPECT_THROW(RewardGroup::from_counts(2, 3), std::invalid_argument);
}

TEST(PointEstimate, HalfSuccess) {
  const auto s = point_estimate(RewardGroup{1, 0, 1, 0, 1, 0, 1, 0});
  EXPECT_EQ(s.kind, EstimatorKind::Point);
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_NEAR(s.variance, 2.0 / 7.0, 1e-15);
}

TEST(PointEstimate, AllSuccessCollapses) {
  const auto s = point_estimate(RewardGroup::uniform(8, true));
  EXPECT_EQ(s.mean, 1.0);
  EXPECT_EQ(s.variance, 0.0);
}

TEST(PointEstimate, EmptyGroupIsAnError) {
  try {
    point_estimate(RewardGroup{});
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "empty reward group");
  }
}

TEST(PointEstimate, SingleRolloutIsDegenerate) {
  const auto s = point_estimate(RewardGroup{1});
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.variance, 0.0);
  EXPECT_EQ(s.mean, 1.0);
}

TEST(UpdateBetaBernoulli, Examples) {
  const auto prior = PosteriorState::prior();
  auto s = update_beta_bernoulli(prior, RewardGroup::from_counts(8, 4));
  EXPECT_EQ(s.alpha, 5.0);
  EXPECT_EQ(s.beta, 5.0);
  EXPECT_EQ(s.visits, 1u);
  s = update_beta_bernoulli(prior, RewardGroup::from_counts(8, 0));
  EXPECT_EQ(s.alpha, 1.0);
  EXPECT_EQ(s.beta, 9.0);
  s = update_beta_bernoulli({5.0, 5.0, 1}, RewardGroup::from_counts(8, 8));
  EXPECT_EQ(s.alpha, 13.0);
  EXPECT_EQ(s.beta, 5.0);
  EXPECT_EQ(s.visits, 2u);
}

TEST(UpdateDbb, Examples) {
  const auto prior = PosteriorState::prior();
  auto s = update_dbb(prior, RewardGroup::from_counts(8, 8), 0.5);
  EXPECT_EQ(s.alpha, 8.5);
  EXPECT_EQ(s.beta, 0.5);
  s = update_dbb(prior, RewardGroup::from_counts(8, 4), 1.0);
  EXPECT_EQ(s.alpha, 5.0);
  EXPECT_EQ(s.beta, 5.0);
  s = update_dbb({8.5, 0.5, 1}, RewardGroup::from_counts(8, 6), 0.5);
  EXPECT_EQ(s.alpha, 10.25);
  EXPECT_EQ(s.beta, 2.25);
}

TEST(UpdateDbb, DiscountOutOfRange) {
  const auto g = RewardGroup::from_counts(8, 4);
  for (double bad : {0.0, -0.5, 1.0000001, 2.0, std::nan("")}) {
    try {
      update_dbb(PosteriorState::prior(), g, bad);
      FAIL() << "lambda " << bad;
    } catch (const std::invalid_argument& e) {
      EXPECT_STREQ(e.what(), "discount factor out of range");
    }
  }
}

TEST(DbbEstimate, Examples) {
  auto s = dbb_estimate(PosteriorState::prior());
  EXPECT_EQ(s.kind, EstimatorKind::DBB);
  EXPECT_EQ(s.mean, 0.5);
  EXPECT_EQ(s.variance, 0.25);

  s = dbb_estimate({8.5, 0.5, 1});
  EXPECT_NEAR(s.mean, 17.0 / 18.0, 1e-15);
  EXPECT_NEAR(s.variance, 17.0 / 324.0, 1e-15);
  EXPECT_NEAR(s.mean, 0.944444, 1e-6);
  EXPECT_NEAR(s.variance, 0.0524691, 1e-7);

  for (double a : {1e-9, 0.3, 1.0, 7.25, 1e6}) EXPECT_EQ(dbb_estimate({a, a, 0}).mean, 0.5);
}

TEST(ShrinkageWeight, Examples) {
  const auto prior = PosteriorState::prior();
  EXPECT_NEAR(shrinkage_weight(prior, 0.5, 8), 1.0 / 9.0, 1e-15);
  EXPECT_LT(shrinkage_weight({3.0, 4.0, 2}, 1e-12, 8), 1e-11);
  EXPECT_NEAR(one_step_variance(prior, 0.5, 8, 0.5), (8.0 / 9.0) * (8.0 / 9.0) * 0.25 / 8.0, 1e-15);
  EXPECT_NEAR(one_step_variance(prior, 0.5, 8, 0.5), 0.024691, 1e-6);
  try {
    shrinkage_weight(prior, 0.5, 0);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "empty group size");
  }
}

// One-step mean and variance against resampled groups.
TEST(ShrinkageWeight, OneStepMomentsMatchMonteCarlo) {
  const auto prior = PosteriorState::prior();
  constexpr int kReps = 100000;
  RandomStream rng(derive_key(5, StreamPurpose::Rewards), 0);
  for (double p : {0.5, 0.2}) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < kReps; ++r) {
      std::size_t s = 0;
      for (int i = 0; i < 8; ++i) s += rng.bernoulli(p);
      const double est = dbb_estimate(update_dbb_counts(prior, s, 8, 0.5)).mean;
      sum += est;
      sum_sq += est * est;
    }
    const double mean = sum / kReps;
    const double var = sum_sq / kReps - mean * mean;
    const double expected_var = one_step_variance(prior, 0.5, 8, p);
    EXPECT_NEAR(mean, one_step_mean(prior, 0.5, 8, p), 4 * std::sqrt(expected_var / kReps));
    // Relative sd of a sample variance is about sqrt(2/R) for near-normal data.
    EXPECT_NEAR(var, expected_var, 0.03 * expected_var);
  }
}

// Property: lambda == 1 reduces to the undiscounted update, bitwise.
TEST(DbbProperties, LambdaOneReductionIsBitwise) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 16;
    const std::size_t tau = 1 + gen() % 50;
    PosteriorState a = PosteriorState::prior();
    PosteriorState b = a;
    for (std::size_t t = 0; t < tau; ++t) {
      const auto g = RewardGroup::from_counts(n, gen() % (n + 1));
      a = update_dbb(a, g, 1.0);
      b = update_beta_bernoulli(b, g);
    }
    ASSERT_EQ(std::memcmp(&a.alpha, &b.alpha, sizeof(double)), 0);
    ASSERT_EQ(std::memcmp(&a.beta, &b.beta, sizeof(double)), 0);
    ASSERT_EQ(a.visits, b.visits);
  }
}

TEST(DbbProperties, TinyLambdaRecoversPointMean) {
  for (std::size_t s = 0; s <= 8; ++s) {
    const auto g = RewardGroup::from_counts(8, s);
    const double dbb = dbb_estimate(update_dbb(PosteriorState::prior(), g, 1e-6)).mean;
    EXPECT_LT(std::abs(dbb - point_estimate(g).mean), 1e-5) << "S=" << s;
  }
}

TEST(DbbProperties, NeverCollapsesAndMassFollowsRecurrence) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 300; ++trial) {
    const double lambda = 0.1 * static_cast<double>(1 + gen() % 10);
    const std::size_t tau = 1 + gen() % 100;
    PosteriorState s = PosteriorState::prior();
    double floor = 1.0;
    double mass = 2.0;
    for (std::size_t t = 0; t < tau; ++t) {
      // Bias toward uniform groups, the collapse case.
      const std::size_t k = gen() % 3 == 0 ? gen() % 9 : (gen() % 2) * 8;
      s = update_dbb(s, RewardGroup::from_counts(8, k), lambda);
      floor *= lambda;
      mass = lambda * mass + 8.0;
      ASSERT_GT(dbb_estimate(s).variance, 0.0);
      ASSERT_GE(s.alpha, floor * (1 - 1e-12));
      ASSERT_GE(s.beta, floor * (1 - 1e-12));
    }
    EXPECT_NEAR(s.mass(), mass, 1e-12 * mass);
    EXPECT_EQ(s.visits, tau);
  }
}

TEST(DbbProperties, OneStepVarianceNeverExceedsPointVariance) {
  for (double lambda : {1e-9, 0.1, 0.5, 0.9, 1.0}) {
    for (double mass : {0.5, 2.0, 20.0}) {
      for (int i = 0; i <= 20; ++i) {
        const double p = i / 20.0;
        const PosteriorState s{mass / 2, mass / 2, 0};
        EXPECT_LE(one_step_variance(s, lambda, 8, p), p * (1 - p) / 8 + 1e-18);
      }
    }
  }
  // Equality only in the lambda -> 0 limit.
  const PosteriorState s{1.0, 1.0, 0};
  EXPECT_LT(one_step_variance(s, 0.1, 8, 0.5), 0.25 / 8);
  EXPECT_NEAR(one_step_variance(s, 1e-12, 8, 0.5), 0.25 / 8, 1e-12);
}

TEST(PointProperties, UnbiasedWithBinomialVariance) {
  constexpr int kReps = 100000;
  constexpr std::size_t kN = 8;
  for (double p : {0.1, 0.5, 0.85}) {
    RandomStream rng(derive_key(77, StreamPurpose::Rewards), static_cast<std::uint64_t>(p * 100));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < kReps; ++r) {
      std::vector<std::uint8_t> x(kN);
      for (auto& v : x) v = rng.bernoulli(p);
      const double m = point_estimate(RewardGroup(x)).mean;
      sum += m;
      sum_sq += m * m;
    }
    const double mean = sum / kReps;
    const double var = (sum_sq - kReps * mean * mean) / (kReps - 1);
    EXPECT_LT(std::abs(mean - p), 4 * std::sqrt(p * (1 - p) / (kN * kReps)));
    EXPECT_NEAR(var, p * (1 - p) / kN, 0.05 * p * (1 - p) / kN);
  }
}

} // namespace
} // namespace dbb
