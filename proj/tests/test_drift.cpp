#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "dbb/drift.hpp"

namespace dbb {
namespace {

void expect_probs(const TrueProbSequence& s, const std::vector<double>& want) {
  ASSERT_EQ(s.probs.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s.probs[i], want[i], 1e-15) << "t=" << i + 1;
}

TEST(Trajectory, Examples) {
  expect_probs(generate_trajectory({drift::Stationary{0.5}, 4}, 1), {0.5, 0.5, 0.5, 0.5});
  expect_probs(generate_trajectory({drift::LinearRamp{0.0, 1.0}, 5}, 1), {0.0, 0.25, 0.5, 0.75, 1.0});
  expect_probs(generate_trajectory({drift::Step{0.2, 0.8, 3}, 4}, 1), {0.2, 0.2, 0.8, 0.8});
  expect_probs(generate_trajectory({drift::LinearRamp{0.3, 0.9}, 1}, 1), {0.3});
}

TEST(Trajectory, LogisticFormula) {
  const drift::Logistic m{5.5, 0.8, 0.1, 0.9};
  const auto s = generate_trajectory({m, 10}, 0);
  for (std::size_t t = 1; t <= 10; ++t) {
    const double want = 0.1 + 0.8 / (1.0 + std::exp(-0.8 * (static_cast<double>(t) - 5.5)));
    EXPECT_NEAR(s.probs[t - 1], want, 1e-12);
  }
  // Symmetric about the midpoint.
  EXPECT_NEAR(s.probs[4] + s.probs[5], 1.0, 1e-12);
}

TEST(Trajectory, DefaultLogisticIsSlowAndRising) {
  const auto s = generate_trajectory(DriftModel::default_logistic(), 0);
  ASSERT_EQ(s.probs.size(), 20u);
  for (std::size_t t = 1; t < s.probs.size(); ++t) EXPECT_GT(s.probs[t], s.probs[t - 1]);
  EXPECT_GT(s.probs.front(), 0.1);
  EXPECT_LT(s.probs.back(), 0.9);
}

TEST(Trajectory, InvalidParameters) {
  EXPECT_THROW(generate_trajectory({drift::BoundedRandomWalk{0.5, -0.1}, 5}, 0), std::invalid_argument);
  EXPECT_THROW(generate_trajectory({drift::Stationary{1.5}, 5}, 0), std::invalid_argument);
  EXPECT_THROW(generate_trajectory({drift::Stationary{0.5}, 0}, 0), std::invalid_argument);
  EXPECT_THROW(generate_trajectory({drift::Step{0.2, 0.8, 0}, 5}, 0), std::invalid_argument);
  EXPECT_THROW(generate_trajectory({drift::Logistic{0, 1, 0.9, 0.1}, 5}, 0), std::invalid_argument);
  EXPECT_THROW(generate_trajectory({drift::LinearRamp{-0.1, 0.5}, 5}, 0), std::invalid_argument);
}

TEST(RandomWalk, DeterministicBoundedAndSeedDependent) {
  const DriftModel m{drift::BoundedRandomWalk{0.5, 0.2}, 500};
  const auto a = generate_trajectory(m, 42);
  const auto b = generate_trajectory(m, 42);
  const auto c = generate_trajectory(m, 43);
  EXPECT_EQ(a.probs, b.probs);
  EXPECT_NE(a.probs, c.probs);
  EXPECT_EQ(a.probs.front(), 0.5);
  for (double p : a.probs) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(RandomWalk, ZeroStepIsConstant) {
  const auto s = generate_trajectory({drift::BoundedRandomWalk{0.3, 0.0}, 8}, 9);
  for (double p : s.probs) EXPECT_EQ(p, 0.3);
}

TEST(RandomWalk, IncrementsHaveRequestedSpread) {
  constexpr double kStd = 1e-4;
  constexpr std::size_t kLen = 20001;
  const auto s = generate_trajectory({drift::BoundedRandomWalk{0.5, kStd}, kLen}, 7);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 1; t < kLen; ++t) {
    const double d = s.probs[t] - s.probs[t - 1];
    sum += d;
    sum_sq += d * d;
  }
  const double m = static_cast<double>(kLen - 1);
  EXPECT_LT(std::abs(sum / m), 4 * kStd / std::sqrt(m));
  EXPECT_NEAR(std::sqrt(sum_sq / m), kStd, 0.03 * kStd);
}

TEST(ReferenceEstimate, Endpoints) {
  for (std::size_t count : {1u, 7u, 128u}) {
    EXPECT_EQ(reference_estimate(1.0, count, 3).value, 1.0);
    EXPECT_EQ(reference_estimate(0.0, count, 3).value, 0.0);
    EXPECT_EQ(reference_estimate(0.4, count, 3).sample_count, count);
  }
  EXPECT_THROW(reference_estimate(1.1, 128, 0), std::invalid_argument);
  EXPECT_THROW(reference_estimate(-0.1, 128, 0), std::invalid_argument);
  EXPECT_THROW(reference_estimate(0.5, 0, 0), std::invalid_argument);
}

TEST(ReferenceEstimate, Concentration) {
  const double half_width = 4 * std::sqrt(0.25 / 128);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const double v = reference_estimate(0.5, kDefaultReferenceSamples, seed).value;
    inside += std::abs(v - 0.5) <= half_width;
  }
  EXPECT_GE(inside, 990);
}

TEST(ReferenceEstimate, Deterministic) {
  EXPECT_EQ(reference_estimate(0.37, 128, 11).value, reference_estimate(0.37, 128, 11).value);
}

} // namespace
} // namespace dbb
