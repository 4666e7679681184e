#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "dbb/closed_form.hpp"
#include "dbb/estimators.hpp"
#include "oracles.hpp"

namespace dbb {
namespace {

std::vector<double> random_probs(std::mt19937_64& gen, std::size_t tau) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(tau);
  for (auto& v : p) v = u(gen);
  return p;
}

TEST(TotalMass, Examples) {
  EXPECT_NEAR(total_mass(2, 0.5, 8, 2.0), 12.5, 1e-12);
  EXPECT_NEAR(total_mass(3, 1.0, 8, 2.0), 26.0, 1e-12);
  EXPECT_NEAR(total_mass(1, 0.5, 8, 2.0), 9.0, 1e-12);
  EXPECT_NEAR(total_mass(1, 0.5, 8, 2.0), 1.0 / (1.0 - shrinkage_weight(PosteriorState::prior(), 0.5, 8)) * 8.0, 1e-12);
}

TEST(TotalMass, Errors) {
  EXPECT_THROW(total_mass(0, 0.5, 8), std::invalid_argument);
  EXPECT_THROW(total_mass(3, 0.0, 8), std::invalid_argument);
  EXPECT_THROW(total_mass(3, 1.5, 8), std::invalid_argument);
  EXPECT_THROW(total_mass(3, 0.5, 0), std::invalid_argument);
}

TEST(TotalMass, MatchesDirectPowers) {
  for (double lambda : {0.05, 0.3, 0.6, 0.95, 1.0})
    for (std::size_t tau : {1u, 2u, 7u, 40u, 200u})
      for (std::size_t n : {1u, 8u, 64u}) {
        const double direct = oracle::total_mass_direct(tau, lambda, n, 2.0);
        EXPECT_NEAR(total_mass(tau, lambda, n), direct, 1e-12 * direct);
      }
}

TEST(Weights, Examples) {
  const auto c = weights(2, 0.5, 8);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_NEAR(c[0], 0.04, 1e-12);
  EXPECT_NEAR(c[1], 0.32, 1e-12);
  EXPECT_NEAR(c[2], 0.64, 1e-12);
  const auto d = weights(1, 1.0, 8);
  EXPECT_NEAR(d[0], 0.2, 1e-12);
  EXPECT_NEAR(d[1], 0.8, 1e-12);
}

TEST(Weights, NonNegativeAndSumToOne) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double lambda = std::uniform_real_distribution<double>(1e-4, 1.0)(gen);
    const auto c = weights(1 + gen() % 300, lambda, 1 + gen() % 64, 0.1 + 5.0 * (gen() % 100) / 100.0);
    for (double w : c) ASSERT_GE(w, 0.0);
    ASSERT_NEAR(std::accumulate(c.begin(), c.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(ClosedForm, StationaryExample) {
  const auto s = dbb_closed_form({{0.5, 0.5}}, 0.5, 8);
  EXPECT_NEAR(s.expectation, 0.5, 1e-12);
  EXPECT_NEAR(s.bias, 0.0, 1e-12);
  EXPECT_NEAR(s.variance, 0.016, 1e-12);
  EXPECT_NEAR(s.mse, 0.016, 1e-12);
  EXPECT_NEAR(s.total_mass, 12.5, 1e-12);
}

TEST(ClosedForm, DriftExample) {
  const auto s = dbb_closed_form({{0.2, 0.8}}, 0.5, 8);
  EXPECT_NEAR(s.expectation, 0.596, 1e-12);
  EXPECT_NEAR(s.bias, -0.204, 1e-12);
  EXPECT_NEAR(s.mse, s.bias * s.bias + s.variance, 1e-12);
}

TEST(ClosedForm, UnitDiscountMatchingPriorIsUnbiased) {
  for (double p : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    TrueProbSequence seq{{p}, p, 2.0};
    EXPECT_NEAR(dbb_closed_form(seq, 1.0, 8).bias, 0.0, 1e-15);
  }
}

TEST(ClosedForm, Errors) {
  EXPECT_THROW(dbb_closed_form({{}}, 0.5, 8), std::invalid_argument);
  EXPECT_THROW(dbb_closed_form({{0.5, 1.2}}, 0.5, 8), std::invalid_argument);
  EXPECT_THROW(dbb_closed_form({{0.5}, 0.5, 0.0}, 0.5, 8), std::invalid_argument);
}

TEST(PointMse, Examples) {
  EXPECT_NEAR(point_mse(0.5, 8), 0.03125, 1e-15);
  EXPECT_EQ(point_mse(0.0, 3), 0.0);
  EXPECT_NEAR(point_mse(0.1, 8), 0.01125, 1e-15);
  EXPECT_THROW(point_mse(-0.1, 8), std::invalid_argument);
  EXPECT_THROW(point_mse(0.5, 0), std::invalid_argument);
}

// Exact enumeration over all success-count histories.
TEST(ClosedFormOracle, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + gen() % 4;
    const std::size_t tau = 1 + gen() % 5;
    const double lambda = std::uniform_real_distribution<double>(0.05, 1.0)(gen);
    const auto probs = random_probs(gen, tau);
    const auto exact = oracle::enumerate_dbb(probs, lambda, n);
    const auto s = dbb_closed_form({probs}, lambda, n);
    EXPECT_NEAR(s.expectation, exact.mean, 1e-12);
    EXPECT_NEAR(s.variance, exact.variance, 1e-12);
    EXPECT_NEAR(s.mse, exact.mse, 1e-12);
  }
}

TEST(ClosedFormOracle, MatchesIndependentMonteCarlo) {
  struct Case {
    std::vector<double> probs;
    double lambda;
    std::size_t n;
  };
  const std::vector<Case> cases = {
      {{0.2, 0.8}, 0.5, 8},
      {{0.5, 0.5, 0.5, 0.5}, 0.3, 4},
      {{0.1, 0.2, 0.4, 0.6, 0.8, 0.9, 0.9, 0.9, 0.9, 0.9}, 0.75, 16},
      {{0.9, 0.1, 0.9, 0.1, 0.5}, 0.9, 8},
  };
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const auto mc = oracle::monte_carlo_dbb(c.probs, c.lambda, c.n, 200000, seed++);
    const auto s = dbb_closed_form({c.probs}, c.lambda, c.n);
    EXPECT_LE(std::abs(mc.dbb_mean - s.expectation), 3 * mc.dbb_mean_stderr);
    EXPECT_LE(std::abs(mc.dbb_var - s.variance), 3 * mc.dbb_var_stderr);
    EXPECT_LE(std::abs(mc.dbb_mse - s.mse), 3 * mc.dbb_mse_stderr);
  }
}

TEST(ClosedFormProperties, StationaryDominance) {
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    for (int j = 1; j <= 9; ++j) {
      const double lambda = j / 10.0;
      const auto s = dbb_closed_form({std::vector<double>(50, p)}, lambda, 8);
      EXPECT_LT(s.mse, point_mse(p, 8)) << "p=" << p << " lambda=" << lambda;
    }
  }
}

TEST(ClosedFormProperties, SmallDiscountRecoversPointStatistics) {
  const std::vector<double> probs = {0.9, 0.1, 0.35};
  const auto s = dbb_closed_form({probs}, 1e-9, 8);
  EXPECT_NEAR(s.expectation, 0.35, 1e-8);
  EXPECT_NEAR(s.variance, point_mse(0.35, 8), 1e-8);
}

TEST(ClosedFormProperties, VarianceBoundedByWorstPointVariance) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto probs = random_probs(gen, 1 + gen() % 30);
    const double lambda = std::uniform_real_distribution<double>(1e-6, 1.0)(gen);
    const std::size_t n = 1 + gen() % 32;
    double worst = 0.0;
    for (double p : probs) worst = std::max(worst, p * (1 - p) / static_cast<double>(n));
    ASSERT_LE(dbb_closed_form({probs}, lambda, n).variance, worst * (1 + 1e-12));
  }
}

// Expectation by iterating the one-step mean on expected pseudo-counts.
TEST(ClosedFormProperties, AgreesWithIteratedOneStepMean) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 500; ++trial) {
    const auto probs = random_probs(gen, 1 + gen() % 25);
    const double lambda = std::uniform_real_distribution<double>(0.01, 1.0)(gen);
    const std::size_t n = 1 + gen() % 16;
    PosteriorState expected = PosteriorState::prior();
    for (double p : probs) {
      const double mean = one_step_mean(expected, lambda, n, p);
      const double mass = lambda * expected.mass() + static_cast<double>(n);
      expected = {mean * mass, (1 - mean) * mass, expected.visits + 1};
    }
    ASSERT_NEAR(dbb_closed_form({probs}, lambda, n).expectation, expected.alpha / expected.mass(), 1e-10);
  }
}

TEST(ClosedFormProperties, UndiscountedTextbookMoments) {
  // lambda = 1 with stationary p: (alpha0 + S)/(2 + n tau), S ~ Bin(n tau, p).
  const double p = 0.3;
  const std::size_t n = 8;
  const std::size_t tau = 5;
  const double h = 2.0 + n * tau;
  const auto s = dbb_closed_form({std::vector<double>(tau, p)}, 1.0, n);
  EXPECT_NEAR(s.expectation, (1.0 + n * tau * p) / h, 1e-12);
  EXPECT_NEAR(s.variance, n * tau * p * (1 - p) / (h * h), 1e-12);
}

TEST(ClosedFormProperties, PathEqualsEveryPrefix) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto probs = random_probs(gen, 1 + gen() % 40);
    const double lambda = std::uniform_real_distribution<double>(0.01, 1.0)(gen);
    const std::size_t n = 1 + gen() % 16;
    const auto path = dbb_closed_form_path({probs}, lambda, n);
    ASSERT_EQ(path.size(), probs.size());
    for (std::size_t t = 1; t <= probs.size(); ++t) {
      const auto s = dbb_closed_form({std::vector<double>(probs.begin(), probs.begin() + t)}, lambda, n);
      ASSERT_NEAR(path[t - 1].expectation, s.expectation, 1e-12);
      ASSERT_NEAR(path[t - 1].variance, s.variance, 1e-12);
      ASSERT_NEAR(path[t - 1].bias, s.bias, 1e-12);
      ASSERT_NEAR(path[t - 1].mse, s.mse, 1e-12);
      ASSERT_NEAR(path[t - 1].total_mass, s.total_mass, 1e-12 * s.total_mass);
    }
  }
}

} // namespace
} // namespace dbb
