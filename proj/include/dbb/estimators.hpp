#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace dbb {

/// An ordered group of binary rollout rewards for one prompt at one step.
class RewardGroup {
public:
  RewardGroup() = default;
  /// Throws std::invalid_argument if any value is not exactly 0 or 1.
  explicit RewardGroup(std::vector<std::uint8_t> rewards);
  RewardGroup(std::initializer_list<int> rewards);

  /// All-success or all-failure group of size n.
  static RewardGroup uniform(std::size_t n, bool success);
  /// First `successes` entries are 1, the rest 0.
  static RewardGroup from_counts(std::size_t n, std::size_t successes);

  std::size_t size() const noexcept { return rewards_.size(); }
  bool empty() const noexcept { return rewards_.empty(); }
  std::size_t successes() const noexcept { return successes_; }
  std::uint8_t operator[](std::size_t i) const noexcept { return rewards_[i]; }
  std::span<const std::uint8_t> values() const noexcept { return rewards_; }

  friend bool operator==(const RewardGroup&, const RewardGroup&) = default;

private:
  std::vector<std::uint8_t> rewards_;
  std::size_t successes_ = 0;
};

/// Beta posterior pseudo-counts for one prompt. `visits` counts applied
/// updates. Positivity of alpha and beta is an invariant of every operation
/// in this header given a positive prior and a discount in (0, 1].
struct PosteriorState {
  double alpha = 1.0;
  double beta = 1.0;
  std::uint64_t visits = 0;

  static PosteriorState prior(double alpha0 = 1.0, double beta0 = 1.0);

  double mass() const noexcept { return alpha + beta; }
  friend bool operator==(const PosteriorState&, const PosteriorState&) = default;
};

enum class EstimatorKind { Point, DBB };

struct EstimatorSummary {
  double mean = 0.0;
  double variance = 0.0;
  EstimatorKind kind = EstimatorKind::Point;
  /// Set for a point estimate of a single-rollout group, where the sample
  /// variance has no N-1 denominator; `variance` is then reported as 0.
  bool degenerate = false;
};

/// Empirical mean S/N and unbiased sample variance N·p(1-p)/(N-1).
/// Throws std::invalid_argument("empty reward group") on an empty group.
EstimatorSummary point_estimate(const RewardGroup& group);

/// Undiscounted conjugate update: alpha += S, beta += N - S.
PosteriorState update_beta_bernoulli(const PosteriorState& state, const RewardGroup& group);

/// Discounted update: alpha' = lambda·alpha + S, beta' = lambda·beta + N - S.
/// lambda == 1 is bit-identical to update_beta_bernoulli.
/// Throws std::invalid_argument("discount factor out of range") unless 0 < lambda <= 1.
PosteriorState update_dbb(const PosteriorState& state, const RewardGroup& group, double lambda);

/// Same update from a success count, for callers that never materialize the
/// individual rewards (the Monte Carlo engine).
PosteriorState update_dbb_counts(const PosteriorState& state, std::size_t successes, std::size_t n,
                                 double lambda);

/// Posterior mean alpha/(alpha+beta) and plug-in Bernoulli variance
/// alpha·beta/(alpha+beta)^2. This is deliberately not the Beta posterior
/// variance; it estimates the reward variance, not parameter uncertainty.
EstimatorSummary dbb_estimate(const PosteriorState& state);

/// Weight on history in the next posterior mean:
/// w = lambda·(alpha+beta) / (lambda·(alpha+beta) + n).
double shrinkage_weight(const PosteriorState& state, double lambda, std::size_t n);

/// Conditional mean of the next DBB estimate given the true success
/// probability p: w·mu + (1-w)·p, mu being the current posterior mean.
double one_step_mean(const PosteriorState& state, double lambda, std::size_t n, double p);

/// Conditional variance of the next DBB estimate: (1-w)^2·p(1-p)/n.
double one_step_variance(const PosteriorState& state, double lambda, std::size_t n, double p);

void check_lambda(double lambda);

} // namespace dbb
