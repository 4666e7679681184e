#pragma once

#include <cstddef>
#include <vector>

namespace dbb {

/// Known true success probabilities p_1..p_tau, plus the prior's mean and
/// total pseudo-count (alpha0 + beta0).
struct TrueProbSequence {
  std::vector<double> probs;
  double prior_mean = 0.5;
  double prior_mass = 2.0;

  /// Throws std::invalid_argument on an empty sequence, an entry outside
  /// [0, 1], a prior mean outside [0, 1] or a non-positive prior mass.
  void validate() const;
  std::size_t length() const noexcept { return probs.size(); }
};

/// Exact statistics of the DBB posterior mean at epoch tau, conditioned on
/// the true probabilities.
struct ClosedFormStats {
  double expectation = 0.0;
  double variance = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  /// c_0 (prior) followed by c_1..c_tau.
  std::vector<double> weights;
  /// H_tau = alpha_tau + beta_tau, which does not depend on the rewards.
  double total_mass = 0.0;
};

/// H_tau = lambda^tau·prior_mass + n·sum_{k=1..tau} lambda^(tau-k), evaluated by
/// the forward recurrence H_k = lambda·H_{k-1} + n.
double total_mass(std::size_t tau, double lambda, std::size_t n, double prior_mass = 2.0);

/// Normalized weights c_0..c_tau of the prior mean and each epoch's true
/// probability in the expected DBB estimate. They sum to one.
std::vector<double> weights(std::size_t tau, double lambda, std::size_t n, double prior_mass = 2.0);

ClosedFormStats dbb_closed_form(const TrueProbSequence& seq, double lambda, std::size_t n);

/// Closed-form statistics for every prefix p_1..p_t, t = 1..tau, in one
/// O(tau) pass. Element t-1 has the same expectation/variance/bias/mse as
/// dbb_closed_form on the prefix; `weights` are left empty.
std::vector<ClosedFormStats> dbb_closed_form_path(const TrueProbSequence& seq, double lambda,
                                                  std::size_t n);

/// MSE of the unbiased empirical mean: p(1-p)/n.
double point_mse(double p, std::size_t n);

} // namespace dbb
