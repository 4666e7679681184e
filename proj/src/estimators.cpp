#include "dbb/estimators.hpp"

#include <stdexcept>

namespace dbb {

RewardGroup::RewardGroup(std::vector<std::uint8_t> rewards) : rewards_(std::move(rewards)) {
  for (auto r : rewards_) {
    if (r > 1) throw std::invalid_argument("reward must be 0 or 1");
    successes_ += r;
  }
}

RewardGroup::RewardGroup(std::initializer_list<int> rewards) {
  rewards_.reserve(rewards.size());
  for (int r : rewards) {
    if (r != 0 && r != 1) throw std::invalid_argument("reward must be 0 or 1");
    rewards_.push_back(static_cast<std::uint8_t>(r));
    successes_ += static_cast<std::size_t>(r);
  }
}

RewardGroup RewardGroup::uniform(std::size_t n, bool success) {
  return RewardGroup(std::vector<std::uint8_t>(n, success ? 1 : 0));
}

RewardGroup RewardGroup::from_counts(std::size_t n, std::size_t successes) {
  if (successes > n) throw std::invalid_argument("successes exceed group size");
  std::vector<std::uint8_t> r(n, 0);
  for (std::size_t i = 0; i < successes; ++i) r[i] = 1;
  return RewardGroup(std::move(r));
}

PosteriorState PosteriorState::prior(double alpha0, double beta0) {
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) throw std::invalid_argument("prior pseudo-counts must be positive");
  return {alpha0, beta0, 0};
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("discount factor out of range");
}

EstimatorSummary point_estimate(const RewardGroup& group) {
  if (group.empty()) throw std::invalid_argument("empty reward group");
  const auto n = static_cast<double>(group.size());
  const double mean = static_cast<double>(group.successes()) / n;
  EstimatorSummary out{mean, 0.0, EstimatorKind::Point, false};
  if (group.size() == 1) {
    out.degenerate = true;
    return out;
  }
  out.variance = n * mean * (1.0 - mean) / (n - 1.0);
  return out;
}

PosteriorState update_beta_bernoulli(const PosteriorState& state, const RewardGroup& group) {
  const auto s = static_cast<double>(group.successes());
  const auto f = static_cast<double>(group.size() - group.successes());
  return {state.alpha + s, state.beta + f, state.visits + 1};
}

PosteriorState update_dbb_counts(const PosteriorState& state, std::size_t successes, std::size_t n,
                                 double lambda) {
  check_lambda(lambda);
  if (successes > n) throw std::invalid_argument("successes exceed group size");
  const auto s = static_cast<double>(successes);
  const auto f = static_cast<double>(n - successes);
  // lambda * x is exact for lambda == 1, which gives the bitwise reduction.
  return {lambda * state.alpha + s, lambda * state.beta + f, state.visits + 1};
}

PosteriorState update_dbb(const PosteriorState& state, const RewardGroup& group, double lambda) {
  return update_dbb_counts(state, group.successes(), group.size(), lambda);
}

EstimatorSummary dbb_estimate(const PosteriorState& state) {
  const double h = state.alpha + state.beta;
  const double mean = state.alpha / h;
  const double variance = (state.alpha / h) * (state.beta / h);
  return {mean, variance, EstimatorKind::DBB, false};
}

double shrinkage_weight(const PosteriorState& state, double lambda, std::size_t n) {
  check_lambda(lambda);
  if (n == 0) throw std::invalid_argument("empty group size");
  const double carried = lambda * state.mass();
  return carried / (carried + static_cast<double>(n));
}

double one_step_mean(const PosteriorState& state, double lambda, std::size_t n, double p) {
  const double w = shrinkage_weight(state, lambda, n);
  return w * dbb_estimate(state).mean + (1.0 - w) * p;
}

double one_step_variance(const PosteriorState& state, double lambda, std::size_t n, double p) {
  const double w = shrinkage_weight(state, lambda, n);
  return (1.0 - w) * (1.0 - w) * p * (1.0 - p) / static_cast<double>(n);
}

} // namespace dbb
