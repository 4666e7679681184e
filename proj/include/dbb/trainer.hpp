#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbb/advantage.hpp"
#include "dbb/estimators.hpp"
#include "dbb/rng.hpp"

namespace dbb {

/// A synthetic prompt: K candidate answers, one of which earns reward 1.
struct BanditTask {
  std::string prompt_id;
  std::size_t k_answers = 16;
  std::size_t correct_answer = 0;
};

/// `count` tasks with ids q0, q1, ... and seeded correct answers.
std::vector<BanditTask> make_tasks(std::size_t count, std::size_t k_answers, std::uint64_t seed);

/// Tabular softmax policy over one prompt's answers.
class SoftmaxPolicy {
public:
  SoftmaxPolicy() = default;
  explicit SoftmaxPolicy(std::vector<double> logits);
  static SoftmaxPolicy uniform(std::size_t k) { return SoftmaxPolicy(std::vector<double>(k, 0.0)); }

  std::span<const double> logits() const noexcept { return logits_; }
  std::size_t size() const noexcept { return logits_.size(); }
  std::vector<double> probabilities() const;
  double entropy() const;

  friend bool operator==(const SoftmaxPolicy&, const SoftmaxPolicy&) = default;

private:
  std::vector<double> logits_;
};

/// Numerically stable softmax of arbitrary logits.
std::vector<double> softmax(std::span<const double> logits);

struct Rollout {
  RewardGroup rewards;
  std::vector<std::size_t> answers;
};

/// n i.i.d. categorical draws from the policy; reward 1 iff the draw is the
/// task's correct answer.
Rollout rollout_group(const SoftmaxPolicy& policy, const BanditTask& task, std::size_t n, RandomStream& rng);

/// Importance ratios are clipped to [1 - low, 1 + high].
struct ClipRange {
  double low = 0.2;
  double high = 0.28;
};

struct TrainerConfig {
  std::size_t n_rollouts = 8;
  std::size_t epochs = 4;
  std::size_t minibatch_size = 20;
  std::size_t updates_per_batch = 4;
  double learning_rate = 20.0;
  double lambda = 0.5;
  AdvantageScheme scheme = AdvantageScheme::grpo_dbb();
  /// Unset means the scheme's default: (0.2, 0.28) for point schemes and
  /// (0.98, 0.98) for DBB schemes.
  std::optional<double> clip_low;
  std::optional<double> clip_high;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  std::uint64_t seed = 0;

  ClipRange clip() const;
  /// Throws std::invalid_argument on an invalid configuration.
  void validate() const;
};

/// Value and logit-gradient of the clipped surrogate
///   (1/N) sum_i min(w_i A_i, clip(w_i, 1 - low, 1 + high) A_i),
/// w_i = pi(a_i) / pi_old(a_i), for a single-action episode per rollout.
struct SurrogateEvaluation {
  double objective = 0.0;
  std::vector<double> gradient;
  /// Rollouts whose clipped branch won the min, zeroing their gradient.
  std::size_t clipped = 0;
};

SurrogateEvaluation evaluate_surrogate(std::span<const double> logits, const Rollout& rollout,
                                       const AdvantageVector& advantages, std::span<const double> old_probs,
                                       ClipRange clip);

/// One gradient-ascent step of size config.learning_rate on the surrogate.
/// `old_probs` are the full answer distribution of the behavior policy.
/// Throws std::runtime_error on a non-finite gradient.
SoftmaxPolicy surrogate_update(const SoftmaxPolicy& policy, const Rollout& rollout, const AdvantageVector& advantages,
                               std::span<const double> old_probs, const TrainerConfig& config,
                               std::size_t* clipped = nullptr);

struct PromptPosterior {
  std::string prompt_id;
  PosteriorState state;
  friend bool operator==(const PromptPosterior&, const PromptPosterior&) = default;
};

struct StepMetrics {
  std::size_t step = 0;
  double mean_reward = 0.0;
  /// Mean policy entropy over the minibatch's prompts at sampling time.
  double entropy = 0.0;
  /// Fraction of groups whose rewards were all identical.
  double zero_var_frac = 0.0;
  /// Fraction of (rollout, update) pairs where clipping zeroed the gradient.
  double clip_frac = 0.0;

  friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

struct TrainMetrics {
  std::vector<StepMetrics> steps;
  /// Mean training reward of each epoch's rollouts.
  std::vector<double> epoch_mean_reward;
  std::size_t groups = 0;
  std::size_t zero_variance_groups = 0;
  /// Groups zeroed by the ZeroAdvantage collapse policy.
  std::size_t collapsed_groups = 0;
  std::size_t nonfinite_advantages = 0;
  /// Uniform-reward groups that still received a nonzero advantage.
  std::size_t informative_uniform_groups = 0;

  friend bool operator==(const TrainMetrics&, const TrainMetrics&) = default;
};

struct TrainResult {
  TrainMetrics metrics;
  std::vector<SoftmaxPolicy> policies;
  /// One entry per task, in task order.
  std::vector<PromptPosterior> posteriors;
};

/// Runs the epoch / minibatch / update loop: for each prompt in a minibatch,
/// sample a group from the batch-start policy, discount-and-update the
/// prompt's posterior, compute advantages from the updated posterior, then
/// apply updates_per_batch surrogate steps. Posteriors start at the prior
/// unless `resume` supplies them (matched by prompt id); policies start at
/// uniform logits unless `initial_policies` gives one per task. Deterministic
/// in config.seed.
TrainResult train(const std::vector<BanditTask>& tasks, const TrainerConfig& config,
                  const std::vector<PromptPosterior>* resume = nullptr,
                  const std::vector<SoftmaxPolicy>* initial_policies = nullptr);

} // namespace dbb
