#include "dbb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace dbb {

std::vector<BanditTask> make_tasks(std::size_t count, std::size_t k_answers, std::uint64_t seed) {
  if (k_answers < 2) throw std::invalid_argument("tasks need at least two answers");
  RandomStream rng(derive_key(seed, StreamPurpose::Tasks), 0);
  std::vector<BanditTask> tasks(count);
  for (std::size_t i = 0; i < count; ++i)
    tasks[i] = {"q" + std::to_string(i), k_answers, static_cast<std::size_t>(rng.below(k_answers))};
  return tasks;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (auto& v : p) {
    v = std::exp(v - top);
    z += v;
  }
  for (auto& v : p) v /= z;
  return p;
}

SoftmaxPolicy::SoftmaxPolicy(std::vector<double> logits) : logits_(std::move(logits)) {
  for (double v : logits_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite logit");
}

std::vector<double> SoftmaxPolicy::probabilities() const { return softmax(logits_); }

double SoftmaxPolicy::entropy() const {
  double h = 0.0;
  for (double p : probabilities())
    if (p > 0.0) h -= p * std::log(p);
  return std::max(h, 0.0);
}

Rollout rollout_group(const SoftmaxPolicy& policy, const BanditTask& task, std::size_t n, RandomStream& rng) {
  if (policy.size() != task.k_answers) throw std::invalid_argument("policy size does not match task");
  const auto probs = policy.probabilities();
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());

  Rollout out;
  out.answers.resize(n);
  std::vector<std::uint8_t> rewards(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto a = std::min(static_cast<std::size_t>(std::distance(cdf.begin(), it)), probs.size() - 1);
    out.answers[i] = a;
    rewards[i] = a == task.correct_answer ? 1 : 0;
  }
  out.rewards = RewardGroup(std::move(rewards));
  return out;
}

ClipRange TrainerConfig::clip() const {
  const bool dbb = scheme.estimator == EstimatorKind::DBB;
  return {clip_low.value_or(dbb ? 0.98 : 0.2), clip_high.value_or(dbb ? 0.98 : 0.28)};
}

void TrainerConfig::validate() const {
  if (n_rollouts == 0) throw std::invalid_argument("n_rollouts must be at least 1");
  if (minibatch_size == 0) throw std::invalid_argument("minibatch_size must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  check_lambda(lambda);
  const auto c = clip();
  if (!(c.low >= 0.0) || !(c.high >= 0.0)) throw std::invalid_argument("clip ranges must be non-negative");
  if (!(prior_alpha > 0.0) || !(prior_beta > 0.0)) throw std::invalid_argument("prior pseudo-counts must be positive");
}

SurrogateEvaluation evaluate_surrogate(std::span<const double> logits, const Rollout& rollout,
                                       const AdvantageVector& advantages, std::span<const double> old_probs,
                                       ClipRange clip) {
  const std::size_t n = rollout.answers.size();
  if (advantages.values.size() != n) throw std::invalid_argument("advantages not aligned with rollouts");
  if (old_probs.size() != logits.size()) throw std::invalid_argument("old_probs not aligned with logits");

  const auto probs = softmax(logits);
  SurrogateEvaluation out;
  out.gradient.assign(logits.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = rollout.answers[i];
    const double adv = advantages.values[i];
    const double ratio = probs[a] / old_probs[a];
    const double clipped_ratio = std::clamp(ratio, 1.0 - clip.low, 1.0 + clip.high);
    const double plain = ratio * adv;
    const double bounded = clipped_ratio * adv;
    if (bounded < plain) {
      out.objective += bounded * inv_n;
      ++out.clipped;
      continue;
    }
    out.objective += plain * inv_n;
    if (adv == 0.0) continue;
    // d ratio / d logit_j = ratio · (1[j == a] - pi_j)
    const double scale = adv * ratio * inv_n;
    for (std::size_t j = 0; j < logits.size(); ++j) out.gradient[j] -= scale * probs[j];
    out.gradient[a] += scale;
  }
  return out;
}

SoftmaxPolicy surrogate_update(const SoftmaxPolicy& policy, const Rollout& rollout, const AdvantageVector& advantages,
                               std::span<const double> old_probs, const TrainerConfig& config, std::size_t* clipped) {
  const auto eval = evaluate_surrogate(policy.logits(), rollout, advantages, old_probs, config.clip());
  if (clipped) *clipped += eval.clipped;
  std::vector<double> logits(policy.logits().begin(), policy.logits().end());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (!std::isfinite(eval.gradient[j])) throw std::runtime_error("non-finite surrogate gradient");
    logits[j] += config.learning_rate * eval.gradient[j];
  }
  return SoftmaxPolicy(std::move(logits));
}

namespace {

std::vector<std::size_t> shuffled_order(std::size_t count, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  RandomStream rng(derive_key(seed, StreamPurpose::Shuffle), epoch);
  for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

struct PendingGroup {
  std::size_t task;
  Rollout rollout;
  AdvantageVector advantages;
  std::vector<double> old_probs;
};

} // namespace

TrainResult train(const std::vector<BanditTask>& tasks, const TrainerConfig& config,
                  const std::vector<PromptPosterior>* resume,
                  const std::vector<SoftmaxPolicy>* initial_policies) {
  config.validate();
  if (tasks.empty()) throw std::invalid_argument("empty task list");
  if (initial_policies && initial_policies->size() != tasks.size())
    throw std::invalid_argument("need one initial policy per task");

  TrainResult result;
  result.policies.reserve(tasks.size());
  result.posteriors.reserve(tasks.size());
  const auto prior = PosteriorState::prior(config.prior_alpha, config.prior_beta);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    result.policies.push_back(initial_policies ? (*initial_policies)[i] : SoftmaxPolicy::uniform(t.k_answers));
    if (result.policies.back().size() != t.k_answers) throw std::invalid_argument("policy size does not match task");
    result.posteriors.push_back({t.prompt_id, prior});
  }
  if (resume) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < tasks.size(); ++i) index.emplace(tasks[i].prompt_id, i);
    for (const auto& rec : *resume) {
      auto it = index.find(rec.prompt_id);
      if (it == index.end()) throw std::invalid_argument("snapshot prompt not in task list: " + rec.prompt_id);
      result.posteriors[it->second].state = rec.state;
    }
  }

  auto& metrics = result.metrics;
  const std::size_t n = config.n_rollouts;
  const std::uint64_t rollout_key = derive_key(config.seed, StreamPurpose::Rollout);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled_order(tasks.size(), config.seed, epoch);
    double epoch_reward = 0.0;

    for (std::size_t start = 0; start < order.size(); start += config.minibatch_size) {
      const std::size_t stop = std::min(start + config.minibatch_size, order.size());
      StepMetrics sm;
      sm.step = step;
      std::vector<PendingGroup> batch;
      batch.reserve(stop - start);
      std::size_t zero_var = 0;

      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t q = order[b];
        const auto& policy = result.policies[q];
        RandomStream rng(rollout_key, (static_cast<std::uint64_t>(epoch) << 32) | q);
        PendingGroup g{q, rollout_group(policy, tasks[q], n, rng), {}, policy.probabilities()};

        auto& post = result.posteriors[q].state;
        post = update_dbb(post, g.rollout.rewards, config.lambda);
        g.advantages = compute_advantages(g.rollout.rewards, config.scheme, post);

        const std::size_t s = g.rollout.rewards.successes();
        const bool uniform = s == 0 || s == n;
        ++metrics.groups;
        if (uniform) {
          ++zero_var;
          ++metrics.zero_variance_groups;
        }
        if (g.advantages.collapsed) ++metrics.collapsed_groups;
        bool any_nonzero = false;
        for (double v : g.advantages.values) {
          if (!std::isfinite(v)) ++metrics.nonfinite_advantages;
          if (v != 0.0) any_nonzero = true;
        }
        if (uniform && any_nonzero) ++metrics.informative_uniform_groups;

        sm.mean_reward += static_cast<double>(s) / static_cast<double>(n);
        sm.entropy += policy.entropy();
        batch.push_back(std::move(g));
      }

      std::size_t clipped = 0;
      for (std::size_t u = 0; u < config.updates_per_batch; ++u)
        for (const auto& g : batch)
          result.policies[g.task] =
              surrogate_update(result.policies[g.task], g.rollout, g.advantages, g.old_probs, config, &clipped);

      const auto groups = static_cast<double>(batch.size());
      epoch_reward += sm.mean_reward;
      sm.mean_reward /= groups;
      sm.entropy /= groups;
      sm.zero_var_frac = static_cast<double>(zero_var) / groups;
      const std::size_t pairs = batch.size() * n * config.updates_per_batch;
      sm.clip_frac = pairs == 0 ? 0.0 : static_cast<double>(clipped) / static_cast<double>(pairs);
      metrics.steps.push_back(sm);
      ++step;
    }
    metrics.epoch_mean_reward.push_back(epoch_reward / static_cast<double>(tasks.size()));
  }
  return result;
}

} // namespace dbb
