#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbb/drift.hpp"
#include "dbb/simulator.hpp"
#include "dbb/trainer.hpp"

namespace dbb {

/// Invalid or unreadable configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shared by sweep-lambda and sweep-n. The base seed comes from the global
/// seed, so it is not part of the section.
struct SweepSection {
  DriftModel trajectory = DriftModel::default_logistic();
  std::vector<double> lambdas;
  std::vector<std::size_t> group_sizes;
  std::size_t replications = 20000;
  std::vector<std::size_t> eval_epochs;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  ReferenceMode reference = ReferenceMode::Truth;
  std::size_t reference_samples = kDefaultReferenceSamples;

  SweepSpec to_spec(std::uint64_t seed) const;
  friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct McValidateSection {
  std::vector<DriftModel> trajectories;
  std::vector<double> lambdas{0.25, 0.5, 0.75, 1.0};
  std::size_t group_size = 8;
  std::size_t replications = 100000;
  /// Evaluated epoch; 0 means each trajectory's final epoch.
  std::size_t epoch = 0;
  double stderr_tolerance = 3.0;
  double pass_fraction = 0.95;

  friend bool operator==(const McValidateSection&, const McValidateSection&) = default;
};

struct TrainSection {
  std::size_t prompts = 200;
  std::size_t k_answers = 16;
  std::size_t n_rollouts = 8;
  std::size_t epochs = 4;
  std::size_t minibatch_size = 20;
  std::size_t updates_per_batch = 4;
  double learning_rate = 20.0;
  double lambda = 0.5;
  std::string scheme = "grpo-dbb";
  std::optional<double> clip_low;
  std::optional<double> clip_high;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  std::string state_in;
  std::string state_out;

  TrainerConfig to_trainer(std::uint64_t seed) const;
  friend bool operator==(const TrainSection&, const TrainSection&) = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  /// Empty means a per-command default file name in the working directory.
  std::string output_path;
  int worker_count = 1;
  SweepSection sweep_lambda = default_sweep_lambda();
  SweepSection sweep_n = default_sweep_n();
  McValidateSection mc_validate = default_mc_validate();
  TrainSection train;

  static SweepSection default_sweep_lambda();
  static SweepSection default_sweep_n();
  static McValidateSection default_mc_validate();

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// JSON text of the full configuration, every key present.
std::string config_to_json(const ExperimentConfig& config);
/// Parses JSON text; absent keys keep their defaults, unknown keys and
/// ill-typed values throw ConfigError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace dbb
