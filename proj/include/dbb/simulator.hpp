#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dbb/drift.hpp"

namespace dbb {

/// What the squared error of an estimate is measured against.
enum class ReferenceMode {
  /// The simulator's known p_tau.
  Truth,
  /// A fresh reference_estimate of p_tau per replication and epoch. The
  /// closed-form columns then include the extra p(1-p)/sample_count term.
  Sampled,
};

struct SweepSpec {
  DriftModel trajectory = DriftModel::default_logistic();
  std::vector<double> lambdas{0.5};
  std::vector<std::size_t> group_sizes{8};
  std::size_t replications = 10000;
  /// 1-based, strictly increasing; empty means every epoch of the trajectory.
  std::vector<std::size_t> eval_epochs;
  std::uint64_t base_seed = 0;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  ReferenceMode reference = ReferenceMode::Truth;
  std::size_t reference_samples = kDefaultReferenceSamples;

  /// Throws std::invalid_argument when a grid is empty or out of range.
  void validate() const;
  std::vector<std::size_t> resolved_epochs() const;
};

/// One grid point. `epoch == 0` marks an epoch-averaged summary row.
struct SweepRecord {
  double lambda = 0.0;
  std::size_t n = 0;
  std::size_t epoch = 0;
  double mse_dbb_empirical = 0.0;
  double mse_dbb_closed = 0.0;
  double mse_point_empirical = 0.0;
  double mse_point_closed = 0.0;
  double stderr_dbb = 0.0;
  double stderr_point = 0.0;
  /// n == 1: the point estimator's sample variance is undefined.
  bool point_variance_degenerate = false;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// Replications are reduced in fixed blocks of this many, block partials
/// merged in block order. Output depends on this constant but never on the
/// number of worker threads.
inline constexpr std::size_t kReductionBlock = 1024;

/// Monte Carlo sweep over (n, lambda, epoch). Rows are ordered by n, then
/// lambda, then epoch, in grid order. Reward histories are
/// shared across lambdas (common random numbers) for a given replication and
/// n. Runs replication blocks on `workers` OpenMP threads; the result is
/// byte-identical for any worker count.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int workers = 1);

/// Straight-line single-threaded reference for run_sweep: one (n, lambda) row
/// at a time, every per-replication error stored and reduced with a two-pass
/// mean and variance. Draws the same random streams, so it agrees with run_sweep to
/// rounding.
std::vector<SweepRecord> run_sweep_serial(const SweepSpec& spec);

/// Closed-form columns only; empirical columns and stderrs are zero.
std::vector<SweepRecord> closed_form_sweep(const SweepSpec& spec);

/// One summary row (epoch 0) per (n, lambda), averaging every column over
/// the epochs present. Stderrs are averaged as well, which overstates the
/// error of the average; they are reported for orientation only.
std::vector<SweepRecord> epoch_average(const std::vector<SweepRecord>& records);

enum class MseSource { Empirical, Closed };

/// Grid lambda with the smallest DBB MSE among records at `epoch`, ties to the
/// smaller lambda. Records at that epoch must share one n (pass `n` to pick
/// one out of a multi-n sweep) and cover at least two lambdas.
/// Throws std::invalid_argument otherwise.
std::pair<double, double> argmin_lambda(const std::vector<SweepRecord>& records, std::size_t epoch,
                                        MseSource source = MseSource::Empirical,
                                        std::optional<std::size_t> n = std::nullopt);

/// Stream id for replication r at group size n. Shared by both sweep engines.
constexpr std::uint64_t replication_stream(std::size_t replication, std::size_t n) noexcept {
  return (static_cast<std::uint64_t>(n) << 40) ^ static_cast<std::uint64_t>(replication);
}

} // namespace dbb
