#include <algorithm>
#include <cmath>
#include <numeric>

#include "dbb/estimators.hpp"
#include "dbb/simulator.hpp"
#include "sweep_internal.hpp"

namespace dbb {

namespace {

struct Summary {
  double mean;
  double standard_error;
};

Summary summarize(const std::vector<double>& xs) {
  const auto count = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (count - 1.0) / count)};
}

} // namespace

std::vector<SweepRecord> run_sweep_serial(const SweepSpec& spec) {
  auto records = closed_form_sweep(spec);
  const auto seq = detail::sweep_trajectory(spec);
  const auto epochs = spec.resolved_epochs();
  const std::uint64_t key = derive_key(spec.base_seed, StreamPurpose::Rewards);
  const PosteriorState prior = PosteriorState::prior(spec.prior_alpha, spec.prior_beta);
  const std::size_t reps = spec.replications;

  std::vector<std::size_t> successes;
  std::vector<double> targets;
  // errors[j * reps + r]: squared error of replication r at the j-th evaluated epoch.
  std::vector<double> dbb_errors(epochs.size() * reps);
  std::vector<double> point_errors(epochs.size() * reps);
  std::vector<double> column(reps);
  auto summarize_column = [&](const std::vector<double>& errors, std::size_t j) {
    std::copy_n(errors.begin() + static_cast<std::ptrdiff_t>(j * reps), reps, column.begin());
    return summarize(column);
  };

  std::size_t row = 0;
  for (std::size_t n : spec.group_sizes) {
    for (double lambda : spec.lambdas) {
      for (std::size_t r = 0; r < reps; ++r) {
        detail::draw_successes(seq.probs, n, r, key, successes);
        detail::draw_targets(spec, seq.probs, n, r, targets);
        PosteriorState state = prior;
        std::size_t j = 0;
        for (std::size_t t = 0; t < seq.probs.size() && j < epochs.size(); ++t) {
          state = update_dbb_counts(state, successes[t], n, lambda);
          if (t + 1 != epochs[j]) continue;
          const double dbb_err = dbb_estimate(state).mean - targets[t];
          const double point_err = static_cast<double>(successes[t]) / static_cast<double>(n) - targets[t];
          dbb_errors[j * reps + r] = dbb_err * dbb_err;
          point_errors[j * reps + r] = point_err * point_err;
          ++j;
        }
      }
      for (std::size_t j = 0; j < epochs.size(); ++j) {
        auto& rec = records[row++];
        const auto d = summarize_column(dbb_errors, j);
        const auto p = summarize_column(point_errors, j);
        rec.mse_dbb_empirical = d.mean;
        rec.stderr_dbb = d.standard_error;
        rec.mse_point_empirical = p.mean;
        rec.stderr_point = p.standard_error;
      }
    }
  }
  return records;
}

} // namespace dbb
