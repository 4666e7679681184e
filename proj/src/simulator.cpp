#include "dbb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include <omp.h>

#include "dbb/closed_form.hpp"
#include "dbb/estimators.hpp"
#include "sweep_internal.hpp"

namespace dbb {

namespace detail {

TrueProbSequence sweep_trajectory(const SweepSpec& spec) {
  auto seq = generate_trajectory(spec.trajectory, spec.base_seed);
  seq.prior_mass = spec.prior_alpha + spec.prior_beta;
  seq.prior_mean = spec.prior_alpha / seq.prior_mass;
  return seq;
}

void draw_targets(const SweepSpec& spec, const std::vector<double>& probs, std::size_t n,
                  std::size_t replication, std::vector<double>& out) {
  out.assign(probs.begin(), probs.end());
  if (spec.reference == ReferenceMode::Truth) return;
  RandomStream rng(derive_key(spec.base_seed, StreamPurpose::Reference), replication_stream(replication, n));
  for (std::size_t t = 0; t < probs.size(); ++t)
    out[t] = reference_estimate(probs[t], spec.reference_samples, rng).value;
}

} // namespace detail

namespace {

// Welford accumulator with Chan's pairwise merge.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * (o.count / total);
    m2 += o.m2 + d * d * (count * o.count / total);
    count = total;
  }

  double standard_error() const {
    if (count < 2.0) return 0.0;
    return std::sqrt(m2 / (count - 1.0)) / std::sqrt(count);
  }
};

} // namespace

void SweepSpec::validate() const {
  trajectory.validate();
  if (lambdas.empty()) throw std::invalid_argument("empty lambda grid");
  for (double l : lambdas) check_lambda(l);
  if (group_sizes.empty()) throw std::invalid_argument("empty group-size grid");
  for (auto n : group_sizes)
    if (n == 0) throw std::invalid_argument("group size must be at least 1");
  if (replications == 0) throw std::invalid_argument("replications must be at least 1");
  for (auto e : eval_epochs)
    if (e == 0 || e > trajectory.length) throw std::invalid_argument("eval epoch outside trajectory");
  if (std::adjacent_find(eval_epochs.begin(), eval_epochs.end(), std::greater_equal<>{}) != eval_epochs.end())
    throw std::invalid_argument("eval epochs must be strictly increasing");
  if (!(prior_alpha > 0.0) || !(prior_beta > 0.0)) throw std::invalid_argument("prior pseudo-counts must be positive");
  if (reference == ReferenceMode::Sampled && reference_samples == 0)
    throw std::invalid_argument("reference_samples must be at least 1");
}

std::vector<std::size_t> SweepSpec::resolved_epochs() const {
  if (!eval_epochs.empty()) return eval_epochs;
  std::vector<std::size_t> all(trajectory.length);
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = t + 1;
  return all;
}

std::vector<SweepRecord> closed_form_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto seq = detail::sweep_trajectory(spec);
  const auto epochs = spec.resolved_epochs();
  std::vector<SweepRecord> out;
  for (auto n : spec.group_sizes) {
    for (double lambda : spec.lambdas) {
      const auto path = dbb_closed_form_path(seq, lambda, n);
      for (auto e : epochs) {
        const double p = seq.probs[e - 1];
        const double ref_noise = spec.reference == ReferenceMode::Sampled
                                     ? p * (1.0 - p) / static_cast<double>(spec.reference_samples)
                                     : 0.0;
        SweepRecord r;
        r.lambda = lambda;
        r.n = n;
        r.epoch = e;
        r.mse_dbb_closed = path[e - 1].mse + ref_noise;
        r.mse_point_closed = point_mse(p, n) + ref_noise;
        r.point_variance_degenerate = n == 1;
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, int workers) {
  auto records = closed_form_sweep(spec);
  const auto seq = detail::sweep_trajectory(spec);
  const auto epochs = spec.resolved_epochs();
  const std::size_t n_lambda = spec.lambdas.size();
  const std::size_t n_epoch = epochs.size();
  const std::size_t tau = seq.length();
  const std::uint64_t key = derive_key(spec.base_seed, StreamPurpose::Rewards);
  const PosteriorState prior = PosteriorState::prior(spec.prior_alpha, spec.prior_beta);

  // slot[t] is the output column of epoch t+1, or -1 if it is not evaluated.
  std::vector<long> slot(tau, -1);
  for (std::size_t j = 0; j < n_epoch; ++j) slot[epochs[j] - 1] = static_cast<long>(j);

  const std::size_t n_blocks = (spec.replications + kReductionBlock - 1) / kReductionBlock;
  const std::size_t cells = n_lambda * n_epoch;

  std::size_t row = 0;
  for (std::size_t n : spec.group_sizes) {
    std::vector<Moments> dbb_partial(n_blocks * cells);
    std::vector<Moments> point_partial(n_blocks * n_epoch);

#pragma omp parallel num_threads(std::max(workers, 1))
    {
      std::vector<std::size_t> successes;
      std::vector<double> targets;
#pragma omp for schedule(static)
      for (long b = 0; b < static_cast<long>(n_blocks); ++b) {
        const std::size_t first = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t last = std::min(first + kReductionBlock, spec.replications);
        Moments* dbb_acc = &dbb_partial[static_cast<std::size_t>(b) * cells];
        Moments* point_acc = &point_partial[static_cast<std::size_t>(b) * n_epoch];
        for (std::size_t r = first; r < last; ++r) {
          detail::draw_successes(seq.probs, n, r, key, successes);
          detail::draw_targets(spec, seq.probs, n, r, targets);
          for (std::size_t t = 0; t < tau; ++t) {
            if (slot[t] < 0) continue;
            const double err = static_cast<double>(successes[t]) / static_cast<double>(n) - targets[t];
            point_acc[slot[t]].add(err * err);
          }
          for (std::size_t l = 0; l < n_lambda; ++l) {
            PosteriorState state = prior;
            for (std::size_t t = 0; t < tau; ++t) {
              state = update_dbb_counts(state, successes[t], n, spec.lambdas[l]);
              if (slot[t] < 0) continue;
              const double err = dbb_estimate(state).mean - targets[t];
              dbb_acc[l * n_epoch + static_cast<std::size_t>(slot[t])].add(err * err);
            }
          }
        }
      }
    }

    std::vector<Moments> dbb_total(cells);
    std::vector<Moments> point_total(n_epoch);
    for (std::size_t b = 0; b < n_blocks; ++b) {
      for (std::size_t c = 0; c < cells; ++c) dbb_total[c].merge(dbb_partial[b * cells + c]);
      for (std::size_t j = 0; j < n_epoch; ++j) point_total[j].merge(point_partial[b * n_epoch + j]);
    }

    for (std::size_t l = 0; l < n_lambda; ++l) {
      for (std::size_t j = 0; j < n_epoch; ++j) {
        auto& rec = records[row++];
        const auto& d = dbb_total[l * n_epoch + j];
        rec.mse_dbb_empirical = d.mean;
        rec.stderr_dbb = d.standard_error();
        rec.mse_point_empirical = point_total[j].mean;
        rec.stderr_point = point_total[j].standard_error();
      }
    }
  }
  return records;
}

std::vector<SweepRecord> epoch_average(const std::vector<SweepRecord>& records) {
  // Keyed by first appearance so the output keeps the input's grid order.
  std::vector<SweepRecord> out;
  std::vector<std::size_t> counts;
  std::map<std::pair<std::size_t, double>, std::size_t> index;
  for (const auto& r : records) {
    if (r.epoch == 0) continue;
    auto [it, inserted] = index.try_emplace({r.n, r.lambda}, out.size());
    if (inserted) {
      SweepRecord s;
      s.lambda = r.lambda;
      s.n = r.n;
      s.point_variance_degenerate = r.point_variance_degenerate;
      out.push_back(s);
      counts.push_back(0);
    }
    auto& s = out[it->second];
    s.mse_dbb_empirical += r.mse_dbb_empirical;
    s.mse_dbb_closed += r.mse_dbb_closed;
    s.mse_point_empirical += r.mse_point_empirical;
    s.mse_point_closed += r.mse_point_closed;
    s.stderr_dbb += r.stderr_dbb;
    s.stderr_point += r.stderr_point;
    ++counts[it->second];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<double>(counts[i]);
    auto& s = out[i];
    s.mse_dbb_empirical /= c;
    s.mse_dbb_closed /= c;
    s.mse_point_empirical /= c;
    s.mse_point_closed /= c;
    s.stderr_dbb /= c;
    s.stderr_point /= c;
  }
  return out;
}

std::pair<double, double> argmin_lambda(const std::vector<SweepRecord>& records, std::size_t epoch,
                                        MseSource source, std::optional<std::size_t> n) {
  std::optional<std::size_t> seen_n;
  std::optional<std::pair<double, double>> best;
  std::vector<double> lambdas;
  for (const auto& r : records) {
    if (r.epoch != epoch || (n && r.n != *n)) continue;
    if (seen_n && *seen_n != r.n) throw std::invalid_argument("records at epoch mix group sizes; select one n");
    seen_n = r.n;
    if (std::find(lambdas.begin(), lambdas.end(), r.lambda) == lambdas.end()) {
      lambdas.push_back(r.lambda);
    }
    const double mse = source == MseSource::Empirical ? r.mse_dbb_empirical : r.mse_dbb_closed;
    if (!best || mse < best->second || (mse == best->second && r.lambda < best->first)) best = {r.lambda, mse};
  }
  if (!best) throw std::invalid_argument("no records at epoch");
  if (lambdas.size() < 2) throw std::invalid_argument("argmin needs at least two lambdas");
  return *best;
}

} // namespace dbb
