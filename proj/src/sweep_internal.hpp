#pragma once

#include <cstddef>
#include <vector>

#include "dbb/rng.hpp"
#include "dbb/simulator.hpp"

namespace dbb::detail {

/// The SweepSpec's trajectory, carrying its prior.
TrueProbSequence sweep_trajectory(const SweepSpec& spec);

/// Success counts S_1..S_tau of one replication, n Bernoulli draws per epoch
/// from the replication's reward stream.
inline void draw_successes(const std::vector<double>& probs, std::size_t n, std::size_t replication,
                           std::uint64_t key, std::vector<std::size_t>& out) {
  RandomStream rng(key, replication_stream(replication, n));
  out.resize(probs.size());
  for (std::size_t t = 0; t < probs.size(); ++t) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += rng.bernoulli(probs[t]);
    out[t] = s;
  }
}

/// Per-epoch targets of one replication: p_t itself, or a sampled reference
/// value drawn from the replication's reference stream.
void draw_targets(const SweepSpec& spec, const std::vector<double>& probs, std::size_t n,
                  std::size_t replication, std::vector<double>& out);

} // namespace dbb::detail
