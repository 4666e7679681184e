#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>

#include "dbb/closed_form.hpp"
#include "dbb/rng.hpp"

namespace dbb {

namespace drift {

struct Stationary {
  double p = 0.5;
  friend bool operator==(const Stationary&, const Stationary&) = default;
};

/// Affine from p_start at epoch 1 to p_end at the last epoch.
struct LinearRamp {
  double p_start = 0.0;
  double p_end = 1.0;
  friend bool operator==(const LinearRamp&, const LinearRamp&) = default;
};

/// floor + (ceiling - floor) / (1 + exp(-rate·(t - midpoint))), t = 1..tau.
/// The shape of a typical training-reward curve.
struct Logistic {
  double midpoint = 10.0;
  double rate = 0.3;
  double floor = 0.1;
  double ceiling = 0.9;
  friend bool operator==(const Logistic&, const Logistic&) = default;
};

/// p_before for t < change_epoch, p_after from change_epoch on.
struct Step {
  double p_before = 0.2;
  double p_after = 0.8;
  std::size_t change_epoch = 1;
  friend bool operator==(const Step&, const Step&) = default;
};

/// p_1 = p_start, then p_t = clamp(p_{t-1} + step_std·z_t, 0, 1) where z_t is
/// an Irwin-Hall (sum of 12 uniforms minus 6) approximate standard normal.
/// Only integer and basic float arithmetic is involved, so a seed produces
/// the same walk on every platform.
struct BoundedRandomWalk {
  double p_start = 0.5;
  double step_std = 0.05;
  friend bool operator==(const BoundedRandomWalk&, const BoundedRandomWalk&) = default;
};

} // namespace drift

struct DriftModel {
  using Kind = std::variant<drift::Stationary, drift::LinearRamp, drift::Logistic, drift::Step,
                            drift::BoundedRandomWalk>;
  Kind kind = drift::Logistic{};
  std::size_t length = 20;

  /// The default slow learning curve used by the sweep commands.
  static DriftModel default_logistic() { return {drift::Logistic{}, 20}; }

  std::string_view kind_name() const;
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  friend bool operator==(const DriftModel&, const DriftModel&) = default;
};

/// Deterministic in (model, seed); kinds without randomness ignore the seed.
/// Every value is clamped to [0, 1]. prior_mean/prior_mass are left at their
/// defaults.
TrueProbSequence generate_trajectory(const DriftModel& model, std::uint64_t seed);

struct ReferenceEstimate {
  double value = 0.0;
  std::size_t sample_count = 128;
};

inline constexpr std::size_t kDefaultReferenceSamples = 128;

/// Empirical mean of sample_count Bernoulli(p_true) draws.
ReferenceEstimate reference_estimate(double p_true, std::size_t sample_count, std::uint64_t seed);

/// Same, drawing from a caller-owned stream.
ReferenceEstimate reference_estimate(double p_true, std::size_t sample_count, RandomStream& rng);

} // namespace dbb
