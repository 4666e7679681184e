#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "dbb/estimators.hpp"

namespace dbb {

enum class Normalization { GroupRelative, MeanCentered };
enum class CollapsePolicy { ZeroAdvantage, Error };

/// GroupRelative+Point is GRPO, GroupRelative+DBB is GRPO-DBB, and the
/// MeanCentered variants are the Dr.GRPO forms. The collapse policy only
/// matters for GroupRelative+Point; the other three never divide by a
/// sample standard deviation.
struct AdvantageScheme {
  Normalization normalization = Normalization::GroupRelative;
  EstimatorKind estimator = EstimatorKind::Point;
  CollapsePolicy collapse_policy = CollapsePolicy::ZeroAdvantage;

  static AdvantageScheme grpo_point() { return {Normalization::GroupRelative, EstimatorKind::Point}; }
  static AdvantageScheme grpo_dbb() { return {Normalization::GroupRelative, EstimatorKind::DBB}; }
  static AdvantageScheme drgrpo_point() { return {Normalization::MeanCentered, EstimatorKind::Point}; }
  static AdvantageScheme drgrpo_dbb() { return {Normalization::MeanCentered, EstimatorKind::DBB}; }

  /// Accepts grpo-point, grpo-dbb, drgrpo-point, drgrpo-dbb.
  static AdvantageScheme parse(std::string_view name);
  std::string_view name() const;

  friend bool operator==(const AdvantageScheme&, const AdvantageScheme&) = default;
};

struct AdvantageVector {
  std::vector<double> values;
  /// True when a GroupRelative+Point group had zero sample variance and the
  /// ZeroAdvantage policy zeroed it.
  bool collapsed = false;
};

/// Per-rollout advantages for one group.
///
/// For DBB schemes `posterior` must already include this group's update;
/// the caller updates first and then computes advantages, in that order.
/// Throws std::invalid_argument if a DBB scheme gets no posterior, and
/// std::runtime_error("variance collapse") under CollapsePolicy::Error.
AdvantageVector compute_advantages(const RewardGroup& group, const AdvantageScheme& scheme,
                                   const std::optional<PosteriorState>& posterior = std::nullopt);

} // namespace dbb
