#include "dbb/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dbb {

AdvantageScheme AdvantageScheme::parse(std::string_view name) {
  if (name == "grpo-point") return grpo_point();
  if (name == "grpo-dbb") return grpo_dbb();
  if (name == "drgrpo-point") return drgrpo_point();
  if (name == "drgrpo-dbb") return drgrpo_dbb();
  throw std::invalid_argument("unknown advantage scheme: " + std::string(name));
}

std::string_view AdvantageScheme::name() const {
  const bool dbb = estimator == EstimatorKind::DBB;
  if (normalization == Normalization::GroupRelative) return dbb ? "grpo-dbb" : "grpo-point";
  return dbb ? "drgrpo-dbb" : "drgrpo-point";
}

AdvantageVector compute_advantages(const RewardGroup& group, const AdvantageScheme& scheme,
                                   const std::optional<PosteriorState>& posterior) {
  if (group.empty()) throw std::invalid_argument("empty reward group");

  EstimatorSummary summary;
  if (scheme.estimator == EstimatorKind::DBB) {
    if (!posterior) throw std::invalid_argument("DBB advantage requires a posterior state");
    summary = dbb_estimate(*posterior);
  } else {
    summary = point_estimate(group);
  }

  AdvantageVector out;
  out.values.resize(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) out.values[i] = group[i] - summary.mean;

  if (scheme.normalization == Normalization::MeanCentered) return out;

  if (summary.variance == 0.0) {
    // Only reachable for the point estimator: every reward equals the mean,
    // so the numerators above are already zero.
    if (scheme.collapse_policy == CollapsePolicy::Error) throw std::runtime_error("variance collapse");
    std::fill(out.values.begin(), out.values.end(), 0.0);
    out.collapsed = true;
    return out;
  }

  const double sd = std::sqrt(summary.variance);
  for (auto& v : out.values) v /= sd;
  return out;
}

} // namespace dbb
