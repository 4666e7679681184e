#include "dbb/drift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbb {

namespace {

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

std::string_view DriftModel::kind_name() const {
  return std::visit(Overloaded{
                        [](const drift::Stationary&) { return std::string_view{"stationary"}; },
                        [](const drift::LinearRamp&) { return std::string_view{"linear_ramp"}; },
                        [](const drift::Logistic&) { return std::string_view{"logistic"}; },
                        [](const drift::Step&) { return std::string_view{"step"}; },
                        [](const drift::BoundedRandomWalk&) { return std::string_view{"random_walk"}; },
                    },
                    kind);
}

void DriftModel::validate() const {
  if (length == 0) throw std::invalid_argument("trajectory length must be at least 1");
  std::visit(Overloaded{
                 [](const drift::Stationary& m) {
                   if (!is_prob(m.p)) throw std::invalid_argument("stationary p outside [0, 1]");
                 },
                 [](const drift::LinearRamp& m) {
                   if (!is_prob(m.p_start) || !is_prob(m.p_end))
                     throw std::invalid_argument("ramp endpoints outside [0, 1]");
                 },
                 [](const drift::Logistic& m) {
                   if (!std::isfinite(m.midpoint) || !std::isfinite(m.rate))
                     throw std::invalid_argument("logistic midpoint and rate must be finite");
                   if (!is_prob(m.floor) || !is_prob(m.ceiling) || m.floor > m.ceiling)
                     throw std::invalid_argument("logistic needs 0 <= floor <= ceiling <= 1");
                 },
                 [](const drift::Step& m) {
                   if (!is_prob(m.p_before) || !is_prob(m.p_after))
                     throw std::invalid_argument("step levels outside [0, 1]");
                   if (m.change_epoch == 0) throw std::invalid_argument("step change_epoch must be >= 1");
                 },
                 [](const drift::BoundedRandomWalk& m) {
                   if (!is_prob(m.p_start)) throw std::invalid_argument("walk start outside [0, 1]");
                   if (!(m.step_std >= 0.0) || !std::isfinite(m.step_std))
                     throw std::invalid_argument("walk step_std must be non-negative");
                 },
             },
             kind);
}

TrueProbSequence generate_trajectory(const DriftModel& model, std::uint64_t seed) {
  model.validate();
  const std::size_t tau = model.length;
  TrueProbSequence seq;
  seq.probs.resize(tau);
  auto& p = seq.probs;

  std::visit(Overloaded{
                 [&](const drift::Stationary& m) { std::fill(p.begin(), p.end(), m.p); },
                 [&](const drift::LinearRamp& m) {
                   for (std::size_t t = 0; t < tau; ++t) {
                     const double frac = tau == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(tau - 1);
                     p[t] = m.p_start + (m.p_end - m.p_start) * frac;
                   }
                 },
                 [&](const drift::Logistic& m) {
                   for (std::size_t t = 0; t < tau; ++t) {
                     const double x = static_cast<double>(t + 1) - m.midpoint;
                     p[t] = m.floor + (m.ceiling - m.floor) / (1.0 + std::exp(-m.rate * x));
                   }
                 },
                 [&](const drift::Step& m) {
                   for (std::size_t t = 0; t < tau; ++t) p[t] = t + 1 < m.change_epoch ? m.p_before : m.p_after;
                 },
                 [&](const drift::BoundedRandomWalk& m) {
                   RandomStream rng(derive_key(seed, StreamPurpose::Trajectory), 0);
                   p[0] = m.p_start;
                   for (std::size_t t = 1; t < tau; ++t) {
                     double z = -6.0;
                     for (int i = 0; i < 12; ++i) z += rng.uniform();
                     p[t] = p[t - 1] + m.step_std * z;
                     p[t] = std::clamp(p[t], 0.0, 1.0);
                   }
                 },
             },
             model.kind);

  for (auto& v : p) v = std::clamp(v, 0.0, 1.0);
  return seq;
}

ReferenceEstimate reference_estimate(double p_true, std::size_t sample_count, RandomStream& rng) {
  if (!is_prob(p_true)) throw std::invalid_argument("probability outside [0, 1]");
  if (sample_count == 0) throw std::invalid_argument("sample_count must be at least 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < sample_count; ++i) hits += rng.bernoulli(p_true);
  return {static_cast<double>(hits) / static_cast<double>(sample_count), sample_count};
}

ReferenceEstimate reference_estimate(double p_true, std::size_t sample_count, std::uint64_t seed) {
  RandomStream rng(derive_key(seed, StreamPurpose::Reference), 0);
  return reference_estimate(p_true, sample_count, rng);
}

} // namespace dbb
