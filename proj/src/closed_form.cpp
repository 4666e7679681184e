#include "dbb/closed_form.hpp"

#include <stdexcept>

#include "dbb/estimators.hpp"

namespace dbb {

namespace {

void check_grid(std::size_t tau, double lambda, std::size_t n) {
  check_lambda(lambda);
  if (tau == 0) throw std::invalid_argument("tau must be at least 1");
  if (n == 0) throw std::invalid_argument("empty group size");
}

// Unnormalized weights u_0..u_tau with u_0 = lambda^tau·prior_mass and
// u_k = n·lambda^(tau-k); every power of lambda comes from repeated
// multiplication so underflow only ever zeroes the oldest terms.
std::vector<double> raw_weights(std::size_t tau, double lambda, std::size_t n, double prior_mass) {
  std::vector<double> u;
  u.reserve(tau + 1);
  u.push_back(prior_mass);
  for (std::size_t k = 1; k <= tau; ++k) {
    for (auto& w : u) w *= lambda;
    u.push_back(static_cast<double>(n));
  }
  return u;
}

} // namespace

void TrueProbSequence::validate() const {
  if (probs.empty()) throw std::invalid_argument("empty probability sequence");
  for (double p : probs)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
  if (!(prior_mean >= 0.0 && prior_mean <= 1.0)) throw std::invalid_argument("prior mean outside [0, 1]");
  if (!(prior_mass > 0.0)) throw std::invalid_argument("prior mass must be positive");
}

double total_mass(std::size_t tau, double lambda, std::size_t n, double prior_mass) {
  check_grid(tau, lambda, n);
  double h = prior_mass;
  for (std::size_t k = 1; k <= tau; ++k) h = lambda * h + static_cast<double>(n);
  return h;
}

std::vector<double> weights(std::size_t tau, double lambda, std::size_t n, double prior_mass) {
  const double h = total_mass(tau, lambda, n, prior_mass);
  auto c = raw_weights(tau, lambda, n, prior_mass);
  for (auto& w : c) w /= h;
  return c;
}

ClosedFormStats dbb_closed_form(const TrueProbSequence& seq, double lambda, std::size_t n) {
  seq.validate();
  const std::size_t tau = seq.length();
  ClosedFormStats out;
  out.total_mass = total_mass(tau, lambda, n, seq.prior_mass);
  out.weights = weights(tau, lambda, n, seq.prior_mass);

  const double p_tau = seq.probs.back();
  auto p_at = [&](std::size_t k) { return k == 0 ? seq.prior_mean : seq.probs[k - 1]; };

  for (std::size_t k = 0; k <= tau; ++k) out.expectation += out.weights[k] * p_at(k);
  for (std::size_t k = 0; k < tau; ++k) out.bias += out.weights[k] * (p_at(k) - p_tau);

  // sum_k lambda^(2(tau-k))·n·p_k(1-p_k), accumulated forward.
  const auto nd = static_cast<double>(n);
  double spread = 0.0;
  for (double p : seq.probs) spread = lambda * lambda * spread + nd * p * (1.0 - p);
  out.variance = spread / (out.total_mass * out.total_mass);
  out.mse = out.bias * out.bias + out.variance;
  return out;
}

std::vector<ClosedFormStats> dbb_closed_form_path(const TrueProbSequence& seq, double lambda,
                                                  std::size_t n) {
  seq.validate();
  check_grid(seq.length(), lambda, n);
  const auto nd = static_cast<double>(n);
  const double lambda2 = lambda * lambda;

  std::vector<ClosedFormStats> out;
  out.reserve(seq.length());
  double h = seq.prior_mass;
  double expected_alpha = seq.prior_mass * seq.prior_mean;
  double spread = 0.0;
  for (double p : seq.probs) {
    h = lambda * h + nd;
    expected_alpha = lambda * expected_alpha + nd * p;
    spread = lambda2 * spread + nd * p * (1.0 - p);
    ClosedFormStats s;
    s.total_mass = h;
    s.expectation = expected_alpha / h;
    s.bias = s.expectation - p;
    s.variance = spread / (h * h);
    s.mse = s.bias * s.bias + s.variance;
    out.push_back(std::move(s));
  }
  return out;
}

double point_mse(double p, std::size_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
  if (n == 0) throw std::invalid_argument("empty group size");
  return p * (1.0 - p) / static_cast<double>(n);
}

} // namespace dbb
