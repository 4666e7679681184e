#include "dbb/commands.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dbb/io.hpp"
#include "dbb/simulator.hpp"
#include "dbb/trainer.hpp"

namespace dbb::cli {

namespace {

using io::format_shortest;

std::string output_path(const ExperimentConfig& c, const char* fallback) {
  return c.output_path.empty() ? std::string(fallback) : c.output_path;
}

std::vector<SweepRecord> checked_sweep(const SweepSection& section, const ExperimentConfig& c) {
  const auto spec = section.to_spec(c.seed);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return run_sweep(spec, c.worker_count);
}

void write_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  io::write_sweep_csv(os, records);
  io::write_file(path, os.str());
}

} // namespace

int cmd_sweep_lambda(const ExperimentConfig& c, std::ostream& out) {
  const auto records = checked_sweep(c.sweep_lambda, c);
  const auto path = output_path(c, "sweep-lambda.csv");
  write_csv(path, records);
  out << "wrote " << records.size() << " rows to " << path << '\n';

  const auto summary = epoch_average(records);
  for (auto n : c.sweep_lambda.group_sizes) {
    if (c.sweep_lambda.lambdas.size() < 2) {
      out << "n=" << n << ": single lambda, no argmin\n";
      continue;
    }
    const auto emp = argmin_lambda(summary, 0, MseSource::Empirical, n);
    const auto closed = argmin_lambda(summary, 0, MseSource::Closed, n);
    double point = 0.0;
    for (const auto& s : summary)
      if (s.n == n) point = s.mse_point_closed;
    out << "n=" << n << " epoch-averaged argmin lambda: empirical " << format_shortest(emp.first)
        << " (mse " << format_shortest(emp.second) << "), closed form " << format_shortest(closed.first)
        << " (mse " << format_shortest(closed.second) << "); point estimator mse " << format_shortest(point)
        << '\n';
  }
  return kSuccess;
}

int cmd_sweep_n(const ExperimentConfig& c, std::ostream& out) {
  const auto records = checked_sweep(c.sweep_n, c);
  const auto path = output_path(c, "sweep-n.csv");
  write_csv(path, records);
  out << "wrote " << records.size() << " rows to " << path << '\n';

  for (const auto& s : epoch_average(records)) {
    out << "lambda=" << format_shortest(s.lambda) << " n=" << s.n
        << " epoch-averaged point-minus-dbb mse: closed form "
        << format_shortest(s.mse_point_closed - s.mse_dbb_closed) << ", empirical "
        << format_shortest(s.mse_point_empirical - s.mse_dbb_empirical);
    if (s.point_variance_degenerate) out << " [n=1: point sample variance degenerate]";
    out << '\n';
  }
  return kSuccess;
}

int cmd_mc_validate(const ExperimentConfig& c, std::ostream& out) {
  const auto& m = c.mc_validate;
  if (m.trajectories.empty()) throw ConfigError("mc_validate.trajectories is empty");
  if (!(m.pass_fraction >= 0.0 && m.pass_fraction <= 1.0)) throw ConfigError("pass_fraction outside [0, 1]");

  std::ostringstream report;
  std::size_t total = 0;
  std::size_t dbb_pass = 0;
  std::size_t point_pass = 0;
  std::vector<SweepRecord> all;
  // Absolute slack for points whose squared error is deterministic (stderr 0).
  constexpr double kSlack = 1e-12;

  for (const auto& traj : m.trajectories) {
    SweepSpec spec;
    spec.trajectory = traj;
    spec.lambdas = m.lambdas;
    spec.group_sizes = {m.group_size};
    spec.replications = m.replications;
    spec.eval_epochs = {m.epoch == 0 ? traj.length : m.epoch};
    spec.base_seed = c.seed;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    for (const auto& r : run_sweep(spec, c.worker_count)) {
      const double dz = std::abs(r.mse_dbb_empirical - r.mse_dbb_closed);
      const double pz = std::abs(r.mse_point_empirical - r.mse_point_closed);
      const bool dbb_ok = dz <= m.stderr_tolerance * r.stderr_dbb + kSlack;
      const bool point_ok = pz <= m.stderr_tolerance * r.stderr_point + kSlack;
      ++total;
      dbb_pass += dbb_ok;
      point_pass += point_ok;
      report << traj.kind_name() << " lambda=" << format_shortest(r.lambda) << " n=" << r.n << " epoch=" << r.epoch
             << " dbb " << format_shortest(r.mse_dbb_empirical) << " vs " << format_shortest(r.mse_dbb_closed)
             << " (stderr " << format_shortest(r.stderr_dbb) << ") " << (dbb_ok ? "PASS" : "FAIL") << "; point "
             << format_shortest(r.mse_point_empirical) << " vs " << format_shortest(r.mse_point_closed)
             << " (stderr " << format_shortest(r.stderr_point) << ") " << (point_ok ? "PASS" : "FAIL") << '\n';
      all.push_back(r);
    }
  }

  const double dbb_rate = static_cast<double>(dbb_pass) / static_cast<double>(total);
  const double point_rate = static_cast<double>(point_pass) / static_cast<double>(total);
  const bool ok = dbb_rate >= m.pass_fraction && point_rate >= m.pass_fraction;
  report << "dbb agreement " << dbb_pass << '/' << total << ", point agreement " << point_pass << '/' << total
         << " (required fraction " << format_shortest(m.pass_fraction) << "): " << (ok ? "PASS" : "FAIL") << '\n';

  const auto path = output_path(c, "mc-validate.txt");
  io::write_file(path, report.str());
  out << report.str();
  return ok ? kSuccess : kValidationFailure;
}

int cmd_train(const ExperimentConfig& c, std::ostream& out) {
  const auto& t = c.train;
  TrainerConfig tc;
  try {
    tc = t.to_trainer(c.seed);
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (t.prompts == 0) throw ConfigError("train.prompts must be at least 1");
  if (t.k_answers < 2) throw ConfigError("train.k_answers must be at least 2");

  std::optional<io::PosteriorSnapshot> resume;
  if (!t.state_in.empty()) {
    try {
      resume = io::load_snapshot(t.state_in);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (resume->lambda != t.lambda) throw ConfigError("snapshot lambda mismatch");
  }

  const auto tasks = make_tasks(t.prompts, t.k_answers, c.seed);
  TrainResult result;
  try {
    result = train(tasks, tc, resume ? &resume->records : nullptr);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const auto metrics_path = output_path(c, "train-metrics.csv");
  const auto state_path = t.state_out.empty() ? metrics_path + ".snapshot" : t.state_out;
  std::ostringstream os;
  io::write_metrics_csv(os, result.metrics.steps);
  io::write_file(metrics_path, os.str());
  io::save_snapshot(state_path, io::PosteriorSnapshot{1, t.lambda, result.posteriors});

  const auto& m = result.metrics;
  out << "scheme " << tc.scheme.name() << ": " << m.steps.size() << " steps, " << m.groups << " groups, "
      << m.zero_variance_groups << " zero-variance, " << m.collapsed_groups << " collapsed, "
      << m.nonfinite_advantages << " non-finite advantages\n";
  for (std::size_t e = 0; e < m.epoch_mean_reward.size(); ++e)
    out << "epoch " << e + 1 << " mean reward " << format_shortest(m.epoch_mean_reward[e]) << '\n';
  out << "wrote " << metrics_path << " and " << state_path << '\n';
  return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discounted Beta-Bernoulli reward estimation experiments", "dbb"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<int> workers;
  std::optional<std::string> scheme;
  std::optional<double> lambda;
  std::optional<std::string> state_in;
  std::optional<std::string> state_out;

  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--seed", seed, "Override the global seed");
  app.add_option("--out", out_path, "Output file");
  app.add_option("--workers", workers, "Simulator worker threads")->check(CLI::PositiveNumber);
  app.add_option("--scheme", scheme, "Advantage scheme for train")
      ->check(CLI::IsMember({"grpo-point", "grpo-dbb", "drgrpo-point", "drgrpo-dbb"}));
  app.add_option("--lambda", lambda, "Discount factor (train) or single-lambda grid (sweeps)");
  app.add_option("--state-in", state_in, "Posterior snapshot to resume from");
  app.add_option("--state-out", state_out, "Where to write the final posterior snapshot");

  auto* sweep_lambda = app.add_subcommand("sweep-lambda", "MSE as a function of the discount factor");
  auto* sweep_n = app.add_subcommand("sweep-n", "MSE as a function of the group size");
  auto* mc_validate = app.add_subcommand("mc-validate", "Check closed-form MSE against Monte Carlo");
  auto* train_cmd = app.add_subcommand("train", "Toy bandit training loop");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    ExperimentConfig c;
    if (!config_path.empty()) c = load_config(config_path);
    if (seed) c.seed = *seed;
    if (out_path) c.output_path = *out_path;
    if (workers) c.worker_count = *workers;
    if (scheme) c.train.scheme = *scheme;
    if (state_in) c.train.state_in = *state_in;
    if (state_out) c.train.state_out = *state_out;
    if (lambda) {
      c.train.lambda = *lambda;
      c.sweep_lambda.lambdas = {*lambda};
      c.sweep_n.lambdas = {*lambda};
      c.mc_validate.lambdas = {*lambda};
    }

    if (sweep_lambda->parsed()) return cmd_sweep_lambda(c, out);
    if (sweep_n->parsed()) return cmd_sweep_n(c, out);
    if (mc_validate->parsed()) return cmd_mc_validate(c, out);
    if (train_cmd->parsed()) return cmd_train(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

} // namespace dbb::cli
