#include "dbb/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace dbb {

using nlohmann::json;

SweepSpec SweepSection::to_spec(std::uint64_t seed) const {
  SweepSpec s;
  s.trajectory = trajectory;
  s.lambdas = lambdas;
  s.group_sizes = group_sizes;
  s.replications = replications;
  s.eval_epochs = eval_epochs;
  s.base_seed = seed;
  s.prior_alpha = prior_alpha;
  s.prior_beta = prior_beta;
  s.reference = reference;
  s.reference_samples = reference_samples;
  return s;
}

TrainerConfig TrainSection::to_trainer(std::uint64_t seed) const {
  TrainerConfig c;
  c.n_rollouts = n_rollouts;
  c.epochs = epochs;
  c.minibatch_size = minibatch_size;
  c.updates_per_batch = updates_per_batch;
  c.learning_rate = learning_rate;
  c.lambda = lambda;
  c.scheme = AdvantageScheme::parse(scheme);
  c.clip_low = clip_low;
  c.clip_high = clip_high;
  c.prior_alpha = prior_alpha;
  c.prior_beta = prior_beta;
  c.seed = seed;
  return c;
}

SweepSection ExperimentConfig::default_sweep_lambda() {
  SweepSection s;
  s.lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  s.group_sizes = {8};
  return s;
}

SweepSection ExperimentConfig::default_sweep_n() {
  SweepSection s;
  // Closed-form MSE minimizer of the default trajectory at n = 8.
  s.lambdas = {0.6};
  s.group_sizes = {2, 4, 8, 16, 32, 64, 128};
  return s;
}

McValidateSection ExperimentConfig::default_mc_validate() {
  McValidateSection s;
  s.trajectories = {
      {drift::Stationary{0.5}, 10},
      {drift::Step{0.2, 0.8, 6}, 10},
      {drift::LinearRamp{0.2, 0.8}, 10},
      {drift::Logistic{5.5, 0.8, 0.1, 0.9}, 10},
      {drift::BoundedRandomWalk{0.5, 0.05}, 10},
  };
  return s;
}

namespace {

// Reads fields out of a JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  void get_optional(const char* key, std::optional<double>& out) {
    seen_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
    } else if (it->is_number()) {
      out = it->get<double>();
    } else {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

private:
  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json drift_to_json(const DriftModel& m) {
  json j{{"kind", std::string(m.kind_name())}, {"length", m.length}};
  std::visit(Overloaded{
                 [&](const drift::Stationary& d) { j["p"] = d.p; },
                 [&](const drift::LinearRamp& d) {
                   j["p_start"] = d.p_start;
                   j["p_end"] = d.p_end;
                 },
                 [&](const drift::Logistic& d) {
                   j["midpoint"] = d.midpoint;
                   j["rate"] = d.rate;
                   j["floor"] = d.floor;
                   j["ceiling"] = d.ceiling;
                 },
                 [&](const drift::Step& d) {
                   j["p_before"] = d.p_before;
                   j["p_after"] = d.p_after;
                   j["change_epoch"] = d.change_epoch;
                 },
                 [&](const drift::BoundedRandomWalk& d) {
                   j["p_start"] = d.p_start;
                   j["step_std"] = d.step_std;
                 },
             },
             m.kind);
  return j;
}

DriftModel drift_from_json(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  std::string kind = "logistic";
  DriftModel m;
  r.get("kind", kind);
  r.get("length", m.length);
  if (kind == "stationary") {
    drift::Stationary d;
    r.get("p", d.p);
    m.kind = d;
  } else if (kind == "linear_ramp") {
    drift::LinearRamp d;
    r.get("p_start", d.p_start);
    r.get("p_end", d.p_end);
    m.kind = d;
  } else if (kind == "logistic") {
    drift::Logistic d;
    r.get("midpoint", d.midpoint);
    r.get("rate", d.rate);
    r.get("floor", d.floor);
    r.get("ceiling", d.ceiling);
    m.kind = d;
  } else if (kind == "step") {
    drift::Step d;
    r.get("p_before", d.p_before);
    r.get("p_after", d.p_after);
    r.get("change_epoch", d.change_epoch);
    m.kind = d;
  } else if (kind == "random_walk") {
    drift::BoundedRandomWalk d;
    r.get("p_start", d.p_start);
    r.get("step_std", d.step_std);
    m.kind = d;
  } else {
    throw ConfigError(where + ".kind: unknown drift kind '" + kind + "'");
  }
  r.finish();
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return m;
}

json sweep_to_json(const SweepSection& s) {
  return json{{"trajectory", drift_to_json(s.trajectory)},
              {"lambdas", s.lambdas},
              {"group_sizes", s.group_sizes},
              {"replications", s.replications},
              {"eval_epochs", s.eval_epochs},
              {"prior_alpha", s.prior_alpha},
              {"prior_beta", s.prior_beta},
              {"reference", s.reference == ReferenceMode::Truth ? "truth" : "sampled"},
              {"reference_samples", s.reference_samples}};
}

void sweep_from_json(const json& j, SweepSection& s, const std::string& where) {
  ObjectReader r(j, where);
  if (const auto* t = r.child("trajectory")) s.trajectory = drift_from_json(*t, where + ".trajectory");
  r.get("lambdas", s.lambdas);
  r.get("group_sizes", s.group_sizes);
  r.get("replications", s.replications);
  r.get("eval_epochs", s.eval_epochs);
  r.get("prior_alpha", s.prior_alpha);
  r.get("prior_beta", s.prior_beta);
  std::string reference = s.reference == ReferenceMode::Truth ? "truth" : "sampled";
  r.get("reference", reference);
  if (reference == "truth") {
    s.reference = ReferenceMode::Truth;
  } else if (reference == "sampled") {
    s.reference = ReferenceMode::Sampled;
  } else {
    throw ConfigError(where + ".reference: expected 'truth' or 'sampled'");
  }
  r.get("reference_samples", s.reference_samples);
  r.finish();
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json traj = json::array();
  for (const auto& t : c.mc_validate.trajectories) traj.push_back(drift_to_json(t));
  const auto& m = c.mc_validate;
  const auto& t = c.train;
  json j{
      {"seed", c.seed},
      {"output_path", c.output_path},
      {"worker_count", c.worker_count},
      {"sweep_lambda", sweep_to_json(c.sweep_lambda)},
      {"sweep_n", sweep_to_json(c.sweep_n)},
      {"mc_validate",
       {{"trajectories", traj},
        {"lambdas", m.lambdas},
        {"group_size", m.group_size},
        {"replications", m.replications},
        {"epoch", m.epoch},
        {"stderr_tolerance", m.stderr_tolerance},
        {"pass_fraction", m.pass_fraction}}},
      {"train",
       {{"prompts", t.prompts},
        {"k_answers", t.k_answers},
        {"n_rollouts", t.n_rollouts},
        {"epochs", t.epochs},
        {"minibatch_size", t.minibatch_size},
        {"updates_per_batch", t.updates_per_batch},
        {"learning_rate", t.learning_rate},
        {"lambda", t.lambda},
        {"scheme", t.scheme},
        {"clip_low", optional_to_json(t.clip_low)},
        {"clip_high", optional_to_json(t.clip_high)},
        {"prior_alpha", t.prior_alpha},
        {"prior_beta", t.prior_beta},
        {"state_in", t.state_in},
        {"state_out", t.state_out}}},
  };
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig c;
  ObjectReader r(j, "config");
  r.get("seed", c.seed);
  r.get("output_path", c.output_path);
  r.get("worker_count", c.worker_count);
  if (const auto* s = r.child("sweep_lambda")) sweep_from_json(*s, c.sweep_lambda, "sweep_lambda");
  if (const auto* s = r.child("sweep_n")) sweep_from_json(*s, c.sweep_n, "sweep_n");
  if (const auto* s = r.child("mc_validate")) {
    auto& m = c.mc_validate;
    ObjectReader mr(*s, "mc_validate");
    if (const auto* ts = mr.child("trajectories")) {
      if (!ts->is_array()) throw ConfigError("mc_validate.trajectories: expected an array");
      m.trajectories.clear();
      for (std::size_t i = 0; i < ts->size(); ++i)
        m.trajectories.push_back(drift_from_json((*ts)[i], "mc_validate.trajectories[" + std::to_string(i) + "]"));
    }
    mr.get("lambdas", m.lambdas);
    mr.get("group_size", m.group_size);
    mr.get("replications", m.replications);
    mr.get("epoch", m.epoch);
    mr.get("stderr_tolerance", m.stderr_tolerance);
    mr.get("pass_fraction", m.pass_fraction);
    mr.finish();
  }
  if (const auto* s = r.child("train")) {
    auto& t = c.train;
    ObjectReader tr(*s, "train");
    tr.get("prompts", t.prompts);
    tr.get("k_answers", t.k_answers);
    tr.get("n_rollouts", t.n_rollouts);
    tr.get("epochs", t.epochs);
    tr.get("minibatch_size", t.minibatch_size);
    tr.get("updates_per_batch", t.updates_per_batch);
    tr.get("learning_rate", t.learning_rate);
    tr.get("lambda", t.lambda);
    tr.get("scheme", t.scheme);
    tr.get_optional("clip_low", t.clip_low);
    tr.get_optional("clip_high", t.clip_high);
    tr.get("prior_alpha", t.prior_alpha);
    tr.get("prior_beta", t.prior_beta);
    tr.get("state_in", t.state_in);
    tr.get("state_out", t.state_out);
    tr.finish();
  }
  r.finish();
  if (c.worker_count < 1) throw ConfigError("worker_count must be at least 1");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

} // namespace dbb
