#include "qbounds/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

const std::set<std::string> kTopKeys = {"model", "observables", "bound", "tau", "trajectories", "seed",
                                        "bootstrap", "sampler", "sweep", "output_dir", "workers",
                                        "dump_trajectories"};

template <class T>
T read(const YAML::Node& node, const std::string& key, T fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

double& model_field(ModelConfig& m, const std::string& name) {
  if (m.type == "qubit") {
    if (name == "detuning") return m.qubit.detuning;
    if (name == "drive") return m.qubit.drive;
    if (name == "gamma") return m.qubit.gamma;
    if (name == "occupation") return m.qubit.occupation;
  } else if (m.type == "maser") {
    if (name == "detuning") return m.maser.detuning;
    if (name == "drive") return m.maser.drive;
    if (name == "gamma_hot") return m.maser.gamma_hot;
    if (name == "gamma_cold") return m.maser.gamma_cold;
    if (name == "occupation_hot") return m.maser.occupation_hot;
    if (name == "occupation_cold") return m.maser.occupation_cold;
    if (name == "gamma") return m.maser.gamma_hot;  // see set_parameter
  }
  throw ConfigError("model type '" + m.type + "' has no parameter '" + name + "'");
}

Eigen::MatrixXd read_matrix(const YAML::Node& node, const std::string& what) {
  if (!node || !node.IsSequence() || node.size() == 0) throw ConfigError(what + " must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(node.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const YAML::Node row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(what + " must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)].as<double>();
  }
  return m;
}

ModelConfig read_model(const YAML::Node& node) {
  if (!node || !node.IsMap()) throw ConfigError("'model' section is required");
  ModelConfig m;
  m.type = read<std::string>(node, "type", "qubit");
  m.initial = read<std::string>(node, "initial", "default");
  if (m.type == "qubit") {
    m.qubit.detuning = read(node, "detuning", 0.0);
    m.qubit.drive = read(node, "drive", 1.0);
    m.qubit.gamma = read(node, "gamma", 1.0);
    m.qubit.occupation = read(node, "occupation", 1.0);
  } else if (m.type == "maser") {
    const double gamma = read(node, "gamma", 1.0);
    m.maser.detuning = read(node, "detuning", 0.0);
    m.maser.drive = read(node, "drive", 1.0);
    m.maser.gamma_hot = read(node, "gamma_hot", gamma);
    m.maser.gamma_cold = read(node, "gamma_cold", gamma);
    m.maser.occupation_hot = read(node, "occupation_hot", 5.0);
    m.maser.occupation_cold = read(node, "occupation_cold", 0.01);
  } else if (m.type == "classical") {
    m.rates = read_matrix(node["rates"], "model.rates");
    const Eigen::MatrixXd g = read_matrix(node["groups"], "model.groups");
    if (g.rows() != m.rates.rows()) throw ConfigError("model.groups must match model.rates in size");
    m.groups = Eigen::MatrixXi::Zero(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        if (m.rates(i, j) == 0.0) continue;
        if (g(i, j) != 1.0 && g(i, j) != 2.0) throw ConfigError("model.groups entries must be 1 or 2 on every non-zero rate");
        m.groups(i, j) = static_cast<int>(g(i, j)) - 1;
      }
    }
  } else {
    throw ConfigError("model.type must be qubit, maser or classical, got '" + m.type + "'");
  }
  return m;
}

// A weight list, or a map from channel label / 0-based id to weight.
ObservableDef read_observable(const YAML::Node& node, const LindbladModel& model, int index) {
  ObservableDef def;
  def.name = "phi" + std::to_string(index + 1);
  YAML::Node weights = node;
  if (node.IsMap()) {
    def.name = read<std::string>(node, "name", def.name);
    weights = node["weights"];
  }
  def.weights.assign(model.channels.size(), 0.0);
  if (weights.IsSequence()) {
    if (weights.size() != model.channels.size()) {
      throw ConfigError("observable '" + def.name + "' needs " + std::to_string(model.channels.size()) + " weights");
    }
    for (std::size_t k = 0; k < weights.size(); ++k) def.weights[k] = weights[k].as<double>();
  } else if (weights.IsMap()) {
    for (const auto& kv : weights) {
      const auto key = kv.first.as<std::string>();
      // Labels win over ids: the maser labels "1" and "1'" sit at ids 0 and 1.
      int id = -1;
      for (const auto& c : model.channels) {
        if (c.label == key) id = c.id;
      }
      for (const auto& c : model.channels) {
        if (id < 0 && std::to_string(c.id) == key) id = c.id;
      }
      if (id < 0) throw ConfigError("observable '" + def.name + "' refers to unknown channel '" + key + "'");
      def.weights[id] = kv.second.as<double>();
    }
  } else {
    throw ConfigError("observable '" + def.name + "' needs a weight list or map");
  }
  return def;
}

SweepConfig read_sweep(const YAML::Node& node) {
  SweepConfig s;
  s.parameter = read<std::string>(node, "parameter", "drive");
  if (!node["values"]) {
    s.values = default_sweep_grid();
    s.default_grid = true;
    return s;
  }
  if (!node["values"].IsSequence()) throw ConfigError("sweep.values must be a list");
  for (const auto& v : node["values"]) s.values.push_back(v.as<double>());
  return s;
}

}  // namespace

std::vector<double> default_sweep_grid() {
  std::vector<double> v(12);
  for (int i = 0; i < 12; ++i) v[i] = 0.25 * std::pow(32.0, i / 11.0);
  return v;
}

void RunConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be finite and > 0");
  if (trajectories < 100) throw ConfigError("trajectories must be >= 100");
  if (bootstrap_resamples < 2) throw ConfigError("bootstrap must be >= 2");
  try {
    sampler.check();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (sweep) {
    if (sweep->values.empty()) throw ConfigError("sweep.values is empty");
    for (std::size_t i = 0; i < sweep->values.size(); ++i) {
      if (!std::isfinite(sweep->values[i])) throw ConfigError("sweep values must be finite");
      if (i > 0 && !(sweep->values[i] > sweep->values[i - 1])) throw ConfigError("sweep values must be sorted ascending");
    }
  }
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kTopKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  RunConfig c;
  c.model = read_model(root["model"]);
  const LindbladModel model = build_model(c.model);
  const YAML::Node obs = root["observables"];
  if (!obs || !obs.IsSequence() || obs.size() != 2) throw ConfigError("'observables' must list exactly two observables");
  for (int a = 0; a < 2; ++a) c.observables[a] = read_observable(obs[a], model, a);

  c.bound_kind = parse_bound_kind(read<std::string>(root, "bound", "kur"));
  c.tau = read(root, "tau", c.tau);
  c.trajectories = read<std::size_t>(root, "trajectories", c.trajectories);
  c.master_seed = read<std::uint64_t>(root, "seed", c.master_seed);
  c.bootstrap_resamples = read<std::size_t>(root, "bootstrap", c.bootstrap_resamples);
  c.output_dir = read<std::string>(root, "output_dir", "");
  c.workers = read<unsigned>(root, "workers", 0);
  c.dump_trajectories = read(root, "dump_trajectories", false);
  if (const YAML::Node s = root["sampler"]) {
    const auto method = read<std::string>(s, "method", "gillespie");
    if (method == "gillespie") {
      c.sampler.method = SamplerMethod::gillespie;
    } else if (method == "fixed_dt") {
      c.sampler.method = SamplerMethod::fixed_dt;
    } else {
      throw ConfigError("sampler.method must be gillespie or fixed_dt");
    }
    c.sampler.dt = read(s, "dt", c.sampler.dt);
    c.sampler.root_tol = read(s, "root_tol", c.sampler.root_tol);
    c.sampler.max_jumps = read<std::size_t>(s, "max_jumps", c.sampler.max_jumps);
  }
  if (const YAML::Node s = root["sweep"]) c.sweep = read_sweep(s);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

LindbladModel build_model(const ModelConfig& config) {
  if (config.type == "qubit") return build_driven_qubit(config.qubit);
  if (config.type == "maser") return build_three_level_maser(config.maser);
  if (config.type == "classical") return build_classical_network(config.rates, config.groups);
  throw ConfigError("unknown model type '" + config.type + "'");
}

void set_parameter(RunConfig& config, const std::string& name, double value) {
  if (name == "tau") {
    config.tau = value;
    return;
  }
  if (config.model.type == "maser" && name == "gamma") {
    config.model.maser.gamma_hot = value;
    config.model.maser.gamma_cold = value;
    return;
  }
  model_field(config.model, name) = value;
}

}  // namespace qbounds
