#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbounds/model.hpp"
#include "qbounds/monitoring.hpp"
#include "qbounds/trajectory.hpp"

namespace qbounds {

struct ModelConfig {
  std::string type = "qubit";  // qubit | maser | classical
  QubitParams qubit;
  MaserParams maser;
  Eigen::MatrixXd rates;   // classical: rates(mu, sigma) for sigma -> mu
  Eigen::MatrixXi groups;  // classical: 0-based group per transition
  // "default" (qubit |0>, maser |e2>, classical state 0; steady state for tur),
  // "steady", or "basis:<i>".
  std::string initial = "default";
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;
  bool default_grid = false;
};

struct RunConfig {
  ModelConfig model;
  std::array<ObservableDef, 2> observables;
  BoundKind bound_kind = BoundKind::kur;
  double tau = 10.0;
  std::size_t trajectories = 50'000;
  std::uint64_t master_seed = 1;
  std::size_t bootstrap_resamples = 200;
  SamplerConfig sampler;
  std::optional<SweepConfig> sweep;
  std::string output_dir;
  unsigned workers = 0;  // 0: one per logical core
  bool dump_trajectories = false;

  // Throws ConfigError.
  void validate() const;
};

// Ω grid used when a sweep names a parameter but gives no values.
std::vector<double> default_sweep_grid();

// YAML text; JSON is accepted as the flow-style subset.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

LindbladModel build_model(const ModelConfig& config);

// Sets a sweepable scalar: any model parameter name (drive, detuning, gamma,
// occupation, gamma_hot, gamma_cold, occupation_hot, occupation_cold) or tau.
void set_parameter(RunConfig& config, const std::string& name, double value);

}  // namespace qbounds
