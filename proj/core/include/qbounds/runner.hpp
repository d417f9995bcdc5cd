#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qbounds/bounds.hpp"
#include "qbounds/config.hpp"

namespace qbounds {

// Everything produced for one parameter point.
struct PointResult {
  LindbladModel model;
  Operator rho_ss;
  Operator rho0;
  std::vector<TrajectoryRecord> records;
  std::vector<ObservableSample> samples;
  Eigen::MatrixXd scores;  // M x 3: group 1, group 2, global
  ThermoReport thermo;
  FisherMatrixEstimate fisher;
  CovarianceEstimate stats;
  BoundReport report;
  double seconds = 0.0;
};

// Bootstrap indices are drawn from this seed so that they depend on the master
// seed only.
std::uint64_t bootstrap_seed(std::uint64_t master_seed);

InitialCondition initial_condition(const RunConfig& config, const LindbladModel& model, const Operator& rho_ss);

PointResult run_point(const RunConfig& config);

// Classical check: F_12 = 0 and F_aa = A_a as z-scores.
struct ClassicalCheck {
  Eigen::Matrix2d fisher;
  Eigen::Matrix2d fisher_se;
  std::array<double, 2> activity{0.0, 0.0};
  double z_offdiag = 0.0;
  std::array<double, 2> z_diag{0.0, 0.0};
  bool pass = false;
};
ClassicalCheck classical_check(const RunConfig& config, double z_limit = 4.0);

// Writes summary.json, samples.csv, provenance.json (and trajectories.txt when
// requested) into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config, const PointResult& result,
                       const std::string& config_text);

// Runs every sweep value, writing sweep.csv row by row; failed points get a
// marker row. Returns the number of failed points.
int run_sweep(const std::filesystem::path& dir, const RunConfig& config, const std::string& config_text,
              const std::function<void(double, const PointResult*)>& progress = {});

}  // namespace qbounds
