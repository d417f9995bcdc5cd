#include "qbounds/runner.hpp"

#include <chrono>
#include <fstream>

#include "qbounds/errors.hpp"
#include "qbounds/liouvillian.hpp"
#include "qbounds/output.hpp"
#include "qbounds/parallel.hpp"

namespace qbounds {

namespace {

unsigned worker_count(const RunConfig& config) {
  return config.workers > 0 ? config.workers : default_worker_count();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  return out;
}

}  // namespace

std::uint64_t bootstrap_seed(std::uint64_t master_seed) { return mix64(master_seed ^ 0xb0075742a5eedULL); }

InitialCondition initial_condition(const RunConfig& config, const LindbladModel& model, const Operator& rho_ss) {
  const std::string& init = config.model.initial;
  if (init == "steady" || (init == "default" && config.bound_kind == BoundKind::tur)) {
    return InitialCondition::from_density(rho_ss);
  }
  if (init == "default") {
    if (config.model.type == "maser") return InitialCondition::basis(model.dim(), 1);
    return InitialCondition::basis(model.dim(), 0);
  }
  if (init.rfind("basis:", 0) == 0) {
    int index = -1;
    try {
      index = std::stoi(init.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("model.initial: cannot read basis index in '" + init + "'");
    }
    if (index < 0 || index >= model.dim()) throw ConfigError("model.initial: basis index out of range");
    return InitialCondition::basis(model.dim(), index);
  }
  throw ConfigError("model.initial must be default, steady or basis:<i>, got '" + init + "'");
}

PointResult run_point(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  PointResult r;
  r.model = build_model(config.model);
  const BoundKind kind = config.bound_kind;
  require_valid(r.model, kind == BoundKind::tur ? ValidationScope::thermodynamic : ValidationScope::general);
  for (int a = 0; a < 2; ++a) {
    const int g = support_group(config.observables[a], r.model);
    if (g >= 0 && g != a) {
      throw ConfigError("observable " + std::to_string(a + 1) + " must be supported on channel group " + std::to_string(a + 1));
    }
  }

  r.rho_ss = steady_state(build_liouvillian(r.model));
  const InitialCondition initial = initial_condition(config, r.model, r.rho_ss);
  r.rho0 = initial.density();
  const unsigned workers = worker_count(config);

  r.records = run_ensemble(r.model, initial, config.tau, config.trajectories, config.master_seed, config.sampler,
                           workers);
  const FisherMonitor monitor(r.model, make_scheme(r.model, kind, r.rho_ss));
  r.scores = ensemble_scores(monitor, r.records, workers);
  r.samples.reserve(r.records.size());
  for (const auto& rec : r.records) r.samples.push_back(evaluate_observables(rec, r.model, config.observables));

  const Bootstrap bootstrap(config.bootstrap_resamples, bootstrap_seed(config.master_seed));
  r.fisher = estimate_fisher(r.scores, bootstrap);
  r.stats = estimate_statistics(r.samples, bootstrap);
  r.thermo = compute_thermo(r.model, r.rho0, r.rho_ss, config.observables, kind, config.tau);
  r.report = assemble_bounds(kind, r.thermo, r.fisher, r.stats, config.tau);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ClassicalCheck classical_check(const RunConfig& config, double z_limit) {
  config.validate();
  const LindbladModel model = build_model(config.model);
  if (!model.classical) throw Error("not_classical", "classical-check needs a classical rate-network model");
  require_valid(model);
  const Operator rho_ss = steady_state(build_liouvillian(model));
  const InitialCondition initial = initial_condition(config, model, rho_ss);
  const unsigned workers = worker_count(config);
  const auto records = run_ensemble(model, initial, config.tau, config.trajectories, config.master_seed,
                                    config.sampler, workers);
  const FisherMonitor monitor(model, make_scheme(model, BoundKind::kur));
  const Eigen::MatrixXd scores = ensemble_scores(monitor, records, workers);
  const FisherMatrixEstimate f =
      estimate_fisher(scores, Bootstrap(config.bootstrap_resamples, bootstrap_seed(config.master_seed)));

  ClassicalCheck c;
  c.fisher = f.values().topLeftCorner(2, 2);
  c.fisher_se = f.std_errors().topLeftCorner(2, 2);
  c.activity = dynamical_activities(model, initial.density(), config.tau);
  c.z_offdiag = c.fisher(0, 1) / c.fisher_se(0, 1);
  for (int a = 0; a < 2; ++a) c.z_diag[a] = (c.fisher(a, a) - c.activity[a]) / c.fisher_se(a, a);
  c.pass = std::abs(c.z_offdiag) <= z_limit && std::abs(c.z_diag[0]) <= z_limit && std::abs(c.z_diag[1]) <= z_limit;
  return c;
}

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config, const PointResult& result,
                       const std::string& config_text) {
  std::filesystem::create_directories(dir);
  open_output(dir / "summary.json") << summary_json(config, result) << '\n';
  {
    auto out = open_output(dir / "samples.csv");
    write_samples_csv(out, result);
  }
  open_output(dir / "provenance.json") << provenance_json(config, config_text) << '\n';
  if (config.dump_trajectories) {
    auto out = open_output(dir / "trajectories.txt");
    write_trajectory_dump(out, result.records);
  }
}

int run_sweep(const std::filesystem::path& dir, const RunConfig& config, const std::string& config_text,
              const std::function<void(double, const PointResult*)>& progress) {
  if (!config.sweep) throw ConfigError("the sweep command needs a 'sweep' section");
  config.validate();
  std::filesystem::create_directories(dir);
  auto csv = open_output(dir / "sweep.csv");
  csv << sweep_csv_header() << '\n';
  csv.flush();
  auto summaries = open_output(dir / "sweep_summaries.jsonl");
  int failures = 0;
  for (double value : config.sweep->values) {
    RunConfig point = config;
    point.sweep.reset();
    try {
      set_parameter(point, config.sweep->parameter, value);
      const PointResult r = run_point(point);
      csv << sweep_csv_row(value, r.report) << '\n';
      summaries << summary_json(point, r, -1) << '\n';
      if (progress) progress(value, &r);
    } catch (const Error& e) {
      ++failures;
      csv << sweep_failure_row(value, e.code()) << '\n';
      summaries << error_json(e.code(), e.what()) << '\n';
      if (progress) progress(value, nullptr);
    }
    csv.flush();
    summaries.flush();
  }
  open_output(dir / "provenance.json") << provenance_json(config, config_text) << '\n';
  return failures;
}

}  // namespace qbounds
