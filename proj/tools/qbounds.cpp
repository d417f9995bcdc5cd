// qbounds command-line tool: run, sweep, classical-check, steady-state, validate.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbounds/errors.hpp"
#include "qbounds/liouvillian.hpp"
#include "qbounds/output.hpp"
#include "qbounds/runner.hpp"

namespace {

using namespace qbounds;

constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
  std::optional<double> tau;
  std::optional<unsigned> workers;
  std::string format = "json";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load(const Options& o, std::string& text) {
  text = read_file(o.config_path);
  RunConfig c = parse_config(text);
  if (o.seed) c.master_seed = *o.seed;
  if (o.trajectories) c.trajectories = *o.trajectories;
  if (o.tau) c.tau = *o.tau;
  if (o.workers) c.workers = *o.workers;
  c.validate();
  return c;
}

std::filesystem::path output_dir(const Options& o, const RunConfig& c) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("QBOUNDS_OUT_DIR"); env && *env) return env;
  return "qbounds_out";
}

int cmd_run(const Options& o) {
  std::string text;
  const RunConfig c = load(o, text);
  const PointResult r = run_point(c);
  write_run_outputs(output_dir(o, c), c, r, text);
  if (o.format == "csv") {
    std::cout << sweep_csv_header() << '\n' << sweep_csv_row(std::nan(""), r.report) << '\n';
  } else {
    std::cout << summary_json(c, r) << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  std::string text;
  const RunConfig c = load(o, text);
  if (!c.sweep) throw ConfigError("the sweep command needs a 'sweep' section");
  const auto dir = output_dir(o, c);
  const int failures = run_sweep(dir, c, text, [&c](double value, const PointResult* r) {
    if (r) {
      std::fprintf(stderr, "%s = %g: lhs %.4g  k12 %.4g  (%.1f s)\n", c.sweep->parameter.c_str(), value, r->report.lhs_det.value,
                   r->report.k12.value, r->seconds);
    } else {
      std::fprintf(stderr, "%s = %g: failed\n", c.sweep->parameter.c_str(), value);
    }
  });
  if (o.format == "csv") {
    std::ifstream in(dir / "sweep.csv");
    std::cout << in.rdbuf();
  } else {
    std::ifstream in(dir / "sweep_summaries.jsonl");
    std::cout << in.rdbuf();
  }
  return failures == 0 ? 0 : kExitError;
}

int cmd_classical_check(const Options& o) {
  std::string text;
  const RunConfig c = load(o, text);
  const ClassicalCheck k = classical_check(c);
  if (o.format == "csv") {
    std::cout << "F11,F12,F22,F11_se,F12_se,F22_se,A1,A2,z12,z11,z22,pass\n"
              << format_number(k.fisher(0, 0)) << ',' << format_number(k.fisher(0, 1)) << ','
              << format_number(k.fisher(1, 1)) << ',' << format_number(k.fisher_se(0, 0)) << ','
              << format_number(k.fisher_se(0, 1)) << ',' << format_number(k.fisher_se(1, 1)) << ','
              << format_number(k.activity[0]) << ',' << format_number(k.activity[1]) << ','
              << format_number(k.z_offdiag) << ',' << format_number(k.z_diag[0]) << ','
              << format_number(k.z_diag[1]) << ',' << (k.pass ? "true" : "false") << '\n';
  } else {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    auto mat = [&](const Eigen::Matrix2d& m) {
      return nlohmann::json{{num(m(0, 0)), num(m(0, 1))}, {num(m(1, 0)), num(m(1, 1))}};
    };
    const nlohmann::json j = {{"fisher", mat(k.fisher)},
                              {"fisher_se", mat(k.fisher_se)},
                              {"activity", {num(k.activity[0]), num(k.activity[1])}},
                              {"z_offdiag", num(k.z_offdiag)},
                              {"z_diag", {num(k.z_diag[0]), num(k.z_diag[1])}},
                              {"pass", k.pass}};
    std::cout << j.dump() << '\n';
  }
  return k.pass ? 0 : kExitCheckFailed;
}

int cmd_steady_state(const Options& o) {
  std::string text;
  const RunConfig c = load(o, text);
  const LindbladModel model = build_model(c.model);
  const Operator rho = steady_state(build_liouvillian(model));
  if (o.format == "csv") {
    std::cout << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      for (Eigen::Index j = 0; j < rho.cols(); ++j) {
        std::cout << i << ',' << j << ',' << format_number(rho(i, j).real()) << ','
                  << format_number(rho(i, j).imag()) << '\n';
      }
    }
  } else {
    std::cout << steady_state_json(model, rho) << '\n';
  }
  return 0;
}

int cmd_validate(const Options& o) {
  std::string text;
  const RunConfig c = load(o, text);
  const LindbladModel model = build_model(c.model);
  const ValidationReport report = validate(
      model, c.bound_kind == BoundKind::tur ? ValidationScope::thermodynamic : ValidationScope::general);
  std::cout << validation_json(report) << '\n';
  return report.ok() ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiparameter uncertainty bounds for quantum jump trajectories"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_run_flags) {
    sub->add_option("--config", o.config_path, "Config file (YAML or JSON)")->required();
    sub->add_option("--format", o.format, "Console output format")->check(CLI::IsMember({"csv", "json"}));
    if (!with_run_flags) return;
    sub->add_option("--out", o.out_dir, "Output directory (default: config output_dir, then $QBOUNDS_OUT_DIR)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--trajectories", o.trajectories, "Trajectories per point");
    sub->add_option("--tau", o.tau, "Observation time");
    sub->add_option("--workers", o.workers, "Worker threads (default: logical cores)");
  };

  std::function<int(const Options&)> handler;
  auto bind = [&](CLI::App* sub, int (*fn)(const Options&)) { sub->callback([&handler, fn] { handler = fn; }); };

  auto* run = app.add_subcommand("run", "Run one parameter point");
  add_common(run, true);
  bind(run, cmd_run);
  auto* sweep = app.add_subcommand("sweep", "Run every value of the config sweep");
  add_common(sweep, true);
  bind(sweep, cmd_sweep);
  auto* check = app.add_subcommand("classical-check", "Check the diagonal Fisher matrix of a classical network");
  add_common(check, true);
  bind(check, cmd_classical_check);
  auto* steady = app.add_subcommand("steady-state", "Print the steady state and current coefficients");
  add_common(steady, false);
  bind(steady, cmd_steady_state);
  auto* lint = app.add_subcommand("validate", "Lint the model");
  add_common(lint, false);
  bind(lint, cmd_validate);

  CLI11_PARSE(app, argc, argv);
  try {
    return handler(o);
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()) << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal_error", e.what()) << '\n';
    return kExitError;
  }
}
