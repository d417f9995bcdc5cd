// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "qbounds/errors.hpp"
#include "qbounds/runner.hpp"

using namespace qbounds;
using namespace qbounds::testing;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  std::string name;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

RunConfig config(const std::string& file) { return load_config(std::filesystem::path(QBOUNDS_CONFIG_DIR) / file); }

struct Point {
  std::string model;
  double drive;
  PointResult result;
};

bool zero_mean_scores(const PointResult& r, const std::string& label) {
  bool ok = true;
  for (int p = 0; p < 3; ++p) {
    const auto& m = r.fisher.score_means[p];
    const bool good = std::abs(m.value) < 3 * m.se;
    std::printf("  %-18s score %d mean %+.4g  se %.3g%s\n", label.c_str(), p, m.value, m.se, good ? "" : "  <--");
    ok = ok && good;
  }
  return ok;
}

double worst_score_error(const PointResult& r, BoundKind kind) {
  const auto scheme = make_scheme(r.model, kind, r.rho_ss);
  double worst = 0.0;
  for (std::size_t i = 0; i < 100 && i < r.records.size(); ++i) {
    for (int a = 0; a < scheme.size(); ++a) {
      const double h = 1e-5;
      const double fd = (log_likelihood(r.model, scheme.params[a], h, r.records[i]) -
                         log_likelihood(r.model, scheme.params[a], -h, r.records[i])) / (2 * h);
      const double s = r.scores(static_cast<Eigen::Index>(i), a);
      worst = std::max(worst, std::abs(s - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  return worst;
}

Verdict deterministic_oracles() {
  const auto start = Clock::now();
  double drazin = 0.0;
  for (const auto& m : builtin_models()) {
    const auto l = build_liouvillian(m);
    const Operator rho = steady_state(l);
    const auto lp = drazin_inverse(l, rho);
    const Eigen::MatrixXcd p = vectorize(rho) * trace_functional(m.dim()).adjoint();
    const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(p.rows(), p.cols()) - p;
    drazin = std::max<double>({drazin, max_abs(lp.matrix * l.matrix - q), max_abs(l.matrix * lp.matrix - q),
                               max_abs(l.matrix * lp.matrix * l.matrix - l.matrix)});
  }

  const auto maser = reference_maser();
  const Operator maser_ss = steady_state(build_liouvillian(maser));
  const auto e = entropy_production_components(maser, maser_ss, 10.0);
  const double balance = std::abs(e.total() - e.system - e.environment) / std::abs(e.system + e.environment);

  double correction = 0.0;
  const double tau = 10.0;
  for (const auto& m : {reference_qubit(), maser, three_state_cycle()}) {
    const Operator rho = steady_state(build_liouvillian(m));
    std::array<ObservableDef, 2> defs;
    for (int a = 0; a < 2; ++a) {
      std::vector<double> w(m.channels.size(), 0.0);
      for (int k : m.group_members(a)) w[k] = 1.0;
      defs[a] = weights("N", w);
    }
    const auto c = correction_term_kur(m, rho, defs, tau);
    const std::vector<double> one(m.channels.size(), 1.0);
    for (int a = 0; a < 2; ++a) {
      const double fd = correction_rate_fd(m, rho, defs[a], group_coeff(m, a, one));
      correction = std::max(correction, std::abs(c[a].star / tau - fd) / std::abs(fd));
    }
  }
  {
    const std::array<ObservableDef, 2> defs{weights("J1", {1, -1, 0, 0}), weights("J2", {0, 0, 1, -1})};
    const auto l = current_coefficients(maser, maser_ss);
    const auto c = correction_term_tur(maser, maser_ss, defs, tau);
    const auto s = single_correction_terms(maser, maser_ss, defs, BoundKind::tur, tau);
    for (int a = 0; a < 2; ++a) {
      const double fd = correction_rate_fd(maser, maser_ss, defs[a], group_coeff(maser, a, l));
      const double fds = correction_rate_fd(maser, maser_ss, defs[a], group_coeff(maser, -1, l));
      correction = std::max({correction, std::abs(c[a].star / tau - fd) / std::abs(fd),
                             std::abs(s[a].star / tau - fds) / std::abs(fds)});
    }
  }

  double propagator = 0.0;
  for (const auto& m : {reference_qubit(), maser}) {
    const auto scheme = make_scheme(m, BoundKind::kur);
    std::vector<Operator> d;
    for (const auto& p : scheme.params) d.push_back(p.heff_derivative);
    const Operator heff = m.effective_hamiltonian();
    for (double t : {0.3, 1.0, 2.5}) {
      const auto r = propagator_and_derivative(heff, d, t);
      for (std::size_t a = 0; a < d.size(); ++a) {
        const double h = 1e-5;
        const Operator fd =
            (nonunitary_propagator(heff + h * d[a], t) - nonunitary_propagator(heff - h * d[a], t)) / (2 * h);
        propagator = std::max(propagator, max_abs(r.du[a] - fd));
      }
    }
  }
  const double seconds = since(start);
  std::printf("  drazin residual %.2e  entropy balance %.2e  correction rel %.2e  propagator %.2e  (%.1f s)\n",
              drazin, balance, correction, propagator, seconds);
  const bool pass = drazin < 1e-9 && balance < 1e-6 && correction < 1e-2 && propagator < 1e-7 && seconds < 60.0;
  return {"deterministic oracles", pass,
          fmt("drazin %.1e, balance %.1e, corrections %.1e, dU %.1e", drazin, balance, correction, propagator)};
}

}  // namespace

int main() {
  std::vector<Verdict> verdicts;
  const auto t0 = Clock::now();

  std::printf("classical cycle\n");
  auto cycle = config("classical_cycle.yaml");
  cycle.trajectories = 20000;
  cycle.tau = 10.0;
  const PointResult classical = run_point(cycle);
  {
    const auto& f = classical.fisher;
    const double z12 = f(0, 1).value / f(0, 1).se;
    const double z1 = (f(0, 0).value - classical.thermo.activity[0]) / f(0, 0).se;
    const double z2 = (f(1, 1).value - classical.thermo.activity[1]) / f(1, 1).se;
    std::printf("  F12 %.4g (z %.2f)  F11 %.4g vs A1 %.4g (z %.2f)  F22 %.4g vs A2 %.4g (z %.2f)  %.1f s\n",
                f(0, 1).value, z12, f(0, 0).value, classical.thermo.activity[0], z1, f(1, 1).value,
                classical.thermo.activity[1], z2, classical.seconds);
    const bool pass = std::abs(z12) < 3 && std::abs(z1) < 3 && std::abs(z2) < 3 && classical.seconds < 120.0;
    verdicts.push_back({"classical diagonality", pass,
                        fmt("z12 %.2f, z11 %.2f, z22 %.2f, %.0f s", z12, z1, z2, classical.seconds)});
  }

  const std::vector<double> drives{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<Point> points;
  const auto sweep_start = Clock::now();
  for (const char* file : {"qubit_point.yaml", "maser_heat_sweep.yaml"}) {
    RunConfig base = config(file);
    base.sweep.reset();
    base.trajectories = 50000;
    base.tau = 10.0;
    for (double drive : drives) {
      RunConfig c = base;
      set_parameter(c, "drive", drive);
      points.push_back({c.model.type, drive, run_point(c)});
      const auto& b = points.back().result.report;
      std::printf("  %-6s drive %-5g lhs %.4g  k12 %.4g  ratio %.3f  margin %+.3g (se %.2g)  gap diff %+.3g (se %.2g)"
                  "  corr %+.3f  %.0f s\n",
                  c.model.type.c_str(), drive, b.lhs_det.value, b.k12.value, b.ratio.value, b.margin.value,
                  b.margin.se, b.gap_difference.value, b.gap_difference.se, b.corr.value,
                  points.back().result.seconds);
      std::fflush(stdout);
    }
  }
  const double sweep_seconds = since(sweep_start);

  {
    bool pass = sweep_seconds < 1800.0;
    double worst = 1e300;
    for (const auto& p : points) {
      const auto& b = p.result.report;
      pass = pass && b.k12_applicable && b.lhs_det.value >= b.k12.value - 3 * b.margin.se;
      worst = std::min(worst, b.margin.value / b.margin.se);
    }
    verdicts.push_back({"bound validity", pass, fmt("min margin/se %.2f, %.0f s total", worst, sweep_seconds)});
  }
  {
    const double low = points.front().result.report.ratio.value;
    const double high = points[drives.size() - 1].result.report.ratio.value;
    const bool pass = low >= 0.85 && low <= 1.5 && low < high;
    verdicts.push_back({"qubit saturation trend", pass, fmt("ratio %.3f at drive 0.25, %.3f at drive 4", low, high)});
  }
  {
    bool in_band = true;
    bool correlated = true;
    double rmin = 1e300, rmax = -1e300, cmin = 1e300;
    for (std::size_t i = drives.size(); i < points.size(); ++i) {
      const auto& b = points[i].result.report;
      in_band = in_band && b.ratio.value >= 0.8 && b.ratio.value <= 1.4;
      // Hot and cold heat currents have opposite signs per engine cycle.
      correlated = correlated && std::abs(b.corr.value) > 0.99;
      rmin = std::min(rmin, b.ratio.value);
      rmax = std::max(rmax, b.ratio.value);
      cmin = std::min(cmin, std::abs(b.corr.value));
    }
    verdicts.push_back({"maser heat saturation", in_band && correlated,
                        fmt("ratio in [%.3g, %.3g], min |corr| %.3f", rmin, rmax, cmin)});
  }
  {
    bool pass = true;
    double worst = -1e300;
    for (const auto& p : points) {
      const auto& g = p.result.report.gap_difference;
      pass = pass && g.value <= 3 * g.se;
      worst = std::max(worst, g.value / g.se);
    }
    verdicts.push_back({"tightness comparison", pass, fmt("max gap difference / se %+.2f", worst)});
  }

  std::printf("deterministic oracles\n");
  verdicts.push_back(deterministic_oracles());

  std::printf("estimator soundness\n");
  {
    const Point& qubit = points[2];
    const Point& maser = points[drives.size() + 2];
    bool pass = zero_mean_scores(qubit.result, "qubit kur") && zero_mean_scores(maser.result, "maser kur");
    pass = zero_mean_scores(classical, "cycle kur") && pass;

    RunConfig heat = config("maser_heat_sweep.yaml");
    heat.sweep.reset();
    heat.bound_kind = BoundKind::tur;
    heat.trajectories = 20000;
    set_parameter(heat, "drive", 1.0);
    const PointResult maser_tur = run_point(heat);
    pass = zero_mean_scores(maser_tur, "maser tur") && pass;

    double worst = 0.0;
    worst = std::max(worst, worst_score_error(qubit.result, BoundKind::kur));
    worst = std::max(worst, worst_score_error(maser.result, BoundKind::kur));
    worst = std::max(worst, worst_score_error(maser_tur, BoundKind::tur));
    worst = std::max(worst, worst_score_error(classical, BoundKind::kur));
    std::printf("  worst score vs log-likelihood FD %.2e\n", worst);
    pass = pass && worst < 1e-4;
    verdicts.push_back({"estimator soundness", pass, fmt("score FD error %.1e", worst)});
  }

  std::printf("\n");
  int failed = 0;
  for (const auto& v : verdicts) {
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", v.name.c_str(), v.detail.c_str());
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed (%.0f s)\n", failed, verdicts.size(), since(t0));
  return failed;
}
