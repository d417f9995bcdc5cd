#pragma once

#include <cmath>

#include "qbounds/liouvillian.hpp"
#include "qbounds/model.hpp"
#include "qbounds/monitoring.hpp"
#include "qbounds/thermo.hpp"
#include "qbounds/trajectory.hpp"

namespace qbounds::testing {

inline LindbladModel reference_qubit(double drive = 1.0) { return build_driven_qubit({0.0, drive, 1.0, 1.0}); }

inline LindbladModel reference_maser(double drive = 1.0) {
  return build_three_level_maser({0.0, drive, 1.0, 1.0, 5.0, 0.01});
}

// rates(mu, sigma) for sigma -> mu.
inline LindbladModel two_state(double a, double b) {
  Eigen::MatrixXd r(2, 2);
  r << 0.0, b, a, 0.0;
  Eigen::MatrixXi g(2, 2);
  g << 0, 1, 0, 0;
  return build_classical_network(r, g);
}

inline LindbladModel three_state_cycle() {
  Eigen::MatrixXd r(3, 3);
  r << 0.0, 1.0, 0.5,
       2.0, 0.0, 1.5,
       0.7, 0.4, 0.0;
  Eigen::MatrixXi g(3, 3);
  g << 0, 0, 1,
       0, 0, 1,
       1, 1, 0;
  return build_classical_network(r, g);
}

inline std::vector<LindbladModel> builtin_models() {
  return {reference_qubit(), reference_maser(), three_state_cycle(), two_state(1.0, 2.0)};
}

inline ObservableDef weights(std::string name, std::vector<double> w) { return {std::move(name), std::move(w)}; }

// ln p(record) under H + eps dH and L_k -> sqrt(1 + 2 c_k eps) L_k, up to the
// eps-independent measure factor: a product of no-jump propagators and jumps.
inline double log_likelihood(const LindbladModel& m, const ParameterImprint& p, double eps,
                             const TrajectoryRecord& r) {
  const Operator h = m.hamiltonian + eps * p.hamiltonian_derivative;
  Operator heff = h;
  std::vector<Operator> jumps;
  for (const auto& c : m.channels) {
    jumps.push_back(std::sqrt(1.0 + 2.0 * p.jump_coeff[c.id] * eps) * c.op);
    heff -= 0.5 * kI * jumps.back().adjoint() * jumps.back();
  }
  StateVector psi = r.initial_state;
  double t = 0.0;
  double lp = 0.0;
  for (const auto& e : r.events) {
    psi = jumps[e.channel] * (nonunitary_propagator(heff, e.time - t) * psi);
    const double n = psi.norm();
    lp += 2.0 * std::log(n);
    psi /= n;
    t = e.time;
  }
  psi = nonunitary_propagator(heff, r.tau - t) * psi;
  return lp + 2.0 * std::log(psi.norm());
}

inline double spectral_gap(const Superoperator& l) {
  const auto s = spectral_decomposition(l);
  double gap = 1e300;
  for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
    if (j != s.stationary_index) gap = std::min(gap, -s.eigenvalues(j).real());
  }
  return gap;
}

// <Phi> over [0, tau] from rho_ss under the deformed generator
// -i(1 + phi)[H, .] + sum_k (1 + 2 c_k phi) D[L_k], with jumps counted at the
// deformed rates.
inline double deformed_mean(const LindbladModel& m, const Operator& rho_ss, const ObservableDef& def,
                            const std::vector<double>& c, double phi, double tau) {
  std::vector<double> scale(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) scale[k] = 1.0 + 2.0 * c[k] * phi;
  const Superoperator l = scaled_liouvillian(m, 1.0 + phi, scale);
  const auto v = integrate_along(l, rho_ss, 0.0, tau, [&](const Operator& rho) {
    Eigen::VectorXd out(1);
    out(0) = 0.0;
    for (const auto& ch : m.channels) {
      out(0) += def.weights[ch.id] * scale[ch.id] * (ch.op * rho * ch.op.adjoint()).trace().real();
    }
    return out;
  }, 1e-12);
  return v(0);
}

// d<Phi>/dphi - <Phi> grows linearly in tau; its slope is the long-time
// correction per unit time.
inline double correction_rate_fd(const LindbladModel& m, const Operator& rho_ss, const ObservableDef& def,
                                 const std::vector<double>& c) {
  const double gap = spectral_gap(build_liouvillian(m));
  const double t1 = 50.0 / gap, t2 = 100.0 / gap, h = 1e-4;
  auto star = [&](double tau) {
    return (deformed_mean(m, rho_ss, def, c, h, tau) - deformed_mean(m, rho_ss, def, c, -h, tau)) / (2 * h) -
           deformed_mean(m, rho_ss, def, c, 0.0, tau);
  };
  return (star(t2) - star(t1)) / (t2 - t1);
}

inline std::vector<double> group_coeff(const LindbladModel& m, int group, const std::vector<double>& per_channel) {
  std::vector<double> c(m.channels.size(), 0.0);
  for (const auto& ch : m.channels) {
    if (group < 0 || ch.group == group) c[ch.id] = per_channel[ch.id] / 2.0;
  }
  return c;
}

}  // namespace qbounds::testing
