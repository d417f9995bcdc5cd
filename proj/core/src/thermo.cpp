#include "qbounds/thermo.hpp"

#include <cmath>

#include "qbounds/errors.hpp"
#include "qbounds/liouvillian.hpp"

namespace qbounds {

namespace {

constexpr int kMinIntervals = 32;
constexpr int kMaxIntervals = 1 << 20;

void require_group_support(const std::array<ObservableDef, 2>& defs, const LindbladModel& model) {
  for (int a = 0; a < 2; ++a) {
    const int g = support_group(defs[a], model);
    if (g >= 0 && g != a) {
      throw ModelError("observable '" + defs[a].name + "' must be supported on channel group " + std::to_string(a + 1));
    }
  }
}

void require_currents(const std::array<ObservableDef, 2>& defs, const LindbladModel& model) {
  for (const auto& d : defs) {
    if (!is_current(d, model)) {
      throw ModelError("observable '" + d.name + "' is not a current (w_k = -w_k' on every reverse pair)");
    }
  }
}

std::vector<double> group_scale(const LindbladModel& model, int group, const std::vector<double>& factor) {
  std::vector<double> s(model.channels.size(), 0.0);
  for (const auto& c : model.channels) {
    if (group < 0 || c.group == group) s[c.id] = factor.empty() ? 1.0 : factor[c.id];
  }
  return s;
}

Operator hermitian_part(const Operator& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

Eigen::VectorXd integrate_along(const Superoperator& liouvillian, const Operator& rho0, double t0, double tau,
                                const std::function<Eigen::VectorXd(const Operator&)>& integrand,
                                double rel_tol) {
  if (!(tau > 0.0)) throw Error("invalid_tau", "tau must be > 0");
  if (!(t0 >= 0.0 && t0 < tau)) throw Error("invalid_tau", "integration start must lie in [0, tau)");
  const LiouvilleVector start = vectorize(t0 > 0.0 ? propagate(liouvillian, rho0, t0) : rho0);
  const double span = tau - t0;

  auto simpson = [&](int n) {
    const double h = span / n;
    const Eigen::MatrixXcd step = expm(liouvillian.matrix * h);
    LiouvilleVector v = start;
    Eigen::VectorXd sum = integrand(hermitian_part(unvectorize(v)));
    for (int i = 1; i <= n; ++i) {
      v = step * v;
      const double w = i == n ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      sum += w * integrand(hermitian_part(unvectorize(v)));
    }
    return Eigen::VectorXd(sum * h / 3.0);
  };

  int n = kMinIntervals;
  Eigen::VectorXd prev = simpson(n);
  while (n < kMaxIntervals) {
    n *= 2;
    Eigen::VectorXd cur = simpson(n);
    const bool done = ((cur - prev).array().abs() <= rel_tol * cur.array().abs() + 1e-14).all();
    prev = std::move(cur);
    if (done) break;
  }
  return prev;
}

std::array<double, 2> dynamical_activities(const LindbladModel& model, const Operator& rho0, double tau) {
  const Superoperator l = build_liouvillian(model);
  const Eigen::VectorXd a = integrate_along(l, rho0, 0.0, tau, [&](const Operator& rho) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2);
    for (const auto& c : model.channels) {
      if (c.group < 2) out(c.group) += (c.op * rho * c.op.adjoint()).trace().real();
    }
    return out;
  });
  return {a(0), a(1)};
}

double dynamical_activity(const LindbladModel& model, const Operator& rho0, double tau, int group) {
  if (group < 0 || group > 1) throw ModelError("group index must be 0 or 1");
  return dynamical_activities(model, rho0, tau)[group];
}

EntropyProduction entropy_production_components(const LindbladModel& model, const Operator& rho0, double tau) {
  for (const auto& c : model.channels) {
    if (!c.inert && !c.entropy_jump) {
      throw ModelError("entropy production needs an entropy jump on channel " + std::to_string(c.id));
    }
  }
  const Superoperator l = build_liouvillian(model);
  EntropyProduction out;
  Operator first = rho0;
  try {
    (void)matrix_log(rho0);
  } catch (const SingularState&) {
    out.t0 = 1e-3 * tau;
    first = hermitian_part(propagate(l, rho0, out.t0));
    (void)matrix_log(first);  // still singular: let it propagate
  }

  const Eigen::VectorXd v = integrate_along(l, rho0, out.t0, tau, [&](const Operator& rho) {
    const Operator log_rho = matrix_log(rho);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(3);
    for (const auto& c : model.channels) {
      if (c.inert) continue;
      const Operator lr = c.op * rho;
      const double rate = (lr * c.op.adjoint()).trace().real();
      const Complex comm = (lr * (c.op.adjoint() * log_rho - log_rho * c.op.adjoint())).trace();
      r(c.group) += *c.entropy_jump * rate - comm.real();
      r(2) += *c.entropy_jump * rate;
    }
    return r;
  });
  out.sigma = {v(0), v(1)};
  out.environment = v(2);
  const Operator last = hermitian_part(propagate(l, rho0, tau));
  out.system = von_neumann_entropy(last) - von_neumann_entropy(first);
  return out;
}

Correction drazin_correction(const LindbladModel& model, const Operator& rho_ss, const Superoperator& drazin,
                             const ObservableDef& def, const Superoperator& generator, double tau) {
  const Superoperator jump = weighted_jump_superoperator(model, def.weights);
  const LiouvilleVector one = trace_functional(model.dim());
  const LiouvilleVector ss = vectorize(rho_ss);
  Correction c;
  c.star = -tau * (one.transpose() * (jump.matrix * (drazin.matrix * (generator.matrix * ss))))(0).real();
  const std::vector<double> r = channel_rates(model, rho_ss);
  double scale = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    c.mean += tau * def.weights[k] * r[k];
    scale += tau * std::abs(def.weights[k]) * r[k];
  }
  c.defined = std::abs(c.mean) > 1e-12 * std::max(1.0, scale);
  if (c.defined) c.ratio = c.star / c.mean;
  return c;
}

std::array<Correction, 2> correction_term_kur(const LindbladModel& model, const Operator& rho_ss,
                                              const std::array<ObservableDef, 2>& defs, double tau) {
  require_group_support(defs, model);
  const LiouvillianParts parts = build_liouvillian_parts(model);
  const Superoperator drazin = drazin_inverse(parts.full, rho_ss);
  return {drazin_correction(model, rho_ss, drazin, defs[0], parts.group[0], tau),
          drazin_correction(model, rho_ss, drazin, defs[1], parts.group[1], tau)};
}

std::array<Correction, 2> correction_term_tur(const LindbladModel& model, const Operator& rho_ss,
                                              const std::array<ObservableDef, 2>& defs, double tau) {
  require_group_support(defs, model);
  require_currents(defs, model);
  const Superoperator l = build_liouvillian(model);
  const Superoperator drazin = drazin_inverse(l, rho_ss);
  const std::vector<double> coeff = current_coefficients(model, rho_ss);
  std::array<Correction, 2> out;
  for (int a = 0; a < 2; ++a) {
    const Superoperator g = scaled_liouvillian(model, 1.0, group_scale(model, a, coeff));
    out[a] = drazin_correction(model, rho_ss, drazin, defs[a], g, tau);
  }
  return out;
}

std::array<Correction, 2> single_correction_terms(const LindbladModel& model, const Operator& rho_ss,
                                                  const std::array<ObservableDef, 2>& defs, BoundKind kind,
                                                  double tau) {
  const Superoperator l = build_liouvillian(model);
  const Superoperator drazin = drazin_inverse(l, rho_ss);
  Superoperator g = l;
  if (kind == BoundKind::tur) {
    require_currents(defs, model);
    g = scaled_liouvillian(model, 1.0, group_scale(model, -1, current_coefficients(model, rho_ss)));
  }
  return {drazin_correction(model, rho_ss, drazin, defs[0], g, tau),
          drazin_correction(model, rho_ss, drazin, defs[1], g, tau)};
}

double commutator_correction(const LindbladModel& model, const Operator& rho_ss, const ObservableDef& def,
                             int group, BoundKind kind, double tau) {
  const Superoperator l = build_liouvillian(model);
  const Superoperator drazin = drazin_inverse(l, rho_ss);
  const int d = model.dim();
  Operator w = Operator::Zero(d, d);
  for (const auto& c : model.channels) {
    if (c.group == group) w += def.weights[c.id] * (c.op.adjoint() * c.op);
  }
  // tr{W L^+ X} = tr{Wt^dag X} with vec(Wt) = (L^+)^dag vec(W); the time
  // integral of W(t) is -Wt^dag since L^+ = -int exp(Lt)(1 - P) dt.
  const Operator wt = unvectorize(drazin.matrix.adjoint() * vectorize(w));
  const Operator wbar = -wt.adjoint();
  const std::vector<double> f = kind == BoundKind::tur ? current_coefficients(model, rho_ss)
                                                       : std::vector<double>(model.channels.size(), 1.0);
  Complex sum = 0.0;
  for (const auto& c : model.channels) {
    if (c.group == group || f[c.id] == 0.0) continue;
    const Operator& lk = c.op;
    const Operator ld = lk.adjoint();
    const Operator x = (ld * wbar - wbar * ld) * lk + ld * (wbar * lk - lk * wbar);
    sum += f[c.id] * (x * rho_ss).trace();
  }
  return -0.5 * tau * sum.real();
}

ThermoReport compute_thermo(const LindbladModel& model, const Operator& rho0, const Operator& rho_ss,
                            const std::array<ObservableDef, 2>& defs, BoundKind kind, double tau) {
  ThermoReport r;
  r.kind = kind;
  r.tau = tau;
  r.activity = dynamical_activities(model, rho0, tau);
  r.activity_total = r.activity[0] + r.activity[1];
  r.stationary_start = max_abs(rho0 - rho_ss) < 1e-9;

  bool has_entropy = true;
  for (const auto& c : model.channels) has_entropy = has_entropy && (c.inert || c.entropy_jump.has_value());
  if (has_entropy) {
    try {
      r.entropy = entropy_production_components(model, rho0, tau);
      if (r.entropy->t0 > 0.0) r.notes.push_back("entropy production integrated from t0 = 1e-3 tau (rank-deficient initial state)");
    } catch (const SingularState& e) {
      r.notes.push_back(std::string("entropy production unavailable: ") + e.what());
    }
  }
  if (model.all_channels_paired()) r.l_ss = current_coefficients(model, rho_ss);

  if (kind == BoundKind::kur) {
    r.correction = correction_term_kur(model, rho_ss, defs, tau);
  } else {
    r.correction = correction_term_tur(model, rho_ss, defs, tau);
  }
  r.single_correction = single_correction_terms(model, rho_ss, defs, kind, tau);
  if (!r.stationary_start) {
    r.notes.push_back("correction terms use the long-time steady-state form; the O(tau^0) transient of a non-stationary start is neglected");
  }
  return r;
}

}  // namespace qbounds
