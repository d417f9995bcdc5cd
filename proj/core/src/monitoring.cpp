#include "qbounds/monitoring.hpp"

#include <cmath>

#include "qbounds/errors.hpp"
#include "qbounds/liouvillian.hpp"
#include "qbounds/parallel.hpp"

namespace qbounds {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kOverflowGuard = 1e3;

ParameterImprint make_imprint(const LindbladModel& model, std::string name, std::vector<double> coeff) {
  ParameterImprint p;
  p.name = std::move(name);
  p.hamiltonian_derivative = model.hamiltonian;
  p.heff_derivative = model.hamiltonian;
  for (const auto& c : model.channels) {
    if (coeff[c.id] != 0.0) p.heff_derivative -= kI * coeff[c.id] * (c.op.adjoint() * c.op);
  }
  p.jump_coeff = std::move(coeff);
  return p;
}

}  // namespace

const char* to_string(BoundKind kind) { return kind == BoundKind::kur ? "kur" : "tur"; }

BoundKind parse_bound_kind(const std::string& text) {
  if (text == "kur") return BoundKind::kur;
  if (text == "tur") return BoundKind::tur;
  throw ConfigError("bound kind must be 'kur' or 'tur', got '" + text + "'");
}

ImprintingScheme make_scheme(const LindbladModel& model, BoundKind kind, const std::optional<Operator>& rho_ss) {
  require_valid(model, kind == BoundKind::tur ? ValidationScope::thermodynamic : ValidationScope::general);
  if (model.group_count != 2) throw ModelError("imprinting schemes need exactly two channel groups");

  ImprintingScheme s;
  s.kind = kind;
  std::vector<double> factor(model.channels.size(), 1.0);
  if (kind == BoundKind::tur) {
    if (!rho_ss) throw ModelError("the current imprinting needs the steady state");
    s.l_ss = current_coefficients(model, *rho_ss);
    factor = s.l_ss;
  }
  const std::size_t n = model.channels.size();
  for (int g = 0; g < 2; ++g) {
    std::vector<double> c(n, 0.0);
    for (const auto& ch : model.channels) {
      if (ch.group == g) c[ch.id] = 0.5 * factor[ch.id];
    }
    s.params.push_back(make_imprint(model, "group" + std::to_string(g + 1), std::move(c)));
  }
  std::vector<double> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = 0.5 * factor[k];
  s.params.push_back(make_imprint(model, "global", std::move(all)));
  return s;
}

PropagatorDerivative propagator_and_derivative(const Operator& heff, std::span<const Operator> dheff, double t) {
  if (t < 0.0) throw Error("negative_time", "propagator_and_derivative: t must be >= 0");
  const Eigen::Index d = heff.rows();
  const auto p = static_cast<Eigen::Index>(dheff.size());
  PropagatorDerivative out;
  if (t == 0.0) {
    out.u = Operator::Identity(d, d);
    out.du.assign(dheff.size(), Operator::Zero(d, d));
    return out;
  }
  if (t * heff.cwiseAbs().rowwise().sum().maxCoeff() > kOverflowGuard) {
    throw MonitoringError("propagator_and_derivative: t * |H_eff| exceeds 1e3");
  }
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero((p + 1) * d, (p + 1) * d);
  for (Eigen::Index b = 0; b <= p; ++b) gen.block(b * d, b * d, d, d) = -kI * t * heff;
  for (Eigen::Index a = 0; a < p; ++a) {
    if (dheff[a].rows() != d) throw DimensionError("propagator_and_derivative: derivative shape mismatch");
    gen.block(0, (a + 1) * d, d, d) = -kI * t * dheff[a];
  }
  const Eigen::MatrixXcd e = expm(gen);
  out.u = e.topLeftCorner(d, d);
  for (Eigen::Index a = 0; a < p; ++a) out.du.push_back(e.block(0, (a + 1) * d, d, d));
  return out;
}

std::vector<double> MonitoringState::scores() const {
  std::vector<double> s(xi.size());
  for (std::size_t a = 0; a < xi.size(); ++a) s[a] = xi[a].trace().real();
  return s;
}

FisherMonitor::FisherMonitor(const LindbladModel& model, ImprintingScheme scheme)
    : model_(&model), scheme_(std::move(scheme)), heff_(model.effective_hamiltonian()) {
  for (const auto& p : scheme_.params) dheff_.push_back(p.heff_derivative);
}

MonitoringState FisherMonitor::start(const StateVector& psi0) const {
  MonitoringState s;
  s.psi = psi0;
  s.xi.assign(scheme_.params.size(), Operator::Zero(model_->dim(), model_->dim()));
  return s;
}

void FisherMonitor::apply(MonitoringState& state, const Operator& k, const std::vector<Operator>& dk) const {
  const StateVector kpsi = k * state.psi;
  const double p = kpsi.squaredNorm();
  if (!(p >= kUnderflow)) {
    throw MonitoringError("segment probability " + std::to_string(p) + " underflows at t = " + std::to_string(state.t));
  }
  for (std::size_t a = 0; a < state.xi.size(); ++a) {
    const Operator cross = (dk[a] * state.psi) * kpsi.adjoint();
    state.xi[a] = (k * state.xi[a] * k.adjoint() + cross + cross.adjoint()) / p;
  }
  state.psi = kpsi / std::sqrt(p);
}

void FisherMonitor::evolve(MonitoringState& state, const Segment& segment) const {
  if (segment.channel < 0) {
    if (segment.duration < 0.0) throw Error("negative_time", "segment duration must be >= 0");
    if (segment.duration == 0.0) return;
    const PropagatorDerivative pd = propagator_and_derivative(heff_, dheff_, segment.duration);
    apply(state, pd.u, pd.du);
    state.t += segment.duration;
    return;
  }
  if (segment.channel >= static_cast<int>(model_->channels.size())) {
    throw ModelError("segment refers to unknown channel " + std::to_string(segment.channel));
  }
  const Operator& l = model_->channels[segment.channel].op;
  std::vector<Operator> dk;
  dk.reserve(scheme_.params.size());
  for (const auto& p : scheme_.params) dk.push_back(p.jump_coeff[segment.channel] * l);
  apply(state, l, dk);
}

std::vector<double> FisherMonitor::scores(const TrajectoryRecord& record) const {
  MonitoringState state = start(record.initial_state);
  double t = 0.0;
  for (const auto& e : record.events) {
    evolve(state, {e.time - t, -1});
    evolve(state, {0.0, e.channel});
    t = e.time;
  }
  evolve(state, {record.tau - t, -1});
  return state.scores();
}

Eigen::MatrixXd ensemble_scores(const FisherMonitor& monitor, std::span<const TrajectoryRecord> records,
                                unsigned workers) {
  const auto p = static_cast<Eigen::Index>(monitor.scheme().params.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), p);
  parallel_for_index(records.size(), workers, [&](std::size_t i) {
    const std::vector<double> s = monitor.scores(records[i]);
    for (Eigen::Index a = 0; a < p; ++a) out(static_cast<Eigen::Index>(i), a) = s[a];
  });
  return out;
}

Eigen::MatrixXd FisherMatrixEstimate::values() const {
  const auto p = static_cast<Eigen::Index>(entries.size());
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = 0; b < p; ++b) m(a, b) = entries[a][b].value;
  return m;
}

Eigen::MatrixXd FisherMatrixEstimate::std_errors() const {
  const auto p = static_cast<Eigen::Index>(entries.size());
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = 0; b < p; ++b) m(a, b) = entries[a][b].se;
  return m;
}

FisherMatrixEstimate estimate_fisher(const Eigen::MatrixXd& scores, const Bootstrap& bootstrap) {
  if (scores.rows() < 100) throw Error("too_few_samples", "Fisher estimation needs M >= 100 trajectories");
  const Eigen::Index p = scores.cols();
  // Columns: s_a, then s_a s_b for a <= b.
  Eigen::MatrixXd cols(scores.rows(), p + p * (p + 1) / 2);
  cols.leftCols(p) = scores;
  Eigen::Index c = p;
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = a; b < p; ++b) cols.col(c++) = scores.col(a).cwiseProduct(scores.col(b));

  const Eigen::RowVectorXd full = cols.colwise().mean();
  const Eigen::MatrixXd reps = bootstrap.replicate_means(cols);

  FisherMatrixEstimate out;
  out.sample_count = static_cast<std::size_t>(scores.rows());
  for (Eigen::Index a = 0; a < p; ++a) out.score_means.push_back(make_estimate(full(a), reps.col(a)));
  out.entries.assign(p, std::vector<Estimate>(p));
  c = p;
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a; b < p; ++b, ++c) {
      out.entries[a][b] = make_estimate(full(c), reps.col(c));
      out.entries[b][a] = out.entries[a][b];
    }
  }
  return out;
}

}  // namespace qbounds
