#include "qbounds/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "qbounds/errors.hpp"
#include "qbounds/parallel.hpp"

namespace qbounds {

namespace {

constexpr double kBracketFraction = 0.05;
constexpr double kNormTol = 1e-10;

void check_normalized(const StateVector& psi, int dim) {
  if (psi.size() != dim) throw DimensionError("initial state dimension does not match the model");
  if (std::abs(psi.squaredNorm() - 1.0) > kNormTol) throw SamplerError("non_normalized_state", "initial state is not normalized");
}

}  // namespace

void SamplerConfig::check() const {
  if (!(dt > 0.0)) throw SamplerError("invalid_sampler", "sampler dt must be > 0");
  if (!(root_tol > 0.0 && root_tol <= 1e-3)) throw SamplerError("invalid_sampler", "root_tol must lie in (0, 1e-3]");
  if (max_jumps == 0) throw SamplerError("invalid_sampler", "max_jumps must be positive");
}

InitialCondition InitialCondition::pure(const StateVector& psi) {
  InitialCondition c;
  c.weights_ = {1.0};
  c.states_ = {psi};
  return c;
}

InitialCondition InitialCondition::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw DimensionError("basis state index out of range");
  StateVector psi = StateVector::Zero(dim);
  psi(index) = 1.0;
  return pure(psi);
}

InitialCondition InitialCondition::from_density(const Operator& rho) {
  if (!is_hermitian(rho, 1e-10)) throw DimensionError("initial density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (rho + rho.adjoint()));
  InitialCondition c;
  for (Eigen::Index j = solver.eigenvalues().size() - 1; j >= 0; --j) {
    const double w = solver.eigenvalues()(j);
    if (w < -1e-10) throw DimensionError("initial density matrix is not positive semidefinite");
    if (w <= 1e-15) continue;
    c.weights_.push_back(w);
    c.states_.push_back(solver.eigenvectors().col(j).normalized());
  }
  double total = 0.0;
  for (double w : c.weights_) total += w;
  for (double& w : c.weights_) w /= total;
  return c;
}

const StateVector& InitialCondition::draw(Rng& rng) const {
  if (states_.size() == 1) return states_.front();
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    acc += weights_[j];
    if (u < acc) return states_[j];
  }
  return states_.back();
}

Operator InitialCondition::density() const {
  Operator rho = Operator::Zero(dim(), dim());
  for (std::size_t j = 0; j < states_.size(); ++j) rho += weights_[j] * states_[j] * states_[j].adjoint();
  return rho;
}

JumpSampler::JumpSampler(const LindbladModel& model, SamplerConfig config)
    : model_(&model), config_(config) {
  config_.check();
  for (const auto& c : model.channels) {
    if (!c.inert) active_.push_back(c.id);
  }
  heff_ = model.effective_hamiltonian();
  decay_ = model.total_decay();
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (decay_ + decay_.adjoint()), Eigen::EigenvaluesOnly);
  max_rate_ = std::max(0.0, solver.eigenvalues().maxCoeff());
  if (max_rate_ > 0.0) {
    step_ = kBracketFraction / max_rate_;
    step_propagator_ = nonunitary_propagator(heff_, step_);
  }
}

double JumpSampler::survival(const StateVector& psi, double t) const {
  return (nonunitary_propagator(heff_, t) * psi).squaredNorm();
}

int JumpSampler::select_channel(const StateVector& psi, Rng& rng) const {
  std::vector<double> w(active_.size());
  double total = 0.0;
  for (std::size_t j = 0; j < active_.size(); ++j) {
    w[j] = (model_->channels[active_[j]].op * psi).squaredNorm();
    total += w[j];
  }
  if (!(total > 0.0)) throw SamplerError("no jump channel has non-zero rate at the sampled jump time");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    acc += w[j];
    if (u < acc) return active_[j];
  }
  for (std::size_t j = w.size(); j-- > 0;) {
    if (w[j] > 0.0) return active_[j];
  }
  return active_.back();
}

// Solves ||U(x) phi||^2 = target for x in (0, upper], knowing the survival is
// above target at 0 and at or below it at `upper`. Newton on the log survival,
// safeguarded by the bracket.
double JumpSampler::refine_root(const StateVector& phi, double upper, double target, double offset) const {
  const double log_target = std::log(target);
  double lo = 0.0;
  double hi = upper;
  double x = 0.5 * upper;
  for (int iter = 0; iter < 200; ++iter) {
    const StateVector chi = nonunitary_propagator(heff_, x) * phi;
    const double s = chi.squaredNorm();
    const double g = std::log(s) - log_target;
    if (g > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double rate = (chi.adjoint() * decay_ * chi)(0, 0).real() / s;
    double next = rate > 0.0 ? x + g / rate : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = offset + hi;
    if (std::abs(next - x) <= config_.root_tol * scale || hi - lo <= config_.root_tol * scale) return next;
    x = next;
  }
  return 0.5 * (lo + hi);
}

std::optional<NextJump> JumpSampler::next_jump(const StateVector& psi, double horizon, Rng& rng) const {
  const double target = rng.uniform();
  if (max_rate_ <= 0.0 || active_.empty()) return std::nullopt;

  StateVector phi = psi;
  double elapsed = 0.0;
  while (elapsed < horizon) {
    const double h = std::min(step_, horizon - elapsed);
    StateVector ahead = (h == step_ ? step_propagator_ : nonunitary_propagator(heff_, h)) * phi;
    if (ahead.squaredNorm() <= target) {
      const double delta = refine_root(phi, h, target, elapsed);
      NextJump out;
      out.delay = elapsed + delta;
      out.pre_jump = (nonunitary_propagator(heff_, delta) * phi).normalized();
      out.channel = select_channel(out.pre_jump, rng);
      return out;
    }
    phi = std::move(ahead);
    elapsed += h;
  }
  return std::nullopt;
}

TrajectoryRecord JumpSampler::sample_gillespie(const StateVector& psi0, double tau, Rng& rng) const {
  TrajectoryRecord rec;
  rec.tau = tau;
  rec.initial_state = psi0;
  StateVector psi = psi0;
  double t = 0.0;
  for (;;) {
    auto jump = next_jump(psi, tau - t, rng);
    if (!jump) {
      rec.final_state = (nonunitary_propagator(heff_, tau - t) * psi).normalized();
      return rec;
    }
    const double t_next = t + jump->delay;
    if (!(t_next > t)) throw SamplerError("jump times failed to increase");
    t = std::min(t_next, tau);
    rec.events.push_back({t, jump->channel});
    if (rec.events.size() > config_.max_jumps) {
      throw SamplerError("diverging_rate", "trajectory exceeded max_jumps = " + std::to_string(config_.max_jumps));
    }
    psi = (model_->channels[jump->channel].op * jump->pre_jump).normalized();
  }
}

TrajectoryRecord JumpSampler::sample_fixed_dt(const StateVector& psi0, double tau, Rng& rng) const {
  if (config_.dt * max_rate_ > 0.5) {
    throw SamplerError("invalid_sampler", "fixed_dt: dt * max rate must not exceed 0.5");
  }
  TrajectoryRecord rec;
  rec.tau = tau;
  rec.initial_state = psi0;
  StateVector psi = psi0;
  const auto steps = static_cast<std::size_t>(std::ceil(tau / config_.dt - 1e-9));
  const Operator id = Operator::Identity(model_->dim(), model_->dim());
  const Operator no_jump = id - kI * config_.dt * heff_;
  std::vector<double> p(active_.size());
  for (std::size_t i = 0; i < steps; ++i) {
    const double start = static_cast<double>(i) * config_.dt;
    const double dt = std::min(config_.dt, tau - start);
    if (dt <= 0.0) break;
    double total = 0.0;
    for (std::size_t j = 0; j < active_.size(); ++j) {
      p[j] = dt * (model_->channels[active_[j]].op * psi).squaredNorm();
      total += p[j];
    }
    const double u = rng.uniform();
    if (u < total) {
      double acc = 0.0;
      int chosen = active_.back();
      for (std::size_t j = 0; j < p.size(); ++j) {
        acc += p[j];
        if (u < acc) {
          chosen = active_[j];
          break;
        }
      }
      rec.events.push_back({std::min(start + dt, tau), chosen});
      if (rec.events.size() > config_.max_jumps) {
        throw SamplerError("diverging_rate", "trajectory exceeded max_jumps = " + std::to_string(config_.max_jumps));
      }
      psi = (model_->channels[chosen].op * psi).normalized();
    } else {
      psi = (dt == config_.dt ? no_jump : Operator(id - kI * dt * heff_)) * psi;
      psi.normalize();
    }
  }
  rec.final_state = psi;
  return rec;
}

TrajectoryRecord JumpSampler::sample(const InitialCondition& initial, double tau, std::uint64_t seed) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw SamplerError("invalid_tau", "tau must be finite and > 0");
  Rng rng(seed);
  const StateVector& psi0 = initial.draw(rng);
  check_normalized(psi0, model_->dim());
  TrajectoryRecord rec = config_.method == SamplerMethod::gillespie ? sample_gillespie(psi0, tau, rng)
                                                                     : sample_fixed_dt(psi0, tau, rng);
  rec.seed = seed;
  return rec;
}

TrajectoryRecord sample_trajectory(const LindbladModel& model, const StateVector& psi0, double tau,
                                   std::uint64_t seed, const SamplerConfig& config) {
  return JumpSampler(model, config).sample(InitialCondition::pure(psi0), tau, seed);
}

std::vector<TrajectoryRecord> run_ensemble(const LindbladModel& model, const InitialCondition& initial,
                                           double tau, std::size_t count, std::uint64_t master_seed,
                                           const SamplerConfig& config, unsigned workers) {
  if (count == 0) throw SamplerError("invalid_ensemble", "trajectory count must be >= 1");
  const JumpSampler sampler(model, config);
  std::vector<TrajectoryRecord> out(count);
  parallel_for_index(count, workers, [&](std::size_t i) {
    try {
      out[i] = sampler.sample(initial, tau, counter_hash(master_seed, i));
    } catch (const Error& e) {
      throw SamplerError(e.code(), "trajectory " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

std::vector<long> group_jump_counts(const TrajectoryRecord& record, const LindbladModel& model) {
  std::vector<long> counts(model.group_count, 0);
  for (const auto& e : record.events) {
    if (e.channel < 0 || e.channel >= static_cast<int>(model.channels.size())) {
      throw ModelError("record refers to unknown channel " + std::to_string(e.channel));
    }
    ++counts[model.channels[e.channel].group];
  }
  return counts;
}

void write_trajectory_dump(std::ostream& out, std::span<const TrajectoryRecord> records) {
  char buf[64];
  for (const auto& rec : records) {
    out << rec.seed;
    for (const auto& e : rec.events) {
      std::snprintf(buf, sizeof buf, ",%.17g,%d", e.time, e.channel);
      out << buf;
    }
    out << '\n';
  }
}

std::vector<TrajectoryRecord> read_trajectory_dump(std::istream& in, double tau) {
  std::vector<TrajectoryRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    TrajectoryRecord rec;
    rec.tau = tau;
    std::getline(fields, cell, ',');
    rec.seed = std::stoull(cell);
    while (std::getline(fields, cell, ',')) {
      JumpEvent e;
      e.time = std::stod(cell);
      if (!std::getline(fields, cell, ',')) throw SamplerError("malformed_dump", "odd number of event fields");
      e.channel = std::stoi(cell);
      rec.events.push_back(e);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace qbounds
