#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"
#include "qbounds/rng.hpp"

namespace qbounds {

struct JumpEvent {
  double time = 0.0;
  int channel = 0;
  bool operator==(const JumpEvent&) const = default;
};

// One unraveled realization on [0, tau]; 0 < t_1 < ... < t_N <= tau.
struct TrajectoryRecord {
  std::vector<JumpEvent> events;
  double tau = 0.0;
  std::uint64_t seed = 0;
  StateVector initial_state;
  StateVector final_state;
};

enum class SamplerMethod { gillespie, fixed_dt };

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::gillespie;
  double dt = 1e-3;
  double root_tol = 1e-10;
  std::size_t max_jumps = 1'000'000;

  void check() const;
};

// Pure initial state, or a mixed state unraveled into its eigen-ensemble.
class InitialCondition {
 public:
  static InitialCondition pure(const StateVector& psi);
  static InitialCondition basis(int dim, int index);
  static InitialCondition from_density(const Operator& rho);

  // A pure condition consumes no random numbers.
  const StateVector& draw(Rng& rng) const;
  Operator density() const;
  bool is_pure() const { return states_.size() == 1; }
  int dim() const { return static_cast<int>(states_.front().size()); }

 private:
  std::vector<double> weights_;
  std::vector<StateVector> states_;
};

// Result of a waiting-time draw from a normalized state.
struct NextJump {
  double delay = 0.0;
  int channel = -1;
  StateVector pre_jump;  // normalized no-jump state at the jump time
};

// Quantum-jump sampler with per-model caches (effective Hamiltonian, bracket
// step, step propagator). Thread-safe: all sampling methods are const.
class JumpSampler {
 public:
  JumpSampler(const LindbladModel& model, SamplerConfig config = {});

  TrajectoryRecord sample(const InitialCondition& initial, double tau, std::uint64_t seed) const;

  // Survival probability ||exp(-i H_eff t) psi||^2.
  double survival(const StateVector& psi, double t) const;
  // Draws the next jump within `horizon`; nullopt when none occurs.
  std::optional<NextJump> next_jump(const StateVector& psi, double horizon, Rng& rng) const;
  // Channel choice with probabilities ||L_k psi||^2 / sum_j ||L_j psi||^2.
  int select_channel(const StateVector& psi, Rng& rng) const;

  const LindbladModel& model() const { return *model_; }
  const SamplerConfig& config() const { return config_; }

 private:
  TrajectoryRecord sample_gillespie(const StateVector& psi0, double tau, Rng& rng) const;
  TrajectoryRecord sample_fixed_dt(const StateVector& psi0, double tau, Rng& rng) const;
  double refine_root(const StateVector& phi, double upper, double target, double offset) const;

  const LindbladModel* model_;
  SamplerConfig config_;
  std::vector<int> active_;
  Operator heff_;
  Operator decay_;
  double max_rate_ = 0.0;
  double step_ = 0.0;
  Operator step_propagator_;
};

TrajectoryRecord sample_trajectory(const LindbladModel& model, const StateVector& psi0, double tau,
                                   std::uint64_t seed, const SamplerConfig& config = {});

// Trajectory i is sampled with seed counter_hash(master_seed, i).
std::vector<TrajectoryRecord> run_ensemble(const LindbladModel& model, const InitialCondition& initial,
                                           double tau, std::size_t count, std::uint64_t master_seed,
                                           const SamplerConfig& config = {}, unsigned workers = 1);

// Per-group jump counts N_alpha of a record.
std::vector<long> group_jump_counts(const TrajectoryRecord& record, const LindbladModel& model);

// Debug dump: one line per record, "seed,t1,k1,t2,k2,..." with round-trip precision.
void write_trajectory_dump(std::ostream& out, std::span<const TrajectoryRecord> records);
std::vector<TrajectoryRecord> read_trajectory_dump(std::istream& in, double tau);

}  // namespace qbounds
