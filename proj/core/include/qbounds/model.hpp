#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbounds/linalg.hpp"

namespace qbounds {

// One monitored decay channel L_k. Groups are 0-based (S_1 -> 0, S_2 -> 1).
struct JumpChannel {
  int id = 0;
  std::string label;
  Operator op;
  int group = 0;
  // Environment entropy change per jump (k_B = 1); set for reverse-paired channels.
  std::optional<double> entropy_jump;
  std::optional<int> reverse_id;
  // Zero-rate channel kept for stable indexing; never sampled.
  bool inert = false;
};

// Physical model in the rotating frame. Treated as immutable once built.
struct LindbladModel {
  std::string name;
  Operator hamiltonian;
  std::vector<JumpChannel> channels;
  int group_count = 2;
  bool classical = false;

  int dim() const { return static_cast<int>(hamiltonian.rows()); }
  std::size_t channel_count() const { return channels.size(); }
  std::vector<int> group_members(int group) const;
  // sum_k L_k^dag L_k
  Operator total_decay() const;
  // H - (i/2) sum_k L_k^dag L_k
  Operator effective_hamiltonian() const;
  bool all_channels_paired() const;
};

// Weighted jump counter Phi = sum_j w_{k_j}.
struct ObservableDef {
  std::string name;
  std::vector<double> weights;
};

struct QubitParams {
  double detuning = 0.0;
  double drive = 1.0;
  double gamma = 1.0;
  double occupation = 1.0;
};

struct MaserParams {
  double detuning = 0.0;
  double drive = 1.0;
  double gamma_hot = 1.0;
  double gamma_cold = 1.0;
  double occupation_hot = 5.0;
  double occupation_cold = 0.01;
};

// H = (Delta/2) sigma_z + Omega sigma_x with |0> the ground state;
// L_0 = sqrt(gamma n) sigma_+ (group 0), L_1 = sqrt(gamma (n+1)) sigma_- (group 1).
LindbladModel build_driven_qubit(const QubitParams& p);

// Levels |e1>,|e2>,|e3> are basis states 0,1,2. Channels in order 1, 1', 2, 2':
//   sqrt(g1 n1) s31, sqrt(g1 (1+n1)) s13  -> group 0
//   sqrt(g2 n2) s32, sqrt(g2 (1+n2)) s23  -> group 1
LindbladModel build_three_level_maser(const MaserParams& p);

// rates(mu, sigma) is the rate of sigma -> mu; groups(mu, sigma) its 0-based
// bath label (ignored where the rate is zero). Both directions of a pair of
// transitions are reverse-paired with Delta s = ln(R_{mu sigma} / R_{sigma mu}).
LindbladModel build_classical_network(const Eigen::MatrixXd& rates, const Eigen::MatrixXi& groups);

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;
  std::vector<ValidationIssue> warnings;
  std::vector<int> inert_channels;
  double max_detailed_balance_residual = 0.0;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& code) const;
};

enum class ValidationScope {
  general,
  // Additionally requires every channel to be reverse-paired inside its own group.
  thermodynamic,
};

ValidationReport validate(const LindbladModel& model, ValidationScope scope = ValidationScope::general);

// Throws ModelError listing the violations when validate() fails.
void require_valid(const LindbladModel& model, ValidationScope scope = ValidationScope::general);

// True when w_k = -w_k' on every reverse pair (a thermodynamic current).
bool is_current(const ObservableDef& def, const LindbladModel& model);
// Group holding all non-zero weights; -1 for an all-zero observable.
// Throws ModelError if the support spans several groups.
int support_group(const ObservableDef& def, const LindbladModel& model);

}  // namespace qbounds
