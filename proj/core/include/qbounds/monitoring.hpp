#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"
#include "qbounds/statistics.hpp"
#include "qbounds/trajectory.hpp"

namespace qbounds {

enum class BoundKind { kur, tur };

const char* to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& text);

// Derivatives of H and of L_k = sqrt(1 + 2 c_k phi) L_k at phi = 0.
struct ParameterImprint {
  std::string name;
  Operator hamiltonian_derivative;
  std::vector<double> jump_coeff;
  // dH - (i/2) sum_k 2 c_k L_k^dag L_k
  Operator heff_derivative;
};

// Parameters 0 and 1 speed up channel groups S_1 and S_2 (plus H); parameter 2
// speeds up every channel at once and gives the single-observable Fisher
// information used by the product bounds.
struct ImprintingScheme {
  static constexpr int kGlobal = 2;

  BoundKind kind = BoundKind::kur;
  std::vector<ParameterImprint> params;
  std::vector<double> l_ss;  // current coefficients at rho_ss (TUR), empty for KUR

  int size() const { return static_cast<int>(params.size()); }
};

// KUR: c_k = 1/2 on the group. TUR: c_k = l_k^ss / 2, requires rho_ss and a
// model in which every channel is reverse-paired inside its own group.
ImprintingScheme make_scheme(const LindbladModel& model, BoundKind kind,
                             const std::optional<Operator>& rho_ss = std::nullopt);

// U(t) = exp(-i H_eff t) and dU_a(t) = -i int_0^t U(t-s) dH_a U(s) ds, read off
// the exponential of the block upper-triangular generator
//   [[-iH_eff, -i dH_1, ..., -i dH_P], [0, -iH_eff, 0 ...], ...].
struct PropagatorDerivative {
  Operator u;
  std::vector<Operator> du;
};
PropagatorDerivative propagator_and_derivative(const Operator& heff, std::span<const Operator> dheff, double t);

struct MonitoringState {
  StateVector psi;
  std::vector<Operator> xi;
  double t = 0.0;

  std::vector<double> scores() const;  // Re tr xi_a
};

// A no-jump interval (channel < 0) or an instantaneous jump.
struct Segment {
  double duration = 0.0;
  int channel = -1;
};

class FisherMonitor {
 public:
  FisherMonitor(const LindbladModel& model, ImprintingScheme scheme);

  MonitoringState start(const StateVector& psi0) const;
  // xi <- (K xi K^dag + dK psi psi^dag K^dag + K psi psi^dag dK^dag) / p,
  // psi <- K psi / sqrt(p), p = |K psi|^2.
  void evolve(MonitoringState& state, const Segment& segment) const;
  // Replays a record from its initial state and returns the final scores.
  std::vector<double> scores(const TrajectoryRecord& record) const;

  const ImprintingScheme& scheme() const { return scheme_; }
  const LindbladModel& model() const { return *model_; }

 private:
  void apply(MonitoringState& state, const Operator& k, const std::vector<Operator>& dk) const;

  const LindbladModel* model_;
  ImprintingScheme scheme_;
  Operator heff_;
  std::vector<Operator> dheff_;
};

// M x P matrix of scores, row i for records[i].
Eigen::MatrixXd ensemble_scores(const FisherMonitor& monitor, std::span<const TrajectoryRecord> records,
                                unsigned workers = 1);

struct FisherMatrixEstimate {
  std::size_t sample_count = 0;
  std::vector<std::vector<Estimate>> entries;  // P x P, F_ab = <s_a s_b>
  std::vector<Estimate> score_means;

  const Estimate& operator()(int a, int b) const { return entries[a][b]; }
  Eigen::MatrixXd values() const;
  Eigen::MatrixXd std_errors() const;
};

// Requires M >= 100.
FisherMatrixEstimate estimate_fisher(const Eigen::MatrixXd& scores, const Bootstrap& bootstrap);

}  // namespace qbounds
