#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"
#include "qbounds/monitoring.hpp"

namespace qbounds {

// Simpson rule for int_{t0}^{tau} f(rho(t)) dt with rho(t) = exp(L t) rho0,
// doubling the grid until every component changes by less than rel_tol.
Eigen::VectorXd integrate_along(const Superoperator& liouvillian, const Operator& rho0, double t0, double tau,
                                const std::function<Eigen::VectorXd(const Operator&)>& integrand,
                                double rel_tol = 1e-8);

double dynamical_activity(const LindbladModel& model, const Operator& rho0, double tau, int group);
// {A_1, A_2} from one quadrature.
std::array<double, 2> dynamical_activities(const LindbladModel& model, const Operator& rho0, double tau);

struct EntropyProduction {
  std::array<double, 2> sigma{0.0, 0.0};
  double system = 0.0;       // S(rho_tau) - S(rho_t0)
  double environment = 0.0;  // int sum_k r_k Delta s_k
  double t0 = 0.0;           // > 0 when rho0 was rank deficient
  double total() const { return sigma[0] + sigma[1]; }
};

// Needs an entropy jump on every non-inert channel. A rank-deficient rho0 is
// handled by starting the quadrature at t0 = 1e-3 tau.
EntropyProduction entropy_production_components(const LindbladModel& model, const Operator& rho0, double tau);

struct Correction {
  double star = 0.0;  // <Phi*>
  double mean = 0.0;  // <Phi> = tau sum_k w_k r_k^ss
  double ratio = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

// -tau <1| J_a L^+ G |rho_ss> for a generator G. Shared by every correction.
Correction drazin_correction(const LindbladModel& model, const Operator& rho_ss, const Superoperator& drazin,
                             const ObservableDef& def, const Superoperator& generator, double tau);

// G_a = -i[H, .] + sum_{k in S_a} D[L_k].
std::array<Correction, 2> correction_term_kur(const LindbladModel& model, const Operator& rho_ss,
                                              const std::array<ObservableDef, 2>& defs, double tau);
// G_a = -i[H, .] + sum_{k in S_a} l_k^ss D[L_k]; defs must be currents.
std::array<Correction, 2> correction_term_tur(const LindbladModel& model, const Operator& rho_ss,
                                              const std::array<ObservableDef, 2>& defs, double tau);
// Same expression with every channel imprinted (one parameter for both groups).
std::array<Correction, 2> single_correction_terms(const LindbladModel& model, const Operator& rho_ss,
                                                  const std::array<ObservableDef, 2>& defs, BoundKind kind,
                                                  double tau);

// Heisenberg form of the group-a correction:
//   -(tau/2) sum_{k not in S_a} f_k <[L_k^dag, Wbar] L_k + L_k^dag [Wbar, L_k]>_ss,
// Wbar = int_0^inf W_a(t) dt on the non-stationary sector, W_a = sum_{S_a} w_k L_k^dag L_k,
// f_k = 1 (KUR) or l_k^ss (TUR).
double commutator_correction(const LindbladModel& model, const Operator& rho_ss, const ObservableDef& def,
                             int group, BoundKind kind, double tau);

struct ThermoReport {
  BoundKind kind = BoundKind::kur;
  double tau = 0.0;
  std::array<double, 2> activity{0.0, 0.0};
  double activity_total = 0.0;
  std::optional<EntropyProduction> entropy;
  std::vector<double> l_ss;
  std::array<Correction, 2> correction;
  std::array<Correction, 2> single_correction;
  bool stationary_start = false;
  std::vector<std::string> notes;
};

ThermoReport compute_thermo(const LindbladModel& model, const Operator& rho0, const Operator& rho_ss,
                            const std::array<ObservableDef, 2>& defs, BoundKind kind, double tau);

}  // namespace qbounds
