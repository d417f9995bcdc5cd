#pragma once

#include <array>
#include <string>
#include <vector>

#include "qbounds/monitoring.hpp"
#include "qbounds/statistics.hpp"
#include "qbounds/thermo.hpp"

namespace qbounds {

// Left-hand sides and bounds of the two-observable uncertainty relations.
//
// kur: lhs_det >= k12 = (1+phi_1)^2 (1+phi_2)^2 / (F_11 F_22 - F_12^2)
//      lhs_half >= half_product = K_1 K_2 / 2,  K_a = (1+phi'_a)^2 / F
// tur: lhs_det >= k12 = 2 (1+t_1)^2 (1+t_2)^2 / ((S_1+2Q'_1)(S_2+2Q'_2) - 2 F_12^2)
//      lhs_half >= half_product = 2 (1+t)^2 (1+t')^2 / (S+2Q')^2
// with Q_a = F_aa - A_a, Q'_a = F_aa - S_a/2 (so S_a + 2Q'_a = 2 F_aa), and F
// the Fisher information of the parameter imprinted on every channel.
struct BoundReport {
  BoundKind kind = BoundKind::kur;
  double tau = 0.0;
  std::size_t trajectories = 0;

  Estimate lhs_det;
  Estimate lhs_half;
  Estimate k12;
  Estimate half_product;
  std::array<Estimate, 2> single_bound;
  Estimate ratio;           // lhs_det / k12
  Estimate margin;          // lhs_det - k12
  Estimate product_margin;  // lhs_half - half_product
  Estimate gap_difference;  // margin - product_margin
  Estimate corr;

  std::array<double, 2> activity{0.0, 0.0};
  std::array<double, 2> sigma{0.0, 0.0};
  bool has_sigma = false;
  std::array<Estimate, 2> fisher_diag;
  Estimate fisher_offdiag;
  Estimate fisher_single;
  std::array<Estimate, 2> q;  // Q_a (kur) or Q'_a (tur)
  Estimate q_single;
  std::array<Estimate, 2> score_mean;
  Estimate score_mean_single;
  std::array<double, 2> phi{0.0, 0.0};
  std::array<double, 2> phi_single{0.0, 0.0};

  bool k12_applicable = true;
  bool product_applicable = true;
  std::vector<std::string> flags;
};

BoundReport assemble_bounds(BoundKind kind, const ThermoReport& thermo, const FisherMatrixEstimate& fisher,
                            const CovarianceEstimate& stats, double tau);

}  // namespace qbounds
