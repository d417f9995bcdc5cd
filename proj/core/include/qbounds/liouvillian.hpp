#pragma once

#include <span>
#include <vector>

#include "qbounds/linalg.hpp"
#include "qbounds/model.hpp"

namespace qbounds {

// The full Liouvillian together with its group-restricted parts:
//   group[a]      = -i[H, .] + sum_{k in S_a} D[L_k]
//   dissipator[a] =            sum_{k in S_a} D[L_k]
struct LiouvillianParts {
  Superoperator full;
  std::vector<Superoperator> group;
  std::vector<Superoperator> dissipator;
};

Superoperator build_liouvillian(const LindbladModel& model);
LiouvillianParts build_liouvillian_parts(const LindbladModel& model);

// -i s_H [H, .] + sum_k s_k D[L_k]. Used for deformed dynamics and for the
// l_k-weighted generators of the current imprinting.
Superoperator scaled_liouvillian(const LindbladModel& model, double hamiltonian_scale,
                                 std::span<const double> channel_scale);

// tr{L_k rho L_k^dag} for every channel.
std::vector<double> channel_rates(const LindbladModel& model, const Operator& rho);

// (r_k - r_k') / (r_k + r_k') over reverse pairs; 0 for unpaired channels and
// for pairs with vanishing total rate.
std::vector<double> current_coefficients(const LindbladModel& model, const Operator& rho);

// X -> sum_k w_k L_k X L_k^dag
Superoperator weighted_jump_superoperator(const LindbladModel& model, std::span<const double> weights);

}  // namespace qbounds
