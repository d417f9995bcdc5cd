#include "qbounds/liouvillian.hpp"

#include "qbounds/errors.hpp"

namespace qbounds {

Superoperator build_liouvillian(const LindbladModel& model) {
  if (model.channels.empty()) throw ModelError("build_liouvillian: empty channel list");
  check_operator(model.hamiltonian, "Hamiltonian");
  Superoperator out = commutator_superoperator(model.hamiltonian);
  for (const auto& c : model.channels) {
    if (c.op.rows() != model.hamiltonian.rows() || c.op.cols() != model.hamiltonian.cols()) {
      throw DimensionError("build_liouvillian: jump operator " + std::to_string(c.id) + " has wrong shape");
    }
    out.matrix += dissipator_superoperator(c.op).matrix;
  }
  out.kind = SuperKind::liouvillian;
  return out;
}

LiouvillianParts build_liouvillian_parts(const LindbladModel& model) {
  LiouvillianParts parts;
  parts.full = build_liouvillian(model);
  const Superoperator coherent = commutator_superoperator(model.hamiltonian);
  const Eigen::Index n = parts.full.matrix.rows();
  for (int g = 0; g < model.group_count; ++g) {
    Superoperator diss{Eigen::MatrixXcd::Zero(n, n), SuperKind::dissipator};
    for (const auto& c : model.channels) {
      if (c.group == g) diss.matrix += dissipator_superoperator(c.op).matrix;
    }
    parts.group.push_back({coherent.matrix + diss.matrix, SuperKind::generic});
    parts.dissipator.push_back(std::move(diss));
  }
  return parts;
}

Superoperator scaled_liouvillian(const LindbladModel& model, double hamiltonian_scale,
                                 std::span<const double> channel_scale) {
  if (channel_scale.size() != model.channels.size()) {
    throw DimensionError("scaled_liouvillian: one scale per channel required");
  }
  Superoperator out = commutator_superoperator(model.hamiltonian);
  out.matrix *= hamiltonian_scale;
  for (const auto& c : model.channels) {
    if (channel_scale[c.id] != 0.0) out.matrix += channel_scale[c.id] * dissipator_superoperator(c.op).matrix;
  }
  return out;
}

Superoperator weighted_jump_superoperator(const LindbladModel& model, std::span<const double> weights) {
  if (weights.size() != model.channels.size()) {
    throw DimensionError("weighted_jump_superoperator: one weight per channel required");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(model.dim()) * model.dim();
  Superoperator out{Eigen::MatrixXcd::Zero(n, n), SuperKind::jump};
  for (const auto& c : model.channels) {
    if (weights[c.id] != 0.0) out.matrix += jump_superoperator(c.op, weights[c.id]).matrix;
  }
  return out;
}

std::vector<double> channel_rates(const LindbladModel& model, const Operator& rho) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim()) throw DimensionError("channel_rates: state dimension mismatch");
  std::vector<double> r(model.channels.size());
  for (const auto& c : model.channels) r[c.id] = (c.op * rho * c.op.adjoint()).trace().real();
  return r;
}

std::vector<double> current_coefficients(const LindbladModel& model, const Operator& rho) {
  const std::vector<double> r = channel_rates(model, rho);
  std::vector<double> l(r.size(), 0.0);
  for (const auto& c : model.channels) {
    if (!c.reverse_id) continue;
    const double total = r[c.id] + r[*c.reverse_id];
    if (total > 0.0) l[c.id] = (r[c.id] - r[*c.reverse_id]) / total;
  }
  return l;
}

}  // namespace qbounds
