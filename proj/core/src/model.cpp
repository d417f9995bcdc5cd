#include "qbounds/model.hpp"

#include <cmath>
#include <sstream>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

constexpr double kDetailedBalanceTol = 1e-10;
constexpr double kInertTol = 1e-14;

Operator basis_op(int dim, int row, int col) {
  Operator m = Operator::Zero(dim, dim);
  m(row, col) = 1.0;
  return m;
}

JumpChannel make_channel(int id, std::string label, Operator op, int group) {
  JumpChannel c;
  c.id = id;
  c.label = std::move(label);
  c.inert = max_abs(op) < kInertTol;
  c.op = std::move(op);
  c.group = group;
  return c;
}

// Pairs channel a (forward, entropy_jump = ds) with channel b (reverse, -ds).
void pair_channels(JumpChannel& a, JumpChannel& b, double ds) {
  a.reverse_id = b.id;
  b.reverse_id = a.id;
  a.entropy_jump = ds;
  b.entropy_jump = -ds;
}

void require_rate(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ModelError(std::string(name) + " must be finite and non-negative");
  }
}

bool single_offdiagonal_entry(const Operator& op) {
  int count = 0;
  for (Eigen::Index r = 0; r < op.rows(); ++r) {
    for (Eigen::Index c = 0; c < op.cols(); ++c) {
      if (std::abs(op(r, c)) > kInertTol) {
        if (r == c) return false;
        ++count;
      }
    }
  }
  return count <= 1;
}

}  // namespace

std::vector<int> LindbladModel::group_members(int group) const {
  std::vector<int> out;
  for (const auto& c : channels) {
    if (c.group == group) out.push_back(c.id);
  }
  return out;
}

Operator LindbladModel::total_decay() const {
  Operator g = Operator::Zero(dim(), dim());
  for (const auto& c : channels) g += c.op.adjoint() * c.op;
  return g;
}

Operator LindbladModel::effective_hamiltonian() const {
  return hamiltonian - 0.5 * kI * total_decay();
}

bool LindbladModel::all_channels_paired() const {
  for (const auto& c : channels) {
    if (!c.reverse_id) return false;
  }
  return !channels.empty();
}

LindbladModel build_driven_qubit(const QubitParams& p) {
  if (!(p.gamma > 0.0)) throw ModelError("qubit: gamma must be > 0");
  require_rate(p.occupation, "qubit: occupation n");
  if (!std::isfinite(p.detuning) || !std::isfinite(p.drive)) throw ModelError("qubit: non-finite parameters");

  const Operator sigma_plus = basis_op(2, 1, 0);   // |1><0|
  const Operator sigma_minus = basis_op(2, 0, 1);  // |0><1|
  Operator sigma_z = Operator::Zero(2, 2);
  sigma_z(0, 0) = -1.0;
  sigma_z(1, 1) = 1.0;
  const Operator sigma_x = sigma_plus + sigma_minus;

  LindbladModel m;
  m.name = "qubit";
  m.hamiltonian = 0.5 * p.detuning * sigma_z + p.drive * sigma_x;
  m.channels.push_back(make_channel(0, "absorption", std::sqrt(p.gamma * p.occupation) * sigma_plus, 0));
  m.channels.push_back(make_channel(1, "emission", std::sqrt(p.gamma * (p.occupation + 1.0)) * sigma_minus, 1));
  if (p.occupation > 0.0) {
    pair_channels(m.channels[1], m.channels[0], std::log((p.occupation + 1.0) / p.occupation));
  }
  return m;
}

LindbladModel build_three_level_maser(const MaserParams& p) {
  if (!(p.gamma_hot > 0.0) || !(p.gamma_cold > 0.0)) throw ModelError("maser: couplings must be > 0");
  require_rate(p.occupation_hot, "maser: n1");
  require_rate(p.occupation_cold, "maser: n2");
  if (!std::isfinite(p.detuning) || !std::isfinite(p.drive)) throw ModelError("maser: non-finite parameters");

  auto s = [](int i, int j) { return basis_op(3, i - 1, j - 1); };

  LindbladModel m;
  m.name = "maser";
  m.hamiltonian = p.detuning * s(2, 2) + p.drive * (s(1, 2) + s(2, 1));
  m.channels.push_back(make_channel(0, "1", std::sqrt(p.gamma_hot * p.occupation_hot) * s(3, 1), 0));
  m.channels.push_back(make_channel(1, "1'", std::sqrt(p.gamma_hot * (1.0 + p.occupation_hot)) * s(1, 3), 0));
  m.channels.push_back(make_channel(2, "2", std::sqrt(p.gamma_cold * p.occupation_cold) * s(3, 2), 1));
  m.channels.push_back(make_channel(3, "2'", std::sqrt(p.gamma_cold * (1.0 + p.occupation_cold)) * s(2, 3), 1));
  if (p.occupation_hot > 0.0) {
    pair_channels(m.channels[1], m.channels[0], std::log((p.occupation_hot + 1.0) / p.occupation_hot));
  }
  if (p.occupation_cold > 0.0) {
    pair_channels(m.channels[3], m.channels[2], std::log((p.occupation_cold + 1.0) / p.occupation_cold));
  }
  return m;
}

LindbladModel build_classical_network(const Eigen::MatrixXd& rates, const Eigen::MatrixXi& groups) {
  const Eigen::Index d = rates.rows();
  if (rates.cols() != d || d < 2) throw ModelError("classical network: rate matrix must be square, d >= 2");
  if (groups.rows() != d || groups.cols() != d) throw ModelError("classical network: group matrix shape mismatch");

  LindbladModel m;
  m.name = "classical";
  m.hamiltonian = Operator::Zero(d, d);
  m.classical = true;

  Eigen::MatrixXi channel_of = Eigen::MatrixXi::Constant(d, d, -1);
  int max_group = 0;
  for (Eigen::Index sigma = 0; sigma < d; ++sigma) {
    for (Eigen::Index mu = 0; mu < d; ++mu) {
      const double r = rates(mu, sigma);
      if (!std::isfinite(r) || r < 0.0) throw ModelError("classical network: rates must be finite and >= 0");
      if (mu == sigma) {
        if (r != 0.0) throw ModelError("classical network: diagonal rates must be zero");
        continue;
      }
      if (r == 0.0) continue;
      const int g = groups(mu, sigma);
      if (g < 0 || g > 1) {
        throw ModelError("classical network: transition " + std::to_string(sigma) + "->" + std::to_string(mu) +
                         " must be assigned to exactly one of groups 0, 1");
      }
      max_group = std::max(max_group, g);
      const int id = static_cast<int>(m.channels.size());
      m.channels.push_back(make_channel(id, std::to_string(sigma) + "->" + std::to_string(mu),
                                        std::sqrt(r) * basis_op(static_cast<int>(d), static_cast<int>(mu),
                                                                static_cast<int>(sigma)),
                                        g));
      channel_of(mu, sigma) = id;
    }
  }
  if (m.channels.empty()) throw ModelError("classical network: no non-zero transitions");

  for (Eigen::Index sigma = 0; sigma < d; ++sigma) {
    for (Eigen::Index mu = sigma + 1; mu < d; ++mu) {
      const int fwd = channel_of(mu, sigma);
      const int rev = channel_of(sigma, mu);
      if (fwd >= 0 && rev >= 0) {
        pair_channels(m.channels[fwd], m.channels[rev], std::log(rates(mu, sigma) / rates(sigma, mu)));
      }
    }
  }
  m.group_count = 2;
  (void)max_group;
  return m;
}

bool ValidationReport::has(const std::string& code) const {
  for (const auto& v : violations) {
    if (v.code == code) return true;
  }
  for (const auto& w : warnings) {
    if (w.code == code) return true;
  }
  return false;
}

ValidationReport validate(const LindbladModel& model, ValidationScope scope) {
  ValidationReport report;
  auto violation = [&](std::string code, std::string msg) {
    report.violations.push_back({std::move(code), std::move(msg)});
  };
  auto warning = [&](std::string code, std::string msg) {
    report.warnings.push_back({std::move(code), std::move(msg)});
  };

  const Eigen::Index d = model.hamiltonian.rows();
  if (model.hamiltonian.cols() != d || d < 2 || !is_finite(model.hamiltonian)) {
    violation("hamiltonian_shape", "Hamiltonian must be square, finite and of dimension >= 2");
    return report;
  }
  if (!is_hermitian(model.hamiltonian, 1e-12)) violation("hamiltonian_hermiticity", "Hamiltonian is not Hermitian");
  if (model.channels.empty()) violation("no_channels", "model has no jump channels");
  if (model.group_count != 2) {
    violation("group_count", "bound assembly supports exactly two channel groups");
  }

  const int n = static_cast<int>(model.channels.size());
  std::vector<int> group_active(std::max(model.group_count, 0), 0);
  for (int k = 0; k < n; ++k) {
    const JumpChannel& c = model.channels[k];
    const std::string tag = "channel " + std::to_string(k);
    if (c.id != k) violation("channel_id", tag + ": id must equal its position");
    if (c.op.rows() != d || c.op.cols() != d || !is_finite(c.op)) {
      violation("channel_shape", tag + ": operator shape mismatch or non-finite");
      continue;
    }
    if (c.group < 0 || c.group >= model.group_count) {
      violation("group_range", tag + ": group label out of range");
    }
    const bool zero = max_abs(c.op) < kInertTol;
    if (c.inert && !zero) violation("inert_flag", tag + ": flagged inert but has non-zero operator");
    if (!c.inert && zero) warning("inert_flag", tag + ": zero operator not flagged inert");
    if (c.inert || zero) {
      report.inert_channels.push_back(k);
    } else if (c.group >= 0 && c.group < model.group_count) {
      ++group_active[c.group];
    }

    if (c.reverse_id) {
      const int r = *c.reverse_id;
      if (r < 0 || r >= n || r == k) {
        violation("reverse_id", tag + ": reverse id out of range");
        continue;
      }
      const JumpChannel& rc = model.channels[r];
      if (!rc.reverse_id || *rc.reverse_id != k) {
        violation("reverse_id", tag + ": reverse pairing is not symmetric");
      }
      if (!c.entropy_jump || !rc.entropy_jump) {
        violation("detailed_balance", tag + ": paired channel without entropy jump");
        continue;
      }
      if (std::abs(*c.entropy_jump + *rc.entropy_jump) > kDetailedBalanceTol) {
        violation("detailed_balance", tag + ": entropy jumps of a reversed pair must be opposite");
      }
      if (rc.op.rows() == d && rc.op.cols() == d) {
        const double residual =
            max_abs(c.op - std::exp(0.5 * *c.entropy_jump) * Operator(rc.op.adjoint()));
        report.max_detailed_balance_residual = std::max(report.max_detailed_balance_residual, residual);
        if (!(residual < kDetailedBalanceTol)) {
          std::ostringstream msg;
          msg << tag << ": |L_k - e^{ds/2} L_k'^dag|_max = " << residual;
          violation("detailed_balance", msg.str());
        }
      }
      if (rc.group != c.group && k < r) {
        const std::string msg = tag + " and its reverse channel " + std::to_string(r) + " lie in different groups";
        if (scope == ValidationScope::thermodynamic) {
          violation("group_pairing", msg);
        } else {
          warning("group_pairing", msg);
        }
      }
    } else if (scope == ValidationScope::thermodynamic) {
      violation("unpaired_channel", tag + ": thermodynamic currents require a reverse-paired channel");
    }
  }
  for (int g = 0; g < static_cast<int>(group_active.size()); ++g) {
    if (group_active[g] == 0) warning("empty_group", "group " + std::to_string(g) + " has no active channel");
  }

  if (model.classical) {
    bool diagonal_h = max_abs(model.hamiltonian - Operator(model.hamiltonian.diagonal().asDiagonal())) < 1e-14;
    bool jump_form = true;
    for (const auto& c : model.channels) {
      if (c.op.rows() == d && !single_offdiagonal_entry(c.op)) jump_form = false;
    }
    if (!diagonal_h || !jump_form) {
      violation("classical_flag", "model flagged classical but H is not diagonal or a jump is not sqrt(R)|mu><sigma|");
    }
  }
  return report;
}

void require_valid(const LindbladModel& model, ValidationScope scope) {
  const ValidationReport report = validate(model, scope);
  if (report.ok()) return;
  std::ostringstream msg;
  msg << "model '" << model.name << "' failed validation:";
  for (const auto& v : report.violations) msg << " [" << v.code << "] " << v.message << ";";
  throw ModelError(msg.str());
}

bool is_current(const ObservableDef& def, const LindbladModel& model) {
  if (def.weights.size() != model.channels.size()) return false;
  for (const auto& c : model.channels) {
    if (!c.reverse_id) {
      if (def.weights[c.id] != 0.0) return false;
      continue;
    }
    if (std::abs(def.weights[c.id] + def.weights[*c.reverse_id]) > 1e-12) return false;
  }
  return true;
}

int support_group(const ObservableDef& def, const LindbladModel& model) {
  if (def.weights.size() != model.channels.size()) {
    throw ModelError("observable '" + def.name + "' has " + std::to_string(def.weights.size()) +
                     " weights but the model has " + std::to_string(model.channels.size()) + " channels");
  }
  int group = -1;
  for (const auto& c : model.channels) {
    if (def.weights[c.id] == 0.0) continue;
    if (group >= 0 && c.group != group) {
      throw ModelError("observable '" + def.name + "' has support in more than one channel group");
    }
    group = c.group;
  }
  return group;
}

}  // namespace qbounds
