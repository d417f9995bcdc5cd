#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "qbounds/errors.hpp"

using namespace qbounds;
using namespace qbounds::testing;

TEST(Qubit, ChannelRates) {
  // Omega = gamma / 2, n = 1: L_1^dag L_1 and L_2^dag L_2 have norms gamma and 2 gamma.
  const auto m = build_driven_qubit({0.0, 0.5, 1.0, 1.0});
  ASSERT_EQ(m.channels.size(), 2u);
  EXPECT_NEAR((m.channels[0].op.adjoint() * m.channels[0].op).norm(), 1.0, 1e-14);
  EXPECT_NEAR((m.channels[1].op.adjoint() * m.channels[1].op).norm(), 2.0, 1e-14);
  EXPECT_EQ(m.channels[0].group, 0);
  EXPECT_EQ(m.channels[1].group, 1);
  EXPECT_NEAR(m.hamiltonian(0, 1).real(), 0.5, 1e-15);
}

TEST(Qubit, VacuumBathIsInert) {
  const auto m = build_driven_qubit({0.0, 1.0, 1.0, 0.0});
  EXPECT_TRUE(m.channels[0].inert);
  EXPECT_FALSE(m.channels[1].inert);
  EXPECT_FALSE(m.channels[0].reverse_id.has_value());
  const auto r = validate(m);
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.inert_channels.size(), 1u);
  EXPECT_EQ(r.inert_channels[0], 0);
}

TEST(Qubit, DetailedBalanceEntropyJump) {
  for (double n : {0.3, 1.0, 4.0}) {
    const auto m = build_driven_qubit({0.2, 1.0, 1.0, n});
    ASSERT_TRUE(m.channels[1].entropy_jump.has_value());
    EXPECT_NEAR(*m.channels[1].entropy_jump, std::log((n + 1) / n), 1e-14);
    EXPECT_NEAR(*m.channels[0].entropy_jump, -std::log((n + 1) / n), 1e-14);
    const auto r = validate(m);
    EXPECT_TRUE(r.ok());
    EXPECT_LT(r.max_detailed_balance_residual, 1e-12);
  }
}

TEST(Qubit, NegativeRateRejected) {
  EXPECT_THROW(build_driven_qubit({0.0, 1.0, -1.0, 1.0}), ModelError);
  EXPECT_THROW(build_driven_qubit({0.0, 1.0, 1.0, -0.5}), ModelError);
}

TEST(Maser, ReferenceStructure) {
  const auto m = reference_maser();
  ASSERT_EQ(m.channels.size(), 4u);
  EXPECT_EQ(m.group_members(0), (std::vector<int>{0, 1}));
  EXPECT_EQ(m.group_members(1), (std::vector<int>{2, 3}));
  EXPECT_TRUE(validate(m, ValidationScope::thermodynamic).ok());
  // L_k' is proportional to L_k^dag.
  for (int k : {0, 2}) {
    const Operator a = m.channels[k].op.adjoint();
    const Operator b = m.channels[k + 1].op;
    EXPECT_NEAR(std::abs((a.adjoint() * b).trace()), a.norm() * b.norm(), 1e-12);
    EXPECT_EQ(m.channels[k].reverse_id, k + 1);
  }
  EXPECT_NEAR(*m.channels[1].entropy_jump, std::log(6.0 / 5.0), 1e-14);
  EXPECT_NEAR(*m.channels[3].entropy_jump, std::log(1.01 / 0.01), 1e-12);
}

TEST(Maser, UndrivenIsBlockDiagonal) {
  const auto m = reference_maser(0.0);
  const Operator rho = steady_state(build_liouvillian(m));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_LT(std::abs(rho(i, j)), 1e-12);
      }
  // Each bath alone equilibrates level 3 with its lower level.
  EXPECT_NEAR(rho(2, 2).real() / rho(0, 0).real(), 5.0 / 6.0, 1e-10);
  EXPECT_NEAR(rho(2, 2).real() / rho(1, 1).real(), 0.01 / 1.01, 1e-10);
}

TEST(Maser, MislabeledGroupViolatesPairing) {
  auto m = reference_maser();
  m.channels[3].group = 0;
  const auto r = validate(m, ValidationScope::thermodynamic);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.has("group_pairing"));
  EXPECT_THROW(require_valid(m, ValidationScope::thermodynamic), ModelError);
  // Kinetic bounds tolerate it, with a warning.
  const auto g = validate(m);
  EXPECT_TRUE(g.ok());
}

TEST(Classical, TwoState) {
  const auto m = two_state(1.0, 2.0);
  EXPECT_TRUE(m.classical);
  ASSERT_EQ(m.channels.size(), 2u);
  EXPECT_EQ(m.channels[0].group, 0);
  EXPECT_EQ(m.channels[1].group, 1);
  EXPECT_TRUE(validate(m).ok());
  EXPECT_EQ(m.hamiltonian.norm(), 0.0);
}

TEST(Classical, UnidirectionalCycle) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(3, 3);
  r(1, 0) = r(2, 1) = r(0, 2) = 1.0;
  Eigen::MatrixXi g = Eigen::MatrixXi::Zero(3, 3);
  g(2, 1) = 1;
  const auto m = build_classical_network(r, g);
  EXPECT_EQ(m.channels.size(), 3u);
  EXPECT_TRUE(validate(m).ok());
  EXPECT_FALSE(validate(m, ValidationScope::thermodynamic).ok());
}

TEST(Classical, NegativeRateRejected) {
  Eigen::MatrixXd r(2, 2);
  r << 0.0, 1.0, -1.0, 0.0;
  EXPECT_THROW(build_classical_network(r, Eigen::MatrixXi::Zero(2, 2)), ModelError);
}

TEST(Classical, HamiltonianBreaksClassicalFlag) {
  auto m = two_state(1.0, 2.0);
  m.hamiltonian(0, 1) = m.hamiltonian(1, 0) = 0.3;
  const auto r = validate(m);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.has("classical_flag"));
}

TEST(Observables, CurrentAndSupport) {
  const auto m = reference_maser();
  const auto heat = weights("J", {1, -1, 0, 0});
  const auto count = weights("N", {0, 0, 1, 1});
  EXPECT_TRUE(is_current(heat, m));
  EXPECT_FALSE(is_current(count, m));
  EXPECT_EQ(support_group(heat, m), 0);
  EXPECT_EQ(support_group(count, m), 1);
  EXPECT_EQ(support_group(weights("0", {0, 0, 0, 0}), m), -1);
  EXPECT_THROW(support_group(weights("mixed", {1, 0, 1, 0}), m), ModelError);
}

TEST(Validate, BuiltinsPass) {
  EXPECT_TRUE(validate(reference_qubit()).ok());
  EXPECT_TRUE(validate(reference_maser()).ok());
  EXPECT_TRUE(validate(three_state_cycle(), ValidationScope::thermodynamic).ok());
}
