#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "qbounds/errors.hpp"
#include "qbounds/linalg.hpp"

using namespace qbounds;
using namespace qbounds::testing;

namespace {

Operator random_hermitian(int d, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n;
  Operator a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(gen), n(gen));
  return (a + a.adjoint()) / 2.0;
}

Operator projector(int d, int i) {
  Operator p = Operator::Zero(d, d);
  p(i, i) = 1.0;
  return p;
}

}  // namespace

TEST(Vectorize, IdentityHasTraceOverlapTwo) {
  const auto v = vectorize(Operator::Identity(2, 2));
  EXPECT_NEAR(std::abs(trace_functional(2).dot(v) - 2.0), 0.0, 1e-15);
}

TEST(Vectorize, SigmaMinusHasOneEntry) {
  Operator sm = Operator::Zero(2, 2);
  sm(0, 1) = 1.0;
  const auto v = vectorize(sm);
  int nonzero = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) nonzero += std::abs(v(i)) > 0.0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_DOUBLE_EQ(v.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Vectorize, RoundTripIsExact) {
  const Operator h = random_hermitian(3, 7);
  EXPECT_EQ(unvectorize(vectorize(h)), h);
}

TEST(Vectorize, SandwichMatchesProduct) {
  const Operator a = random_hermitian(3, 1) + kI * random_hermitian(3, 2);
  const Operator x = random_hermitian(3, 3);
  const Operator b = random_hermitian(3, 4) - kI * random_hermitian(3, 5);
  const Operator direct = a * x * b;
  const Operator via = unvectorize(sandwich(a, b) * vectorize(x));
  EXPECT_LT(max_abs(direct - via), 1e-12);
}

TEST(Vectorize, RejectsNonSquare) {
  EXPECT_THROW(unvectorize(Eigen::VectorXcd::Zero(5)), DimensionError);
}

TEST(Liouvillian, PureDecayRates) {
  const auto m = build_driven_qubit({0.0, 0.0, 1.0, 0.0});
  const Operator d = build_liouvillian(m).apply(projector(2, 1));
  EXPECT_NEAR(d(1, 1).real(), -1.0, 1e-14);
  EXPECT_NEAR(d(0, 0).real(), 1.0, 1e-14);
}

TEST(Liouvillian, TwoStateRelaxationRate) {
  const double a = 1.3, b = 0.4;
  const auto sd = spectral_decomposition(build_liouvillian(two_state(a, b)));
  // Population sector: {0, -(a+b)}; coherences decay at -(a+b)/2.
  int found = 0;
  for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
    if (std::abs(sd.eigenvalues(j) + (a + b)) < 1e-12) ++found;
  }
  EXPECT_EQ(found, 1);
}

TEST(Liouvillian, TracePreserving) {
  for (const auto& m : builtin_models()) {
    const auto l = build_liouvillian(m);
    const auto one = trace_functional(m.dim());
    EXPECT_LT((one.adjoint() * l.matrix).cwiseAbs().maxCoeff(), 1e-10) << m.name;
    Operator rho0 = Operator::Zero(m.dim(), m.dim());
    rho0(0, 0) = 1.0;
    for (double t : {0.1, 1.0, 10.0}) {
      const Operator rho = propagate(l, rho0, t);
      EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
      EXPECT_LT(max_abs(rho - rho.adjoint()), 1e-10);
    }
  }
}

TEST(Liouvillian, GroupPartsSumToFull) {
  const auto m = reference_maser();
  const auto parts = build_liouvillian_parts(m);
  const Eigen::MatrixXcd sum = parts.dissipator[0].matrix + parts.dissipator[1].matrix +
                               commutator_superoperator(m.hamiltonian).matrix;
  EXPECT_LT(max_abs(sum - parts.full.matrix), 1e-13);
  EXPECT_LT(max_abs(parts.group[0].matrix - parts.dissipator[0].matrix -
                    commutator_superoperator(m.hamiltonian).matrix),
            1e-13);
}

TEST(SteadyState, DecayToGround) {
  const Operator rho = steady_state(build_liouvillian(build_driven_qubit({0.0, 0.0, 1.0, 0.0})));
  EXPECT_LT(max_abs(rho - projector(2, 0)), 1e-12);
}

TEST(SteadyState, ThermalPopulation) {
  const double n = 2.5;
  const Operator rho = steady_state(build_liouvillian(build_driven_qubit({0.0, 0.0, 1.0, n})));
  EXPECT_NEAR(rho(1, 1).real(), n / (2 * n + 1), 1e-12);
  EXPECT_LT(std::abs(rho(0, 1)), 1e-12);
}

TEST(SteadyState, MaserFullRankAndStationary) {
  const auto l = build_liouvillian(reference_maser());
  const Operator rho = steady_state(l);
  EXPECT_LT(l.apply(rho).norm(), 1e-10);
  Eigen::SelfAdjointEigenSolver<Operator> es(rho);
  EXPECT_GT(es.eigenvalues().minCoeff(), 1e-6);
  EXPECT_LT(max_abs(propagate(l, Operator::Identity(3, 3) / 3.0, 400.0) - rho), 1e-8);
}

TEST(SteadyState, DegenerateKernelRejected) {
  // Two disconnected pairs of states.
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 4);
  r(1, 0) = r(0, 1) = 1.0;
  r(3, 2) = r(2, 3) = 1.0;
  Eigen::MatrixXi g = Eigen::MatrixXi::Zero(4, 4);
  g(2, 3) = g(3, 2) = 1;
  EXPECT_THROW(steady_state(build_liouvillian(build_classical_network(r, g))), NonErgodicModel);
}

TEST(Spectral, OneZeroModeAndBiorthogonal) {
  for (const auto& m : builtin_models()) {
    const auto s = spectral_decomposition(build_liouvillian(m));
    int zeros = 0;
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
      if (std::abs(s.eigenvalues(j)) < 1e-9) {
        ++zeros;
      } else {
        EXPECT_LT(s.eigenvalues(j).real(), 0.0);
      }
    }
    EXPECT_EQ(zeros, 1) << m.name;
    const Eigen::MatrixXcd id = s.left * s.right;
    EXPECT_LT(max_abs(id - Eigen::MatrixXcd::Identity(id.rows(), id.cols())), 1e-8) << m.name;
  }
}

TEST(Spectral, ReconstructsPropagator) {
  const auto l = build_liouvillian(reference_maser());
  const auto s = spectral_decomposition(l);
  for (double t : {0.5, 3.0, 10.0}) {
    const Eigen::VectorXcd e = (s.eigenvalues * t).array().exp();
    const Eigen::MatrixXcd rebuilt = s.right * e.asDiagonal() * s.left;
    EXPECT_LT(max_abs(rebuilt - propagator(l, t).matrix), 1e-8);
  }
}

// Deterministic oracles for the Drazin inverse: algebraic identities, the
// spectral sum over non-zero modes, and -int_0^inf e^{Lt}(1 - P) dt.
TEST(Drazin, Identities) {
  for (const auto& m : builtin_models()) {
    const auto l = build_liouvillian(m);
    const Operator rho = steady_state(l);
    const auto lp = drazin_inverse(l, rho);
    const Eigen::MatrixXcd p = vectorize(rho) * trace_functional(m.dim()).adjoint();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(p.rows(), p.cols());
    EXPECT_LT(max_abs(lp.matrix * l.matrix - (id - p)), 1e-9) << m.name;
    EXPECT_LT(max_abs(l.matrix * lp.matrix - (id - p)), 1e-9) << m.name;
    EXPECT_LT(max_abs(l.matrix * lp.matrix * l.matrix - l.matrix), 1e-9) << m.name;
    EXPECT_LT((lp.matrix * vectorize(rho)).cwiseAbs().maxCoeff(), 1e-10) << m.name;
    EXPECT_LT((trace_functional(m.dim()).adjoint() * lp.matrix).cwiseAbs().maxCoeff(), 1e-9) << m.name;
  }
}

TEST(Drazin, MatchesSpectralSum) {
  for (const auto& m : builtin_models()) {
    const auto l = build_liouvillian(m);
    const auto lp = drazin_inverse(l, steady_state(l));
    const auto s = spectral_decomposition(l);
    Eigen::VectorXcd inv = Eigen::VectorXcd::Zero(s.eigenvalues.size());
    for (Eigen::Index j = 0; j < inv.size(); ++j) {
      if (j != s.stationary_index) inv(j) = 1.0 / s.eigenvalues(j);
    }
    EXPECT_LT(max_abs(s.right * inv.asDiagonal() * s.left - lp.matrix), 1e-9) << m.name;
  }
}

TEST(Drazin, MatchesTimeIntegral) {
  const auto m = reference_qubit();
  const auto l = build_liouvillian(m);
  const Operator rho = steady_state(l);
  const Eigen::MatrixXcd p = vectorize(rho) * trace_functional(2).adjoint();
  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(4, 4) - p;
  // Composite Simpson on [0, 60]; the slowest mode decays at rate ~1.
  const int n = 6000;
  const double h = 60.0 / n;
  const Eigen::MatrixXcd step = propagator(l, h).matrix;
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(4, 4);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * e * q;
    e = step * e;
  }
  acc *= h / 3.0;
  EXPECT_LT(max_abs(-acc - drazin_inverse(l, rho).matrix), 1e-9);
}

TEST(Drazin, TwoStatePopulationDifference) {
  const double a = 1.0, b = 2.0;
  const auto l = build_liouvillian(two_state(a, b));
  const auto lp = drazin_inverse(l, steady_state(l));
  Operator x = Operator::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = -1.0;
  EXPECT_LT(max_abs(lp.apply(x) + x / (a + b)), 1e-12);
}

TEST(Propagate, ZeroTimeIsIdentity) {
  const auto l = build_liouvillian(reference_qubit());
  EXPECT_LT(max_abs(propagator(l, 0.0).matrix - Eigen::MatrixXcd::Identity(4, 4)), 1e-15);
  EXPECT_LT(max_abs(nonunitary_propagator(reference_qubit().effective_hamiltonian(), 0.0) - Operator::Identity(2, 2)),
            1e-15);
}

TEST(Propagate, ExcitedDecay) {
  const auto l = build_liouvillian(build_driven_qubit({0.0, 0.0, 1.0, 0.0}));
  EXPECT_NEAR(propagate(l, projector(2, 1), 1.0)(1, 1).real(), std::exp(-1.0), 1e-9);
  EXPECT_NEAR(std::exp(-1.0), 0.36788, 1e-5);
}

TEST(Propagate, RelaxesToSteadyState) {
  for (const auto& m : builtin_models()) {
    const auto l = build_liouvillian(m);
    const auto s = spectral_decomposition(l);
    double gap = 1e300;
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
      if (j != s.stationary_index) gap = std::min(gap, -s.eigenvalues(j).real());
    }
    EXPECT_LT(max_abs(propagate(l, projector(m.dim(), 0), 30.0 / gap) - steady_state(l)), 1e-8) << m.name;
  }
}

TEST(Propagate, NonUnitaryContracts) {
  const Operator heff = reference_maser().effective_hamiltonian();
  StateVector psi = StateVector::Zero(3);
  psi(1) = 1.0;
  double last = 1.0;
  for (double t : {0.1, 0.5, 1.0, 3.0}) {
    const double n = (nonunitary_propagator(heff, t) * psi).norm();
    EXPECT_LE(n, last + 1e-15);
    last = n;
  }
}

TEST(MatrixLog, MaximallyMixed) {
  EXPECT_LT(max_abs(matrix_log(Operator::Identity(2, 2) / 2.0) + std::log(2.0) * Operator::Identity(2, 2)), 1e-14);
}

TEST(MatrixLog, Diagonal) {
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = 0.75;
  rho(1, 1) = 0.25;
  const Operator lg = matrix_log(rho);
  EXPECT_NEAR(lg(0, 0).real(), std::log(0.75), 1e-14);
  EXPECT_NEAR(lg(1, 1).real(), std::log(0.25), 1e-14);
}

TEST(MatrixLog, RoundTripOnMaserSteadyState) {
  const Operator rho = steady_state(build_liouvillian(reference_maser()));
  EXPECT_LT(max_abs(expm(matrix_log(rho)) - rho), 1e-9);
}

TEST(MatrixLog, SingularRejected) { EXPECT_THROW(matrix_log(projector(2, 0)), SingularState); }
