#include "qbounds/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qbounds/errors.hpp"

namespace qbounds {

namespace {

constexpr double kZeroEigenvalueTol = 1e-9;
constexpr double kLogFloor = 1e-12;

int dim_from_liouville_size(Eigen::Index n) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n || d < 1) {
    throw DimensionError("Liouville-space size " + std::to_string(n) + " is not a perfect square");
  }
  return static_cast<int>(d);
}

void check_superoperator(const Superoperator& s) {
  if (s.matrix.rows() != s.matrix.cols()) throw DimensionError("superoperator is not square");
  dim_from_liouville_size(s.matrix.rows());
}

}  // namespace

int Superoperator::hilbert_dim() const { return dim_from_liouville_size(matrix.rows()); }

Operator Superoperator::apply(const Operator& op) const {
  if (op.size() != matrix.cols()) throw DimensionError("superoperator/operator dimension mismatch");
  return unvectorize(matrix * vectorize(op));
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Operator& op, double tol) {
  return op.rows() == op.cols() && max_abs(op - op.adjoint()) <= tol;
}

bool is_finite(const Eigen::MatrixXcd& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void check_operator(const Operator& op, const char* what) {
  if (op.rows() != op.cols()) throw DimensionError(std::string(what) + " is not square");
  if (op.rows() < 2) throw DimensionError(std::string(what) + " must have dimension >= 2");
  if (!is_finite(op)) throw DimensionError(std::string(what) + " has non-finite entries");
}

LiouvilleVector vectorize(const Operator& op) {
  if (op.rows() != op.cols()) throw DimensionError("vectorize: operator is not square");
  // Eigen storage is column-major, so the raw buffer already is vec(op).
  return Eigen::Map<const LiouvilleVector>(op.data(), op.size());
}

Operator unvectorize(const LiouvilleVector& v) {
  const int d = dim_from_liouville_size(v.size());
  return Eigen::Map<const Operator>(v.data(), d, d);
}

LiouvilleVector trace_functional(int dim) {
  return vectorize(Operator::Identity(dim, dim));
}

Eigen::MatrixXcd sandwich(const Operator& left, const Operator& right) {
  if (left.rows() != left.cols() || right.rows() != right.cols() || left.rows() != right.rows()) {
    throw DimensionError("sandwich: operands must be square and of equal dimension");
  }
  return Eigen::kroneckerProduct(right.transpose(), left).eval();
}

Superoperator commutator_superoperator(const Operator& hamiltonian) {
  const Operator id = Operator::Identity(hamiltonian.rows(), hamiltonian.cols());
  return {-kI * (sandwich(hamiltonian, id) - sandwich(id, hamiltonian)), SuperKind::generic};
}

Superoperator dissipator_superoperator(const Operator& jump) {
  const Operator id = Operator::Identity(jump.rows(), jump.cols());
  const Operator decay = jump.adjoint() * jump;
  Eigen::MatrixXcd m = sandwich(jump, jump.adjoint()) - 0.5 * sandwich(decay, id) -
                       0.5 * sandwich(id, decay);
  return {std::move(m), SuperKind::dissipator};
}

Superoperator jump_superoperator(const Operator& jump, double weight) {
  return {weight * sandwich(jump, jump.adjoint()), SuperKind::jump};
}

SpectralData spectral_decomposition(const Superoperator& liouvillian) {
  check_superoperator(liouvillian);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(liouvillian.matrix, true);
  if (solver.info() != Eigen::Success) throw Error("eigen_failure", "Liouvillian eigen-decomposition failed");

  SpectralData out;
  out.eigenvalues = solver.eigenvalues();
  out.right = solver.eigenvectors();
  out.left = out.right.inverse();

  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < out.eigenvalues.size(); ++j) {
    if (std::abs(out.eigenvalues[j]) < kZeroEigenvalueTol) {
      out.stationary_index = j;
      ++count;
    }
  }
  if (count != 1) {
    throw NonErgodicModel("Liouvillian has " + std::to_string(count) +
                          " eigenvalues with |lambda| < 1e-9; a unique steady state is required");
  }
  return out;
}

Operator steady_state(const Superoperator& liouvillian) {
  // Uniqueness check on the spectrum, then a direct solve with one balance
  // row replaced by the trace condition.
  const SpectralData spectrum = spectral_decomposition(liouvillian);
  (void)spectrum;

  const int d = liouvillian.hilbert_dim();
  Eigen::MatrixXcd a = liouvillian.matrix;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(a.rows());
  a.row(0) = trace_functional(d).transpose();
  rhs(0) = 1.0;
  const LiouvilleVector x = a.fullPivLu().solve(rhs);

  Operator rho = unvectorize(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();

  const double residual = max_abs(liouvillian.matrix * vectorize(rho));
  if (!(residual < 1e-10)) {
    throw NonErgodicModel("steady-state residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return rho;
}

Superoperator drazin_inverse(const Superoperator& liouvillian, const Operator& rho_ss) {
  check_superoperator(liouvillian);
  const int d = liouvillian.hilbert_dim();
  if (rho_ss.rows() != d) throw DimensionError("drazin_inverse: steady state dimension mismatch");
  const Eigen::MatrixXcd projector = vectorize(rho_ss) * trace_functional(d).transpose();
  const Eigen::MatrixXcd deflated = liouvillian.matrix + projector;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(deflated);
  if (!lu.isInvertible()) throw NonErgodicModel("deflated Liouvillian is singular");
  return {lu.inverse() - projector, SuperKind::drazin};
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) { return m.exp(); }

Superoperator propagator(const Superoperator& liouvillian, double t) {
  if (t < 0.0) throw Error("negative_time", "propagator: t must be >= 0");
  check_superoperator(liouvillian);
  return {expm(liouvillian.matrix * t), SuperKind::propagator};
}

Operator propagate(const Superoperator& liouvillian, const Operator& state, double t) {
  return propagator(liouvillian, t).apply(state);
}

Operator nonunitary_propagator(const Operator& heff, double t) {
  if (t < 0.0) throw Error("negative_time", "nonunitary_propagator: t must be >= 0");
  return expm(-kI * t * heff);
}

Operator matrix_log(const Operator& rho) {
  if (!is_hermitian(rho, 1e-10)) throw SingularState("matrix_log: argument is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (rho + rho.adjoint()));
  const Eigen::VectorXd& values = solver.eigenvalues();
  if (values.minCoeff() <= kLogFloor) {
    throw SingularState("matrix_log: minimum eigenvalue " + std::to_string(values.minCoeff()) +
                        " <= 1e-12");
  }
  const Eigen::VectorXcd logs = values.array().log().cast<Complex>();
  return solver.eigenvectors() * logs.asDiagonal() * solver.eigenvectors().adjoint();
}

double von_neumann_entropy(const Operator& rho) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (rho + rho.adjoint()));
  double s = 0.0;
  for (double p : solver.eigenvalues()) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

}  // namespace qbounds
