#pragma once

// Dense complex linear algebra over Hilbert space (d x d operators) and
// Liouville space (d^2 x d^2 superoperators).
//
// Vectorization convention: column stacking. For any operators A, X, B
//
//     vec(A X B) = (B^T (x) A) vec(X)
//
// and every superoperator in the library is assembled through `sandwich`,
// which is the only place where this Kronecker ordering is written down.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qbounds {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using LiouvilleVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class SuperKind { generic, liouvillian, jump, dissipator, drazin, propagator };

struct Superoperator {
  Eigen::MatrixXcd matrix;
  SuperKind kind = SuperKind::generic;

  int hilbert_dim() const;
  Operator apply(const Operator& op) const;
};

// Eigen-decomposition of a superoperator with biorthogonal left/right vectors:
// left.row(j) * right.col(k) = delta_jk.
struct SpectralData {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  Eigen::Index stationary_index = -1;
};

// -- basic operator helpers -------------------------------------------------

double max_abs(const Eigen::MatrixXcd& m);
bool is_hermitian(const Operator& op, double tol = 1e-12);
bool is_finite(const Eigen::MatrixXcd& m);
// Throws DimensionError unless op is square, finite and at least 2x2.
void check_operator(const Operator& op, const char* what);

LiouvilleVector vectorize(const Operator& op);
Operator unvectorize(const LiouvilleVector& v);
// <<1| as a column vector: trace(X) = trace_functional(d).dot(vectorize(X)).
LiouvilleVector trace_functional(int dim);

// Matrix of the map X -> left * X * right.
Eigen::MatrixXcd sandwich(const Operator& left, const Operator& right);

// X -> -i[H, X]
Superoperator commutator_superoperator(const Operator& hamiltonian);
// X -> L X L^dag - 1/2 {L^dag L, X}
Superoperator dissipator_superoperator(const Operator& jump);
// X -> weight * L X L^dag
Superoperator jump_superoperator(const Operator& jump, double weight = 1.0);

// -- Liouvillian analysis ---------------------------------------------------

SpectralData spectral_decomposition(const Superoperator& liouvillian);

// Unique stationary state. Throws NonErgodicModel when the zero eigenvalue is
// degenerate (or absent).
Operator steady_state(const Superoperator& liouvillian);

// Drazin inverse L^+ obtained from the deflated inverse (L + P)^{-1} - P with
// P = |rho_ss>><<1|.
Superoperator drazin_inverse(const Superoperator& liouvillian, const Operator& rho_ss);

// -- exponentials and logarithms ---------------------------------------------

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m);
// e^{L t}
Superoperator propagator(const Superoperator& liouvillian, double t);
Operator propagate(const Superoperator& liouvillian, const Operator& state, double t);
// exp(-i H_eff t) for the non-Hermitian effective Hamiltonian.
Operator nonunitary_propagator(const Operator& heff, double t);

// Hermitian logarithm; throws SingularState if an eigenvalue is <= 1e-12.
Operator matrix_log(const Operator& rho);
double von_neumann_entropy(const Operator& rho);

}  // namespace qbounds
