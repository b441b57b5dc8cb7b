#pragma once

#include <complex>
#include <Eigen/Dense>

namespace superfid {

using complex_t = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

// Vectorization is row-major throughout: vec(M)[i*cols + j] = M(i,j), so that
// vec(|psi><phi|) = |psi> (x) conj(|phi>) and (A (x) B) vec(X) = vec(A X B^T).
// Every superoperator formula in this library is stated in this convention.
cvec vec(const cmat& M);

// Inverse of vec for the given shape. Throws std::invalid_argument if
// v.size() != rows*cols.
cmat unvec(const cvec& v, Eigen::Index rows, Eigen::Index cols);

// Kronecker product with block structure A(i,j)*B.
cmat kron(const cmat& A, const cmat& B);

// Reshuffle of a d^2 x d^2 matrix: (M^R)_{(i,j),(k,l)} = M_{(i,k),(j,l)} with
// row-major pair indices. Involutive. Maps a natural representation to the
// corresponding Choi matrix and back.
cmat reshuffle(const cmat& M);

// exp(A) by scaling-and-squaring with a Pade kernel. A must be square.
cmat matrix_exponential(const cmat& A);

struct HermitianEig {
  rvec values;   // sorted descending
  cmat vectors;  // orthonormal columns, vectors.col(k) pairs with values[k]
};

// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
// (H + H^dag)/2 when its anti-Hermitian part is below herm_tol (max-entry
// norm); otherwise throws std::invalid_argument.
HermitianEig hermitian_eig(const cmat& H, double herm_tol = 1e-10);

// (1/2)||A - B||_1 via the eigenvalues of the Hermitian difference.
double trace_distance(const cmat& A, const cmat& B);

// max-entry norm of the anti-Hermitian part, 0 for exactly Hermitian input
double hermiticity_defect(const cmat& M);

inline cmat sigma_x() {
  cmat s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline cmat sigma_y() {
  cmat s(2, 2);
  s << 0, complex_t(0, -1), complex_t(0, 1), 0;
  return s;
}

inline cmat sigma_z() {
  cmat s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

// raising operator |1><0|
inline cmat sigma_plus() {
  cmat s = cmat::Zero(2, 2);
  s(1, 0) = 1;
  return s;
}

// lowering operator |0><1|
inline cmat sigma_minus() {
  cmat s = cmat::Zero(2, 2);
  s(0, 1) = 1;
  return s;
}

}  // namespace superfid
