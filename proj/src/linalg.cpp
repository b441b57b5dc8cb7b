#include "superfid/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace superfid {

using Eigen::Index;

cvec vec(const cmat& M) {
  // Eigen stores column-major; transposing first yields the row-major flatten.
  cmat t = M.transpose();
  return Eigen::Map<const cvec>(t.data(), t.size());
}

cmat unvec(const cvec& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw std::invalid_argument("unvec: vector length does not match rows*cols");
  using RowMajor = Eigen::Matrix<complex_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(v.data(), rows, cols);
}

cmat kron(const cmat& A, const cmat& B) {
  cmat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

cmat reshuffle(const cmat& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("reshuffle: matrix must be square");
  const Index d2 = M.rows();
  const Index d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(d2))));
  if (d * d != d2)
    throw std::invalid_argument("reshuffle: dimension must be a perfect square");
  cmat out(d2, d2);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l)
          out(i * d + j, k * d + l) = M(i * d + k, j * d + l);
  return out;
}

cmat matrix_exponential(const cmat& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  return A.exp();
}

double hermiticity_defect(const cmat& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("hermiticity_defect: matrix must be square");
  if (M.size() == 0) return 0.0;
  return 0.5 * (M - M.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEig hermitian_eig(const cmat& H, double herm_tol) {
  if (hermiticity_defect(H) > herm_tol)
    throw std::invalid_argument("hermitian_eig: input is not Hermitian within tolerance");
  cmat sym = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver did not converge");
  // Eigen sorts ascending; flip to descending.
  HermitianEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double trace_distance(const cmat& A, const cmat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("trace_distance: shapes must match");
  HermitianEig diff = hermitian_eig(A - B);
  return 0.5 * diff.values.cwiseAbs().sum();
}

}  // namespace superfid
