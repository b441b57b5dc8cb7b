#pragma once

#include <vector>

#include "superfid/linalg.hpp"

namespace superfid {

// Positive semidefinite, unit-trace operator. The constructor validates
// Hermiticity, positivity (eigenvalues >= -tol) and trace within tol.
class DensityOperator {
 public:
  explicit DensityOperator(cmat m, double tol = 1e-10);

  const cmat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double purity() const;  // Tr rho^2
  Eigen::Index rank(double tol = 1e-12) const;

  static DensityOperator pure(const cvec& psi);
  static DensityOperator maximally_mixed(Eigen::Index d);

 private:
  cmat m_;
};

// A completely positive map in Kraus form, Phi(rho) = sum_i K_i rho K_i^dag.
// Construction only checks that the operator list is non-empty and uniformly
// shaped; trace preservation is a separate, explicit check (adjoint channels
// are CP but generally not TP).
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<cmat> ops);

  const std::vector<cmat>& operators() const { return ops_; }
  Eigen::Index d_in() const { return d_in_; }
  Eigen::Index d_out() const { return d_out_; }
  std::size_t size() const { return ops_.size(); }

  static KrausChannel identity(Eigen::Index d);
  // single-operator channel rho -> U rho U^dag; throws if U is not unitary
  static KrausChannel unitary(const cmat& U, double tol = 1e-10);

 private:
  std::vector<cmat> ops_;
  Eigen::Index d_in_ = 0;
  Eigen::Index d_out_ = 0;
};

// d^2 x d^2 matrix M acting on row-major vectorized operators,
// M vec(rho) = vec(Phi(rho)).
struct SuperoperatorMatrix {
  cmat matrix;
  Eigen::Index dim = 0;  // d
};

// Reshuffle of the natural representation; PSD iff the map is CP.
struct ChoiMatrix {
  cmat matrix;
  Eigen::Index dim = 0;  // d
};

// Unit vector in X (x) Z purifying a state on X.
class Purification {
 public:
  Purification(cvec state, Eigen::Index d, Eigen::Index d_env);

  const cvec& state() const { return state_; }
  Eigen::Index d() const { return d_; }
  Eigen::Index d_env() const { return d_env_; }

 private:
  cvec state_;
  Eigen::Index d_ = 0;
  Eigen::Index d_env_ = 0;
};

// ||sum_i K_i^dag K_i - I||_max
double trace_preservation_residual(const KrausChannel& ch);

// true iff the channel is trace-preserving within tol. Complete positivity
// is automatic in Kraus form.
bool validate_cptp(const KrausChannel& ch, double tol = 1e-8);

DensityOperator apply(const KrausChannel& ch, const DensityOperator& rho);

// (Phi (x) 1_Z) applied to |zeta><zeta|; returns the joint output state.
DensityOperator apply_extended(const KrausChannel& ch, const Purification& zeta);

// Kraus set {K_i^dag}; satisfies Tr(Phi(A) B) = Tr(A Phi^dag(B)).
KrausChannel adjoint_channel(const KrausChannel& ch);

// Kraus set {A_i^dag B_j} of Phi^dag o Psi, i-major over pairs (i,j).
KrausChannel compose_adjoint_with(const KrausChannel& a, const KrausChannel& b);

// M = sum_i K_i (x) conj(K_i)
SuperoperatorMatrix natural_representation(const KrausChannel& ch);

ChoiMatrix choi_from_natural(const SuperoperatorMatrix& M);

// One Kraus operator sqrt(lambda_i) unvec(v_i) per Choi eigenvalue above the
// cutoff (default 1e-10 * lambda_max). Throws if an eigenvalue is below
// -cutoff (the matrix is not a CP map's Choi matrix).
KrausChannel kraus_from_choi(const ChoiMatrix& D);
KrausChannel kraus_from_choi(const ChoiMatrix& D, double tol);

// |zeta> = vec(sqrt(sigma) U) for an isometry-like U (d x d_env rows of the
// eigenbasis by default, zero-padded). A custom U must satisfy
// U U^dag = projector onto im(sigma).
Purification purify(const DensityOperator& sigma, Eigen::Index d_env);
Purification purify(const DensityOperator& sigma, Eigen::Index d_env, const cmat& U);

// Trace over the environment (second, d_env-sized) factor.
DensityOperator partial_trace_env(const DensityOperator& joint, Eigen::Index d,
                                  Eigen::Index d_env);
cmat partial_trace_env(const cmat& joint, Eigen::Index d, Eigen::Index d_env);

// Channel mapping every input to xi. Kraus set {sqrt(lambda_i)|lambda_i><j|}
// over eigenpairs of xi (i-major) and basis indices j.
KrausChannel erasure_channel(const DensityOperator& xi);

}  // namespace superfid
