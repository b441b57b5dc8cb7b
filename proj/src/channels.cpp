#include "superfid/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace superfid {

using Eigen::Index;

namespace {

void require_finite(const cmat& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

DensityOperator::DensityOperator(cmat m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("DensityOperator: matrix must be square and non-empty");
  require_finite(m_, "DensityOperator");
  if (std::abs(m_.trace() - complex_t(1.0, 0.0)) > tol)
    throw std::invalid_argument("DensityOperator: trace must be 1");
  HermitianEig eig = hermitian_eig(m_, tol);  // throws if not Hermitian within tol
  if (eig.values.minCoeff() < -tol)
    throw std::invalid_argument("DensityOperator: matrix is not positive semidefinite");
}

double DensityOperator::purity() const {
  return (m_ * m_).trace().real();
}

Index DensityOperator::rank(double tol) const {
  HermitianEig eig = hermitian_eig(m_, 1e-8);
  return (eig.values.array() > tol).count();
}

DensityOperator DensityOperator::pure(const cvec& psi) {
  double n = psi.norm();
  if (n == 0.0) throw std::invalid_argument("DensityOperator::pure: zero vector");
  cvec u = psi / n;
  return DensityOperator(u * u.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Index d) {
  if (d <= 0) throw std::invalid_argument("DensityOperator::maximally_mixed: d must be positive");
  return DensityOperator(cmat::Identity(d, d) / static_cast<double>(d));
}

KrausChannel::KrausChannel(std::vector<cmat> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("KrausChannel: empty operator list");
  d_out_ = ops_.front().rows();
  d_in_ = ops_.front().cols();
  if (d_out_ == 0 || d_in_ == 0)
    throw std::invalid_argument("KrausChannel: operators must be non-empty matrices");
  for (const cmat& k : ops_) {
    if (k.rows() != d_out_ || k.cols() != d_in_)
      throw std::invalid_argument("KrausChannel: operators must share one shape");
    require_finite(k, "KrausChannel");
  }
}

KrausChannel KrausChannel::identity(Index d) {
  return KrausChannel({cmat::Identity(d, d)});
}

KrausChannel KrausChannel::unitary(const cmat& U, double tol) {
  if (U.rows() != U.cols()) throw std::invalid_argument("KrausChannel::unitary: matrix must be square");
  cmat defect = U.adjoint() * U - cmat::Identity(U.rows(), U.cols());
  if (defect.cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("KrausChannel::unitary: matrix is not unitary");
  return KrausChannel({U});
}

double trace_preservation_residual(const KrausChannel& ch) {
  cmat sum = cmat::Zero(ch.d_in(), ch.d_in());
  for (const cmat& k : ch.operators()) sum += k.adjoint() * k;
  return (sum - cmat::Identity(ch.d_in(), ch.d_in())).cwiseAbs().maxCoeff();
}

bool validate_cptp(const KrausChannel& ch, double tol) {
  if (tol <= 0) throw std::invalid_argument("validate_cptp: tolerance must be positive");
  return trace_preservation_residual(ch) <= tol;
}

DensityOperator apply(const KrausChannel& ch, const DensityOperator& rho) {
  if (rho.dim() != ch.d_in())
    throw std::invalid_argument("apply: state dimension does not match channel input");
  cmat out = cmat::Zero(ch.d_out(), ch.d_out());
  for (const cmat& k : ch.operators()) out += k * rho.matrix() * k.adjoint();
  return DensityOperator(std::move(out), 1e-8);
}

DensityOperator apply_extended(const KrausChannel& ch, const Purification& zeta) {
  if (zeta.d() != ch.d_in())
    throw std::invalid_argument("apply_extended: purification dimension does not match channel input");
  // (K (x) I_Z) vec(Z) = vec(K Z) in the row-major convention, so the joint
  // output is assembled from the d x d_env matrix behind the purification.
  cmat zm = unvec(zeta.state(), zeta.d(), zeta.d_env());
  const Index joint_dim = ch.d_out() * zeta.d_env();
  cmat out = cmat::Zero(joint_dim, joint_dim);
  for (const cmat& k : ch.operators()) {
    cvec branch = vec(k * zm);
    out += branch * branch.adjoint();
  }
  return DensityOperator(std::move(out), 1e-8);
}

KrausChannel adjoint_channel(const KrausChannel& ch) {
  std::vector<cmat> ops;
  ops.reserve(ch.size());
  for (const cmat& k : ch.operators()) ops.push_back(k.adjoint());
  return KrausChannel(std::move(ops));
}

KrausChannel compose_adjoint_with(const KrausChannel& a, const KrausChannel& b) {
  if (a.d_out() != b.d_out())
    throw std::invalid_argument("compose_adjoint_with: output dimensions must match");
  std::vector<cmat> ops;
  ops.reserve(a.size() * b.size());
  for (const cmat& ai : a.operators())
    for (const cmat& bj : b.operators()) ops.push_back(ai.adjoint() * bj);
  return KrausChannel(std::move(ops));
}

SuperoperatorMatrix natural_representation(const KrausChannel& ch) {
  if (ch.d_in() != ch.d_out())
    throw std::invalid_argument("natural_representation: channel must map a space to itself");
  const Index d = ch.d_in();
  cmat m = cmat::Zero(d * d, d * d);
  for (const cmat& k : ch.operators()) m += kron(k, k.conjugate());
  return SuperoperatorMatrix{std::move(m), d};
}

ChoiMatrix choi_from_natural(const SuperoperatorMatrix& M) {
  return ChoiMatrix{reshuffle(M.matrix), M.dim};
}

KrausChannel kraus_from_choi(const ChoiMatrix& D, double tol) {
  HermitianEig eig = hermitian_eig(D.matrix, 1e-8);
  const Index d = D.dim;
  std::vector<cmat> ops;
  for (Index i = 0; i < eig.values.size(); ++i) {
    double lambda = eig.values(i);
    if (lambda > tol) {
      ops.push_back(std::sqrt(lambda) * unvec(eig.vectors.col(i), d, d));
    } else if (lambda < -tol) {
      throw std::invalid_argument("kraus_from_choi: matrix has a negative eigenvalue; not a CP map");
    }
  }
  if (ops.empty()) throw std::invalid_argument("kraus_from_choi: no eigenvalue above cutoff");
  return KrausChannel(std::move(ops));
}

KrausChannel kraus_from_choi(const ChoiMatrix& D) {
  double lmax = 0.0;
  if (D.matrix.size() > 0) {
    HermitianEig eig = hermitian_eig(D.matrix, 1e-8);
    lmax = std::max(eig.values(0), 0.0);
  }
  return kraus_from_choi(D, 1e-10 * lmax);
}

Purification::Purification(cvec state, Index d, Index d_env)
    : state_(std::move(state)), d_(d), d_env_(d_env) {
  if (d_ <= 0 || d_env_ <= 0 || state_.size() != d_ * d_env_)
    throw std::invalid_argument("Purification: state length must equal d * d_env");
  if (std::abs(state_.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("Purification: state must be a unit vector");
}

namespace {

// columns of sqrt(sigma) in the eigenbasis: sqrt(sigma) U for the given U
Purification purify_with(const DensityOperator& sigma, Index d_env, const cmat& U) {
  HermitianEig eig = hermitian_eig(sigma.matrix(), 1e-8);
  rvec clamped = eig.values.cwiseMax(0.0);
  cmat sqrt_sigma =
      eig.vectors * clamped.cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
  cvec zeta = vec(sqrt_sigma * U);
  zeta /= zeta.norm();
  return Purification(std::move(zeta), sigma.dim(), d_env);
}

}  // namespace

Purification purify(const DensityOperator& sigma, Index d_env) {
  const Index r = sigma.rank();
  if (d_env < r)
    throw std::invalid_argument("purify: environment dimension is below rank(sigma)");
  HermitianEig eig = hermitian_eig(sigma.matrix(), 1e-8);
  cmat U = cmat::Zero(sigma.dim(), d_env);
  U.leftCols(r) = eig.vectors.leftCols(r);
  return purify_with(sigma, d_env, U);
}

Purification purify(const DensityOperator& sigma, Index d_env, const cmat& U) {
  const Index r = sigma.rank();
  if (d_env < r)
    throw std::invalid_argument("purify: environment dimension is below rank(sigma)");
  if (U.rows() != sigma.dim() || U.cols() != d_env)
    throw std::invalid_argument("purify: U must be d x d_env");
  // U U^dag must be the projector onto the image of sigma.
  HermitianEig eig = hermitian_eig(sigma.matrix(), 1e-8);
  cmat proj = eig.vectors.leftCols(r) * eig.vectors.leftCols(r).adjoint();
  if ((U * U.adjoint() - proj).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("purify: U U^dag is not the projector onto im(sigma)");
  return purify_with(sigma, d_env, U);
}

cmat partial_trace_env(const cmat& joint, Index d, Index d_env) {
  if (joint.rows() != joint.cols() || joint.rows() != d * d_env)
    throw std::invalid_argument("partial_trace_env: dimensions do not factor as d * d_env");
  cmat out = cmat::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k)
      for (Index j = 0; j < d_env; ++j) out(i, k) += joint(i * d_env + j, k * d_env + j);
  return out;
}

DensityOperator partial_trace_env(const DensityOperator& joint, Index d, Index d_env) {
  return DensityOperator(partial_trace_env(joint.matrix(), d, d_env), 1e-8);
}

KrausChannel erasure_channel(const DensityOperator& xi) {
  HermitianEig eig = hermitian_eig(xi.matrix(), 1e-8);
  const Index d = xi.dim();
  std::vector<cmat> ops;
  for (Index i = 0; i < eig.values.size(); ++i) {
    double lambda = eig.values(i);
    if (lambda <= 1e-12) continue;
    for (Index j = 0; j < d; ++j) {
      cmat k = cmat::Zero(d, d);
      k.col(j) = std::sqrt(lambda) * eig.vectors.col(i);
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel(std::move(ops));
}

}  // namespace superfid
