#include "superfid/fidelity.hpp"

#include <cmath>
#include <stdexcept>

namespace superfid {

using Eigen::Index;

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Square roots turn eigenvalue/purity round-off (~1e-16) into ~1e-8 absolute
// error, so quantities indistinguishable from zero are snapped to zero before
// the root. Keeps exact identities (pure states, unitary channels) exact.
constexpr double kZeroFloor = 1e-12;

double purity_deficit(double purity) {
  double x = 1.0 - purity;
  return x < kZeroFloor ? 0.0 : x;
}

cmat psd_sqrt(const cmat& m) {
  HermitianEig eig = hermitian_eig(m, 1e-8);
  rvec clamped = eig.values.cwiseMax(0.0);
  return eig.vectors * clamped.cwiseSqrt().asDiagonal() * eig.vectors.adjoint();
}

// T_{ij} = Tr(sigma A_i^dag B_j) = <vec(A_i), vec(B_j sigma)> as one
// Hilbert-Schmidt Gram product.
cmat overlap_matrix(const KrausChannel& a, const KrausChannel& b, const cmat& sigma) {
  cmat va(a.d_out() * a.d_in(), static_cast<Index>(a.size()));
  for (Index i = 0; i < static_cast<Index>(a.size()); ++i)
    va.col(i) = vec(a.operators()[static_cast<std::size_t>(i)]);
  cmat vb(b.d_out() * b.d_in(), static_cast<Index>(b.size()));
  for (Index j = 0; j < static_cast<Index>(b.size()); ++j)
    vb.col(j) = vec(b.operators()[static_cast<std::size_t>(j)] * sigma);
  return va.adjoint() * vb;
}

void require_compatible(const KrausChannel& a, const KrausChannel& b,
                        const DensityOperator& sigma, const char* what) {
  if (a.d_in() != b.d_in() || a.d_out() != b.d_out())
    throw std::invalid_argument(std::string(what) + ": channel shapes must match");
  if (sigma.dim() != a.d_in())
    throw std::invalid_argument(std::string(what) + ": state dimension must match channel input");
}

}  // namespace

double fidelity(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimensions must match");
  cmat root = psd_sqrt(a.matrix());
  cmat inner = root * b.matrix() * root;
  HermitianEig eig = hermitian_eig(inner, 1e-8);
  double floor = kZeroFloor * std::max(0.0, eig.values.maxCoeff());
  double sum = 0.0;
  for (Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > floor) sum += std::sqrt(eig.values(i));
  return clamp01(sum);
}

double superfidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("superfidelity: dimensions must match");
  double cross = (rho.matrix() * sigma.matrix()).trace().real();
  double g = cross + std::sqrt(purity_deficit(rho.purity())) *
                         std::sqrt(purity_deficit(sigma.purity()));
  return clamp01(g);
}

double kraus_overlap_sum(const KrausChannel& a, const KrausChannel& b,
                         const DensityOperator& sigma) {
  require_compatible(a, b, sigma, "kraus_overlap_sum");
  return overlap_matrix(a, b, sigma.matrix()).squaredNorm();
}

double channel_fidelity(const KrausChannel& ch, const DensityOperator& sigma) {
  if (sigma.dim() != ch.d_in() || ch.d_in() != ch.d_out())
    throw std::invalid_argument("channel_fidelity: state dimension must match channel");
  double sum = 0.0;
  for (const cmat& k : ch.operators()) sum += std::norm((sigma.matrix() * k).trace());
  return clamp01(std::sqrt(sum));
}

double channel_superfidelity(const KrausChannel& a, const KrausChannel& b,
                             const DensityOperator& sigma) {
  require_compatible(a, b, sigma, "channel_superfidelity");
  double cross = kraus_overlap_sum(a, b, sigma);
  double pa = kraus_overlap_sum(a, a, sigma);
  double pb = kraus_overlap_sum(b, b, sigma);
  double g = cross + std::sqrt(purity_deficit(pa)) * std::sqrt(purity_deficit(pb));
  return clamp01(g);
}

double channel_superfidelity_oracle(const KrausChannel& a, const KrausChannel& b,
                                    const DensityOperator& sigma, Index d_env) {
  require_compatible(a, b, sigma, "channel_superfidelity_oracle");
  Purification zeta = purify(sigma, d_env);
  return superfidelity(apply_extended(a, zeta), apply_extended(b, zeta));
}

double channel_superfidelity_oracle(const KrausChannel& a, const KrausChannel& b,
                                    const DensityOperator& sigma, Index d_env,
                                    const cmat& isometry) {
  require_compatible(a, b, sigma, "channel_superfidelity_oracle");
  Purification zeta = purify(sigma, d_env, isometry);
  return superfidelity(apply_extended(a, zeta), apply_extended(b, zeta));
}

double two_channel_fidelity_oracle(const KrausChannel& a, const KrausChannel& b,
                                   const DensityOperator& sigma, Index d_env) {
  require_compatible(a, b, sigma, "two_channel_fidelity_oracle");
  Purification zeta = purify(sigma, d_env);
  return fidelity(apply_extended(a, zeta), apply_extended(b, zeta));
}

ErasureGch erasure_unitary_gch(const DensityOperator& xi, const cmat& U,
                               const DensityOperator& sigma) {
  if (U.rows() != U.cols() ||
      (U.adjoint() * U - cmat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("erasure_unitary_gch: U must be unitary");
  if (xi.dim() != sigma.dim() || xi.dim() != U.rows())
    throw std::invalid_argument("erasure_unitary_gch: dimensions must match");

  double value =
      channel_superfidelity(erasure_channel(xi), KrausChannel::unitary(U), sigma);
  double direct =
      (sigma.matrix() * sigma.matrix() * U.adjoint() * xi.matrix() * U).trace().real();
  if (std::abs(value - direct) > 1e-10)
    throw std::runtime_error("erasure_unitary_gch: closed form and trace form disagree");

  rvec lambda = hermitian_eig(xi.matrix(), 1e-8).values;   // descending
  rvec mu = hermitian_eig(sigma.matrix(), 1e-8).values;    // descending
  double bound = lambda.dot(mu);
  if (value > bound + 1e-10)
    throw std::runtime_error("erasure_unitary_gch: eigenvalue-ordering bound violated");
  return ErasureGch{value, bound};
}

double first_order_sensitivity(const KrausChannel& ch, const cmat& H,
                               const DensityOperator& sigma) {
  if (H.rows() != H.cols() || H.rows() != ch.d_out())
    throw std::invalid_argument("first_order_sensitivity: H must be square on the output space");
  if (hermiticity_defect(H) > 1e-10)
    throw std::invalid_argument("first_order_sensitivity: H must be Hermitian");
  if (sigma.dim() != ch.d_in())
    throw std::invalid_argument("first_order_sensitivity: state dimension must match channel");

  cmat t0 = overlap_matrix(ch, ch, sigma.matrix());
  // T1_{ij} = Tr(sigma A_i^dag H A_j), via the same Gram construction with
  // B_j = H A_j.
  std::vector<cmat> perturbed;
  perturbed.reserve(ch.size());
  for (const cmat& k : ch.operators()) perturbed.push_back(H * k);
  cmat t1 = overlap_matrix(ch, KrausChannel(std::move(perturbed)), sigma.matrix());

  double c1 = 0.0;
  for (Index i = 0; i < t0.rows(); ++i)
    for (Index j = 0; j < t0.cols(); ++j)
      c1 += 2.0 * (t1(i, j) * std::conj(t0(i, j))).imag();
  return c1;
}

double perturbed_gch(const KrausChannel& ch, const cmat& H, double eps,
                     const DensityOperator& sigma) {
  if (H.rows() != H.cols() || H.rows() != ch.d_out())
    throw std::invalid_argument("perturbed_gch: H must be square on the output space");
  if (hermiticity_defect(H) > 1e-10)
    throw std::invalid_argument("perturbed_gch: H must be Hermitian");
  if (sigma.dim() != ch.d_in())
    throw std::invalid_argument("perturbed_gch: state dimension must match channel");

  cmat u_eps = matrix_exponential(complex_t(0.0, -eps) * H);
  std::vector<cmat> rotated;
  rotated.reserve(ch.size());
  for (const cmat& k : ch.operators()) rotated.push_back(u_eps * k);
  KrausChannel perturbed(std::move(rotated));

  double cross = kraus_overlap_sum(ch, perturbed, sigma);
  double base = kraus_overlap_sum(ch, ch, sigma);
  return clamp01(1.0 + cross - base);
}

}  // namespace superfid
