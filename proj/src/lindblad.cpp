#include "superfid/lindblad.hpp"

#include <cmath>
#include <stdexcept>

namespace superfid {

using Eigen::Index;

LindbladGenerator::LindbladGenerator(cmat hamiltonian, std::vector<JumpTerm> jumps)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  if (h_.rows() != h_.cols() || h_.rows() == 0)
    throw std::invalid_argument("LindbladGenerator: Hamiltonian must be square and non-empty");
  if (hermiticity_defect(h_) > 1e-10)
    throw std::invalid_argument("LindbladGenerator: Hamiltonian must be Hermitian");
  for (const JumpTerm& j : jumps_) {
    if (j.op.rows() != h_.rows() || j.op.cols() != h_.cols())
      throw std::invalid_argument("LindbladGenerator: jump operator dimension mismatch");
    if (!(j.rate >= 0.0))
      throw std::invalid_argument("LindbladGenerator: jump rates must be nonnegative");
  }
}

SuperoperatorMatrix generator_matrix(const LindbladGenerator& gen) {
  const Index d = gen.dim();
  const cmat eye = cmat::Identity(d, d);
  const complex_t im(0.0, 1.0);
  cmat f = im * (kron(gen.hamiltonian(), eye) - kron(eye, gen.hamiltonian().conjugate()));
  for (const JumpTerm& j : gen.jumps()) {
    cmat ldl = j.op.adjoint() * j.op;
    f -= j.rate * (kron(j.op, j.op.conjugate()) - 0.5 * kron(ldl, eye) -
                   0.5 * kron(eye, ldl.conjugate()));
  }
  return SuperoperatorMatrix{std::move(f), d};
}

Propagator propagator(const LindbladGenerator& gen, double time) {
  if (!(time >= 0.0)) throw std::invalid_argument("propagator: time must be nonnegative");
  SuperoperatorMatrix f = generator_matrix(gen);
  return Propagator{SuperoperatorMatrix{matrix_exponential(-time * f.matrix), f.dim}, time};
}

KrausChannel single_qubit_channel(double omega, double eps, double time) {
  cmat h = 0.5 * (omega + eps) * sigma_z();
  LindbladGenerator gen(h, {{sigma_minus(), 1.0}, {sigma_plus(), 1.0}});
  Propagator prop = propagator(gen, time);
  return kraus_from_choi(choi_from_natural(prop.matrix));
}

double analytic_gch_single_qubit(const DensityOperator& rho0, double eps, double time) {
  if (rho0.dim() != 2)
    throw std::invalid_argument("analytic_gch_single_qubit: state must be a qubit");
  double p00 = rho0.matrix()(0, 0).real();
  double p11 = rho0.matrix()(1, 1).real();
  double g = 1.0 - 2.0 * std::exp(-2.0 * time) * (1.0 - std::cos(eps * time)) * p00 * p11;
  return std::min(1.0, std::max(0.0, g));
}

double quadratic_approx_gch(const DensityOperator& rho0, double eps, double time) {
  if (rho0.dim() != 2)
    throw std::invalid_argument("quadratic_approx_gch: state must be a qubit");
  double p00 = rho0.matrix()(0, 0).real();
  double p11 = rho0.matrix()(1, 1).real();
  double g = 1.0 - eps * eps * time * time * std::exp(-2.0 * time) * p00 * p11;
  return std::min(1.0, std::max(0.0, g));
}

}  // namespace superfid
