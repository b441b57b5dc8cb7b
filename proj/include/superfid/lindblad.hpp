#pragma once

#include <vector>

#include "superfid/channels.hpp"

namespace superfid {

struct JumpTerm {
  cmat op;
  double rate = 1.0;
};

// Markovian generator: Hermitian Hamiltonian plus dissipative jump terms
// with nonnegative rates.
class LindbladGenerator {
 public:
  LindbladGenerator(cmat hamiltonian, std::vector<JumpTerm> jumps);

  const cmat& hamiltonian() const { return h_; }
  const std::vector<JumpTerm>& jumps() const { return jumps_; }
  Eigen::Index dim() const { return h_.rows(); }

 private:
  cmat h_;
  std::vector<JumpTerm> jumps_;
};

// F with vec(rho_dot) = -F vec(rho) in the row-major convention:
//   F = i(H (x) I - I (x) conj(H))
//     - sum_k gamma_k [ L_k (x) conj(L_k)
//                       - (1/2) L_k^dag L_k (x) I
//                       - (1/2) I (x) conj(L_k^dag L_k) ]
SuperoperatorMatrix generator_matrix(const LindbladGenerator& gen);

struct Propagator {
  SuperoperatorMatrix matrix;  // exp(-F T)
  double time = 0.0;
};

// exp(-F T); T must be >= 0.
Propagator propagator(const LindbladGenerator& gen, double time);

// The finite-temperature single-qubit channel: H = (omega+eps)/2 sigma_z,
// jump operators sigma_- and sigma_+ with unit rates, evolved for time T and
// brought to Kraus form through exp(-FT) -> reshuffle -> Choi eigenvectors.
KrausChannel single_qubit_channel(double omega, double eps, double time);

// Closed form for the superfidelity between the eps=0 and eps channels:
//   G_ch = 1 - 2 exp(-2T) (1 - cos(eps T)) rho00 rho11
double analytic_gch_single_qubit(const DensityOperator& rho0, double eps, double time);

// Second-order Taylor form 1 - eps^2 T^2 exp(-2T) rho00 rho11.
double quadratic_approx_gch(const DensityOperator& rho0, double eps, double time);

}  // namespace superfid
