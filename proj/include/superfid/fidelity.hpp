#pragma once

#include "superfid/channels.hpp"

namespace superfid {

// All similarity values are clamped to [0, 1] on output.

// F(A, B) = Tr sqrt(sqrt(A) B sqrt(A))
double fidelity(const DensityOperator& a, const DensityOperator& b);

// G(rho, sigma) = Tr rho sigma + sqrt(1 - Tr rho^2) sqrt(1 - Tr sigma^2)
double superfidelity(const DensityOperator& rho, const DensityOperator& sigma);

// sum_{i,j} |Tr(sigma A_i^dag B_j)|^2 -- the cross term shared by the channel
// fidelity and superfidelity formulas below.
double kraus_overlap_sum(const KrausChannel& a, const KrausChannel& b,
                         const DensityOperator& sigma);

// F_ch(Phi; sigma) = sqrt(sum_i |Tr(sigma A_i)|^2)
double channel_fidelity(const KrausChannel& ch, const DensityOperator& sigma);

// Channel superfidelity in closed form:
//   G_ch = sum_{ij} |Tr sigma A_i^dag B_j|^2
//        + sqrt(1 - sum_{ij} |Tr sigma A_i^dag A_j|^2)
//        * sqrt(1 - sum_{ij} |Tr sigma B_i^dag B_j|^2).
// Purification-independent by construction.
double channel_superfidelity(const KrausChannel& a, const KrausChannel& b,
                             const DensityOperator& sigma);

// The defining quantity evaluated directly on one purification of sigma:
// superfidelity of the two extended outputs (Phi (x) 1)(zeta zeta^dag).
double channel_superfidelity_oracle(const KrausChannel& a, const KrausChannel& b,
                                    const DensityOperator& sigma, Eigen::Index d_env);
double channel_superfidelity_oracle(const KrausChannel& a, const KrausChannel& b,
                                    const DensityOperator& sigma, Eigen::Index d_env,
                                    const cmat& isometry);

// Fidelity between the two extended outputs at the default purification;
// a lower bound on channel_superfidelity.
double two_channel_fidelity_oracle(const KrausChannel& a, const KrausChannel& b,
                                   const DensityOperator& sigma, Eigen::Index d_env);

struct ErasureGch {
  double value;  // G_ch(erasure(xi), {U}; sigma) = Tr(sigma^2 U^dag xi U)
  double bound;  // von Neumann bound sum_i lambda_i^down mu_i^down
};

// G_ch between the erasure channel toward xi and the unitary channel {U},
// together with the eigenvalue-ordering bound. U must be unitary.
ErasureGch erasure_unitary_gch(const DensityOperator& xi, const cmat& U,
                               const DensityOperator& sigma);

// First-order coefficient of the superfidelity loss under the perturbation
// Psi: rho -> U_eps Phi(rho) U_eps^dag, U_eps = exp(-i eps H):
//   G_ch ~= 1 - c1 eps,
//   c1 = 2 sum_{ij} Im[ Tr(sigma A_i^dag H A_j) conj(Tr(sigma A_i^dag A_j)) ].
// The coefficient vanishes identically: swapping i and j conjugates both trace
// factors (cyclicity, H and sigma Hermitian), so the sum is real and its
// imaginary part is zero -- consistent with G_ch attaining its maximum 1 at
// eps = 0. The loss is therefore second order in eps; this evaluates the
// literal expansion term and returns zero up to round-off.
double first_order_sensitivity(const KrausChannel& ch, const cmat& H,
                               const DensityOperator& sigma);

// Exact G_ch for the same perturbation:
//   1 + sum_{ij} |Tr sigma A_i^dag U_eps A_j|^2 - sum_{ij} |Tr sigma A_i^dag A_j|^2
double perturbed_gch(const KrausChannel& ch, const cmat& H, double eps,
                     const DensityOperator& sigma);

}  // namespace superfid
