#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "superfid/channels.hpp"

namespace superfid {

struct SpinChainConfig {
  int n_qubits = 3;
  double coupling = 1.0;        // J, nearest-neighbor Heisenberg strength
  double dephasing_rate = 0.1;  // gamma, sigma_z jump rate per qubit
  int n_intervals = 64;         // N
  double total_time = 6.1;      // T
  double max_amplitude = 10.0;  // pulse clipping bound

  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits; }
  // throws std::invalid_argument on a violated invariant
  void validate() const;
};

// Piecewise-constant control amplitudes, one (hx, hy) pair per interval.
struct PulseSchedule {
  std::vector<double> hx;
  std::vector<double> hy;
};

// J sum_{i<n-1} sum_{a in {x,y,z}} sigma_a^i sigma_a^{i+1}; needs >= 2 qubits.
cmat drift_hamiltonian(const SpinChainConfig& config);

// hx sigma_x + hy sigma_y on the first qubit, identity elsewhere.
cmat control_hamiltonian(double hx, double hy, int n_qubits);

// Identity on all qubits except a NOT on the last one.
cmat not_on_last_qubit(int n_qubits);

// Evolve the chain through all N intervals: per interval the generator is
// H_drift + H_control(k) with a sigma_z dephasing jump of rate gamma on every
// qubit. Natural representations compose newest-on-the-left; the product is
// reshuffled to a Choi matrix and returned in Kraus form.
KrausChannel evolve_channel(const SpinChainConfig& config, const PulseSchedule& pulses);

// channel_superfidelity(ch, {U_target}; I/2^n) -- the optimization figure of
// merit. U_target must be unitary.
double gate_fidelity(const KrausChannel& ch, const cmat& u_target);

struct OptimizeResult {
  PulseSchedule pulses;
  double fidelity = 0.0;
  int iterations = 0;
  bool reached_target = false;
};

// GRAPE-style gradient ascent on the closed (gamma = 0) dynamics: first-order
// propagator-derivative gradients per interval, backtracking step control,
// amplitude clipping at max_amplitude. Pulses are initialized uniformly in
// [-1, 1] * (max_amplitude / 2). Deterministic given the seed. A miss of
// target_fid within max_iters is reported through reached_target, not thrown.
OptimizeResult optimize_pulses(const SpinChainConfig& config, const cmat& u_target,
                               std::uint64_t seed, int max_iters, double target_fid);

// Runs optimize_pulses with seeds derived from (seed, restart index) until one
// run reaches target_fid; returns the best result seen.
OptimizeResult optimize_pulses_restarts(const SpinChainConfig& config,
                                        const cmat& u_target, std::uint64_t seed,
                                        int restarts, int max_iters, double target_fid);

struct NoiseSweepResult {
  std::vector<double> s_values;
  std::vector<std::vector<double>> samples;  // samples[s_index][trial]
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;
};

// For each noise level s and trial, perturb every pulse amplitude by an
// independent N(0, s) draw and record the channel superfidelity between the
// unperturbed and perturbed evolutions at input sigma (default I/2^n).
// Per-trial generators are seeded by derive_seed(seed, s_index, trial), so
// results are bit-identical regardless of thread count. threads = 0 picks
// the SUPERFID_THREADS env var, falling back to the hardware count.
NoiseSweepResult noise_sweep(const SpinChainConfig& config, const PulseSchedule& pulses,
                             const std::vector<double>& s_values, int trials,
                             std::uint64_t seed,
                             const std::optional<DensityOperator>& sigma = std::nullopt,
                             int threads = 0);

struct QuadraticFit {
  double c = 0.0;          // <G_ch> ~= 1 - c s^2
  double rel_error = 0.0;  // max relative residual over the fitted points
};

// Least-squares fit of the per-s means to 1 - c s^2 over s <= s_cutoff.
// Needs at least 3 such grid points, at least one of them nonzero.
QuadraticFit quadratic_fit(const NoiseSweepResult& result, double s_cutoff);

}  // namespace superfid
