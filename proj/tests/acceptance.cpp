// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, next to the check it guards.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "superfid/control.hpp"
#include "superfid/fidelity.hpp"
#include "superfid/lindblad.hpp"
#include "test_helpers.hpp"

using namespace superfid;
using test_helpers::random_cptp;
using test_helpers::random_density;
using test_helpers::random_hermitian;
using test_helpers::random_state_vector;
using test_helpers::random_unitary;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// --- criterion 1: closed form vs purification oracle ------------------------

void criterion_closed_form_vs_oracle() {
  Timer timer;
  double max_gap = 0.0;
  for (int n = 0; n < 200; ++n) {
    Eigen::Index d = 2 + n % 3;
    int rank_a = 1 + n % 4;
    int rank_b = 1 + (n / 4) % 4;
    std::uint64_t base = 10000 + 10 * static_cast<std::uint64_t>(n);
    KrausChannel a = random_cptp(d, rank_a, base);
    KrausChannel b = random_cptp(d, rank_b, base + 1);
    DensityOperator sigma = random_density(d, base + 2);  // Wishart: full rank
    double closed = channel_superfidelity(a, b, sigma);
    for (Eigen::Index d_env : {d, d + 1, 2 * d}) {
      double gap = std::abs(closed - channel_superfidelity_oracle(a, b, sigma, d_env));
      max_gap = std::max(max_gap, gap);
    }
  }
  double elapsed = timer.seconds();
  report(1, "closed form matches the purification oracle",
         max_gap < 1e-9 && elapsed < 30.0,
         fmt("200 instances x 3 purifications, max gap %.3e, %.1f s", max_gap, elapsed));
}

// --- criterion 2: superfidelity axioms --------------------------------------

void criterion_superfidelity_axioms() {
  Timer timer;
  // signed violations; a positive value breaks the corresponding axiom
  double worst = -1.0;
  for (int n = 0; n < 500; ++n) {
    std::uint64_t base = 20000 + 10 * static_cast<std::uint64_t>(n);
    DensityOperator r1 = random_density(3, base), r2 = random_density(3, base + 1),
                    r3 = random_density(3, base + 2), r4 = random_density(3, base + 3);
    double g13 = superfidelity(r1, r3), g24 = superfidelity(r2, r4);

    worst = std::max(worst, -g13);        // bounds
    worst = std::max(worst, g13 - 1.0);
    worst = std::max(worst, std::abs(g13 - superfidelity(r3, r1)));  // symmetry

    cmat u = random_unitary(3, base + 4);  // unitary invariance
    DensityOperator ur1((u * r1.matrix() * u.adjoint()).eval());
    DensityOperator ur3((u * r3.matrix() * u.adjoint()).eval());
    worst = std::max(worst, std::abs(g13 - superfidelity(ur1, ur3)));

    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {  // joint concavity
      DensityOperator left((p * r1.matrix() + (1 - p) * r2.matrix()).eval());
      DensityOperator right((p * r3.matrix() + (1 - p) * r4.matrix()).eval());
      worst = std::max(worst, p * g13 + (1 - p) * g24 - superfidelity(left, right));
    }

    DensityOperator t12(kron(r1.matrix(), r2.matrix()));  // super-multiplicativity
    DensityOperator t34(kron(r3.matrix(), r4.matrix()));
    worst = std::max(worst, g13 * g24 - superfidelity(t12, t34));

    // trace-distance bound
    worst = std::max(worst, 1.0 - g13 - trace_distance(r1.matrix(), r3.matrix()));
  }
  double elapsed = timer.seconds();
  report(2, "superfidelity axioms hold on random tuples",
         worst < 1e-9 && elapsed < 10.0,
         fmt("500 tuples x 6 axioms, worst violation %.3e, %.1f s", worst, elapsed));
}

// --- criterion 3: unitary reduction, fidelity bound, pure-state reduction ---

void criterion_reductions_and_bound() {
  Timer timer;
  double max_unitary_gap = 0.0, max_bound_violation = -1.0, max_pure_gap = 0.0;
  for (int n = 0; n < 100; ++n) {
    std::uint64_t base = 30000 + 10 * static_cast<std::uint64_t>(n);
    Eigen::Index d = 2 + n % 3;

    // unitary reference channel reduces to a plain overlap sum
    cmat u = random_unitary(d, base);
    KrausChannel psi = random_cptp(d, 1 + n % 4, base + 1);
    DensityOperator sigma = random_density(d, base + 2);
    double gch = channel_superfidelity(KrausChannel::unitary(u), psi, sigma);
    double overlap = 0.0;
    for (const cmat& a : psi.operators())
      overlap += std::norm((sigma.matrix() * u.adjoint() * a).trace());
    max_unitary_gap = std::max(max_unitary_gap, std::abs(gch - overlap));

    // superfidelity of the extended outputs dominates their squared fidelity
    // (the unsquared bound fails whenever both channels have rank 1: the
    // outputs are pure, G equals F^2, and F - G reaches 1/4 near F = 1/2)
    KrausChannel phi = random_cptp(d, 1 + (n / 2) % 4, base + 3);
    double super = channel_superfidelity(phi, psi, sigma);
    double fid = two_channel_fidelity_oracle(phi, psi, sigma, d);
    max_bound_violation = std::max(max_bound_violation, fid * fid - super);

    // pure reference states reduce to the output superfidelity
    DensityOperator pure = DensityOperator::pure(random_state_vector(d, base + 4));
    double via_channels = channel_superfidelity(phi, psi, pure);
    double via_outputs = superfidelity(apply(phi, pure), apply(psi, pure));
    max_pure_gap = std::max(max_pure_gap, std::abs(via_channels - via_outputs));
  }
  bool ok = max_unitary_gap < 1e-10 && max_bound_violation < 1e-9 && max_pure_gap < 1e-10;
  report(3, "unitary and pure-state reductions plus the squared-fidelity bound", ok,
         fmt("100 instances each: unitary gap %.3e, bound violation %.3e, pure gap %.3e",
             max_unitary_gap, max_bound_violation, max_pure_gap) +
             fmt(", %.1f s", timer.seconds()));
}

// --- criterion 4: erasure channel closed form and eigenvalue bound ----------

void criterion_erasure_bound() {
  Timer timer;
  double max_form_gap = 0.0, max_bound_violation = -1.0;
  for (int n = 0; n < 100; ++n) {
    std::uint64_t base = 40000 + 10 * static_cast<std::uint64_t>(n);
    Eigen::Index d = 2 + n % 3;
    DensityOperator xi = random_density(d, base);
    DensityOperator sigma = random_density(d, base + 1);
    cmat u = random_unitary(d, base + 2);
    ErasureGch r = erasure_unitary_gch(xi, u, sigma);
    double direct =
        (sigma.matrix() * sigma.matrix() * u.adjoint() * xi.matrix() * u).trace().real();
    max_form_gap = std::max(max_form_gap, std::abs(r.value - direct));
    max_bound_violation = std::max(max_bound_violation, r.value - r.bound);
  }
  bool ok = max_form_gap < 1e-10 && max_bound_violation < 1e-10;
  report(4, "erasure-vs-unitary closed form and eigenvalue bound", ok,
         fmt("100 instances, form gap %.3e, bound violation %.3e, %.1f s", max_form_gap,
             max_bound_violation, timer.seconds()));
}

// --- criterion 5: first-order sensitivity vs finite differences -------------

void criterion_sensitivity() {
  // The first-order coefficient is identically zero (the summed product in its
  // definition is its own conjugate), so the check is threefold: the evaluated
  // coefficient is zero to round-off, the finite-difference slope at eps = 1e-5
  // agrees with -c1 at round-off scale, and the loss opens as a stable parabola.
  Timer timer;
  double max_c1 = 0.0;
  double max_slope_gap = 0.0;
  double max_ratio_dev = 0.0;
  bool quadratic_ok = true;
  for (std::uint64_t n = 0; n < 50; ++n) {
    std::uint64_t base = 50000 + 10 * n;
    Eigen::Index d = 2 + static_cast<Eigen::Index>(n % 3);
    KrausChannel ch = random_cptp(d, 1 + static_cast<int>(n % 4), base);
    cmat h = random_hermitian(d, base + 1);
    DensityOperator sigma = random_density(d, base + 2);

    double c1 = first_order_sensitivity(ch, h, sigma);
    max_c1 = std::max(max_c1, std::abs(c1));

    double eps = 1e-5;
    double slope = (perturbed_gch(ch, h, eps, sigma) - perturbed_gch(ch, h, -eps, sigma)) /
                   (2.0 * eps);
    max_slope_gap = std::max(max_slope_gap, std::abs(slope + c1));

    double q1 = (1.0 - perturbed_gch(ch, h, 1e-3, sigma)) / 1e-6;
    double q2 = (1.0 - perturbed_gch(ch, h, 2e-3, sigma)) / 4e-6;
    if (q1 <= 1e-6) quadratic_ok = false;
    max_ratio_dev = std::max(max_ratio_dev, std::abs(q2 / q1 - 1.0));
  }
  bool ok = max_c1 < 1e-12 && max_slope_gap < 1e-8 && quadratic_ok &&
            max_ratio_dev < 0.1;
  report(5, "sensitivity slope vanishes to round-off and loss is quadratic", ok,
         fmt("max |c1| %.3e, max slope gap %.3e, max quad drift %.3e",
             max_c1, max_slope_gap, max_ratio_dev) +
             fmt(", %.1f s", timer.seconds()));
}

// --- criterion 6: single-qubit closed form -----------------------------------

void criterion_single_qubit() {
  Timer timer;
  std::vector<DensityOperator> states;
  cvec k0 = cvec::Zero(2);
  k0(0) = 1.0;
  states.push_back(DensityOperator::pure(k0));
  cvec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  states.push_back(DensityOperator::pure(plus));
  states.push_back(DensityOperator::maximally_mixed(2));
  states.push_back(random_density(2, 60000));

  double max_err = 0.0;
  for (double omega : {0.0, 1.0, 10.0}) {
    for (double eps : {0.0, 0.05, 0.1, 0.5}) {
      for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        KrausChannel reference = single_qubit_channel(omega, 0.0, t);
        KrausChannel detuned = single_qubit_channel(omega, eps, t);
        for (const DensityOperator& rho0 : states) {
          double numeric = channel_superfidelity(reference, detuned, rho0);
          double analytic = analytic_gch_single_qubit(rho0, eps, t);
          max_err = std::max(max_err, std::abs(numeric - analytic));
        }
      }
    }
  }
  double elapsed = timer.seconds();
  report(6, "single-qubit pipeline matches the closed form and ignores omega",
         max_err < 1e-7 && elapsed < 10.0,
         fmt("3 omegas x 20 grid points x 4 states, max error %.3e, %.1f s", max_err,
             elapsed));
}

// --- criteria 7 and 8: three-qubit control experiment ------------------------

SpinChainConfig experiment_config() {
  SpinChainConfig config;
  config.n_qubits = 3;
  config.coupling = 1.0;
  config.dephasing_rate = 0.1;
  config.n_intervals = 64;
  config.total_time = 6.1;
  config.max_amplitude = 10.0;
  return config;
}

OptimizeResult criterion_optimization() {
  Timer timer;
  SpinChainConfig config = experiment_config();
  OptimizeResult result =
      optimize_pulses_restarts(config, not_on_last_qubit(3), 42, 5, 2000, 0.99);
  double elapsed = timer.seconds();
  report(7, "pulse optimization reaches the target gate",
         result.reached_target && result.fidelity >= 0.99 && elapsed < 900.0,
         fmt("fidelity %.6f after %.0f iterations, %.1f s", result.fidelity,
             static_cast<double>(result.iterations), elapsed));
  return result;
}

void criterion_noise_sweep(const OptimizeResult& optimized) {
  Timer timer;
  SpinChainConfig config = experiment_config();
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.02 * i);
  NoiseSweepResult sweep = noise_sweep(config, optimized.pulses, grid, 100, 42);

  bool zero_exact = sweep.mean[0] == 1.0;
  for (double v : sweep.samples[0]) zero_exact = zero_exact && v == 1.0;

  QuadraticFit fit = quadratic_fit(sweep, 0.1);  // lower half of the grid
  double spread_small = sweep.max[1] - sweep.min[1];   // s = 0.02
  double spread_large = sweep.max[10] - sweep.min[10]; // s = 0.20
  double elapsed = timer.seconds();

  bool ok = zero_exact && fit.c > 0.0 && fit.rel_error < 0.05 &&
            spread_large > spread_small && elapsed < 1200.0;
  report(8, "noise sweep decays quadratically with growing spread", ok,
         fmt("c %.4f, rel residual %.3e, spread %.2e", fit.c, fit.rel_error, spread_small) +
             fmt(" -> %.2e, zero-noise mean %.0f exact, %.1f s", spread_large,
                 zero_exact ? 1.0 : 0.0, elapsed));
}

// --- criterion 9: representation round trips ---------------------------------

void criterion_round_trips() {
  Timer timer;
  double max_action_gap = 0.0, max_involution = 0.0;
  for (int n = 0; n < 200; ++n) {
    std::uint64_t base = 70000 + 10 * static_cast<std::uint64_t>(n);
    Eigen::Index d = 2 + n % 3;
    KrausChannel ch = random_cptp(d, 1 + n % 4, base);
    SuperoperatorMatrix nat = natural_representation(ch);
    KrausChannel rebuilt = kraus_from_choi(choi_from_natural(nat));
    max_action_gap = std::max(
        max_action_gap,
        (natural_representation(rebuilt).matrix - nat.matrix).cwiseAbs().maxCoeff());
    max_involution = std::max(
        max_involution, (reshuffle(reshuffle(nat.matrix)) - nat.matrix).cwiseAbs().maxCoeff());
  }
  bool ok = max_action_gap < 1e-8 && max_involution == 0.0;
  report(9, "representation conversions round trip", ok,
         fmt("200 channels, action gap %.3e, involution defect %.3e, %.1f s",
             max_action_gap, max_involution, timer.seconds()));
}

}  // namespace

int main() {
  criterion_closed_form_vs_oracle();
  criterion_superfidelity_axioms();
  criterion_reductions_and_bound();
  criterion_erasure_bound();
  criterion_sensitivity();
  criterion_single_qubit();
  OptimizeResult optimized = criterion_optimization();
  if (optimized.reached_target) {
    criterion_noise_sweep(optimized);
  } else {
    report(8, "noise sweep decays quadratically with growing spread", false,
           "skipped: no optimized pulse schedule available");
  }
  criterion_round_trips();

  std::printf("%s: %d of 9 criteria failed\n", g_failures == 0 ? "OK" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
