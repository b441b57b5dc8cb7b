#include <doctest.h>

#include <cmath>

#include "superfid/control.hpp"
#include "superfid/fidelity.hpp"
#include "superfid/linalg.hpp"
#include "test_helpers.hpp"

using namespace superfid;

namespace {

SpinChainConfig tiny_config() {
  SpinChainConfig c;
  c.n_qubits = 1;
  c.coupling = 0.0;
  c.dephasing_rate = 0.0;
  c.n_intervals = 16;
  c.total_time = M_PI;
  c.max_amplitude = 4.0;
  return c;
}

PulseSchedule constant_schedule(int n, double hx, double hy) {
  return {std::vector<double>(n, hx), std::vector<double>(n, hy)};
}

}  // namespace

TEST_CASE("spin chain config validation") {
  SpinChainConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_qubits = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SpinChainConfig{};
  c.dephasing_rate = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SpinChainConfig{};
  c.total_time = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SpinChainConfig{};
  c.n_intervals = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("drift Hamiltonian of the two-qubit Heisenberg pair") {
  SpinChainConfig c;
  c.n_qubits = 2;
  c.coupling = 1.0;
  cmat h = drift_hamiltonian(c);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  // sigma.sigma has eigenvalues {1,1,1,-3} (triplet/singlet)
  HermitianEig eig = hermitian_eig(h);
  CHECK(eig.values(0) == doctest::Approx(1.0));
  CHECK(eig.values(2) == doctest::Approx(1.0));
  CHECK(eig.values(3) == doctest::Approx(-3.0));

  c.coupling = 0.0;
  CHECK(drift_hamiltonian(c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("drift Hamiltonian commutes with total magnetization") {
  SpinChainConfig c;
  c.n_qubits = 3;
  cmat h = drift_hamiltonian(c);
  cmat mz = cmat::Zero(8, 8);
  for (int q = 0; q < 3; ++q) {
    cmat term = cmat::Identity(1, 1);
    for (int j = 0; j < 3; ++j) term = kron(term, j == q ? sigma_z() : cmat::Identity(2, 2));
    mz += term;
  }
  CHECK((h * mz - mz * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("control Hamiltonian acts on the first qubit only") {
  CHECK(control_hamiltonian(0.0, 0.0, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((control_hamiltonian(1.0, 0.0, 1) - sigma_x()).cwiseAbs().maxCoeff() == 0.0);
  cmat h = control_hamiltonian(0.3, -0.7, 2);
  cmat expected = kron((0.3 * sigma_x() - 0.7 * sigma_y()).eval(), cmat::Identity(2, 2));
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(h.trace()) < 1e-14);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("target gate flips the last qubit") {
  CHECK((not_on_last_qubit(1) - sigma_x()).cwiseAbs().maxCoeff() == 0.0);
  cmat t3 = not_on_last_qubit(3);
  CHECK((t3 - kron(cmat::Identity(4, 4), sigma_x())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evolving with zero controls and zero noise is a unitary channel") {
  SpinChainConfig c = tiny_config();
  KrausChannel ch = evolve_channel(c, constant_schedule(c.n_intervals, 0.0, 0.0));
  REQUIRE(ch.size() == 1);
  // H = 0 throughout, so the single Kraus operator is the identity up to phase
  cmat k = ch.operators()[0];
  complex_t phase = k(0, 0) / std::abs(k(0, 0));
  CHECK((k / phase - cmat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("closed-system evolution matches the time-ordered product") {
  SpinChainConfig c;
  c.n_qubits = 2;
  c.coupling = 0.7;
  c.dephasing_rate = 0.0;
  c.n_intervals = 5;
  c.total_time = 1.1;
  PulseSchedule p{{0.4, -1.0, 0.2, 0.9, -0.3}, {0.1, 0.6, -0.8, 0.0, 0.5}};
  KrausChannel ch = evolve_channel(c, p);
  REQUIRE(ch.size() == 1);

  double dt = c.total_time / c.n_intervals;
  cmat u = cmat::Identity(4, 4);
  for (int k = 0; k < c.n_intervals; ++k) {
    cmat h = drift_hamiltonian(c) + control_hamiltonian(p.hx[k], p.hy[k], 2);
    u = matrix_exponential((complex_t(0, -dt) * h).eval()) * u;
  }
  cmat kk = ch.operators()[0];
  complex_t phase = (u.adjoint() * kk).trace();
  phase /= std::abs(phase);
  CHECK((kk - phase * u).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("strong dephasing kills single-qubit coherences") {
  SpinChainConfig c = tiny_config();
  c.dephasing_rate = 8.0;
  c.total_time = 2.0;
  KrausChannel ch = evolve_channel(c, constant_schedule(c.n_intervals, 0.0, 0.0));
  cvec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  cmat out = apply(ch, DensityOperator::pure(plus)).matrix();
  CHECK(std::abs(out(0, 1)) < 1e-6);
  CHECK(out(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("evolved channels stay trace preserving with noise on") {
  SpinChainConfig c;
  c.n_qubits = 2;
  c.n_intervals = 8;
  c.total_time = 2.0;
  PulseSchedule p = constant_schedule(8, 1.3, -0.4);
  KrausChannel ch = evolve_channel(c, p);
  CHECK(trace_preservation_residual(ch) < 1e-7);
  CHECK(validate_cptp(ch, 1e-7));

  CHECK_THROWS_AS(evolve_channel(c, constant_schedule(7, 0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("gate fidelity scores channels against a unitary target") {
  cmat u = test_helpers::random_unitary(2, 95);
  CHECK(gate_fidelity(KrausChannel::unitary(u), u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gate_fidelity(KrausChannel::identity(2), sigma_x()) == doctest::Approx(0.0));
  double mid = gate_fidelity(KrausChannel::unitary(
                                 matrix_exponential((complex_t(0, -0.4) * sigma_x()).eval())),
                             cmat::Identity(2, 2));
  CHECK(mid < 1.0);
  CHECK(mid > 0.5);
  CHECK_THROWS_AS(gate_fidelity(KrausChannel::identity(2), (2.0 * sigma_x()).eval()),
                  std::invalid_argument);
}

TEST_CASE("pulse optimization drives a single qubit to a NOT gate") {
  SpinChainConfig c = tiny_config();
  OptimizeResult r = optimize_pulses(c, sigma_x(), 7, 400, 0.999);
  CHECK(r.reached_target);
  CHECK(r.fidelity >= 0.999);
  CHECK(r.iterations <= 400);
  for (double v : r.pulses.hx) CHECK(std::abs(v) <= c.max_amplitude + 1e-12);
  for (double v : r.pulses.hy) CHECK(std::abs(v) <= c.max_amplitude + 1e-12);
  // the attained schedule really implements the gate
  c.dephasing_rate = 0.0;
  CHECK(gate_fidelity(evolve_channel(c, r.pulses), sigma_x()) ==
        doctest::Approx(r.fidelity).epsilon(1e-9));

  OptimizeResult again = optimize_pulses(c, sigma_x(), 7, 400, 0.999);
  CHECK(again.fidelity == r.fidelity);
  CHECK(again.pulses.hx == r.pulses.hx);
  CHECK(again.pulses.hy == r.pulses.hy);
}

TEST_CASE("restart driver returns the best seeded attempt") {
  SpinChainConfig c = tiny_config();
  c.n_intervals = 8;
  OptimizeResult r = optimize_pulses_restarts(c, sigma_x(), 11, 3, 300, 0.999);
  CHECK(r.fidelity >= 0.999);
  CHECK(r.reached_target);
}

TEST_CASE("noise sweep at zero noise returns exact ones") {
  SpinChainConfig c = tiny_config();
  PulseSchedule p = constant_schedule(c.n_intervals, 0.5, -0.2);
  NoiseSweepResult r = noise_sweep(c, p, {0.0}, 5, 123);
  for (double v : r.samples[0]) CHECK(v == 1.0);
  CHECK(r.mean[0] == 1.0);
  CHECK(r.min[0] == 1.0);
  CHECK(r.max[0] == 1.0);
}

TEST_CASE("noise sweep is reproducible and thread-count independent") {
  SpinChainConfig c = tiny_config();
  c.dephasing_rate = 0.05;
  PulseSchedule p = constant_schedule(c.n_intervals, 0.5, -0.2);
  std::vector<double> grid{0.0, 0.1, 0.2};
  NoiseSweepResult a = noise_sweep(c, p, grid, 6, 99, std::nullopt, 1);
  NoiseSweepResult b = noise_sweep(c, p, grid, 6, 99, std::nullopt, 3);
  CHECK(a.samples == b.samples);
  NoiseSweepResult again = noise_sweep(c, p, grid, 6, 99, std::nullopt, 1);
  CHECK(a.samples == again.samples);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.min[i] <= a.mean[i]);
    CHECK(a.mean[i] <= a.max[i]);
    for (double v : a.samples[i]) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  // samples at different noise levels differ
  CHECK(a.samples[1] != a.samples[2]);
}

TEST_CASE("noise sweep validates its arguments") {
  SpinChainConfig c = tiny_config();
  PulseSchedule p = constant_schedule(c.n_intervals, 0.0, 0.0);
  CHECK_THROWS_AS(noise_sweep(c, p, {-0.1}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(noise_sweep(c, p, {0.1}, 0, 1), std::invalid_argument);
}

TEST_CASE("quadratic fit recovers a synthetic decay law") {
  NoiseSweepResult synthetic;
  synthetic.s_values = {0.0, 0.05, 0.1, 0.15, 0.2};
  for (double s : synthetic.s_values) {
    synthetic.mean.push_back(1.0 - 2.0 * s * s);
    synthetic.min.push_back(0.0);
    synthetic.max.push_back(1.0);
    synthetic.samples.push_back({});
  }
  QuadraticFit fit = quadratic_fit(synthetic, 0.2);
  CHECK(fit.c == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.rel_error < 1e-12);

  CHECK_THROWS_AS(quadratic_fit(synthetic, 0.01), std::invalid_argument);  // one point left
  NoiseSweepResult zeros;
  zeros.s_values = {0.0, 0.0, 0.0};
  zeros.mean = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(quadratic_fit(zeros, 1.0), std::invalid_argument);
}
