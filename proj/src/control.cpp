#include "superfid/control.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "superfid/fidelity.hpp"
#include "superfid/lindblad.hpp"
#include "superfid/rng.hpp"

namespace superfid {

using Eigen::Index;
using Eigen::VectorXd;

void SpinChainConfig::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("SpinChainConfig: n_qubits must be >= 1");
  if (n_qubits > 12) throw std::invalid_argument("SpinChainConfig: n_qubits too large for dense simulation");
  if (!std::isfinite(coupling)) throw std::invalid_argument("SpinChainConfig: coupling must be finite");
  if (!(dephasing_rate >= 0.0))
    throw std::invalid_argument("SpinChainConfig: dephasing_rate must be nonnegative");
  if (n_intervals < 1) throw std::invalid_argument("SpinChainConfig: n_intervals must be >= 1");
  if (!(total_time > 0.0)) throw std::invalid_argument("SpinChainConfig: total_time must be positive");
  if (!(max_amplitude > 0.0))
    throw std::invalid_argument("SpinChainConfig: max_amplitude must be positive");
}

namespace {

cmat op_on_qubit(const cmat& op, int site, int n) {
  cmat out = cmat::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, i == site ? op : cmat::Identity(2, 2));
  return out;
}

cmat drift_or_zero(const SpinChainConfig& config) {
  if (config.n_qubits >= 2) return drift_hamiltonian(config);
  return cmat::Zero(config.dim(), config.dim());
}

std::vector<JumpTerm> dephasing_jumps(const SpinChainConfig& config) {
  std::vector<JumpTerm> jumps;
  if (config.dephasing_rate > 0.0) {
    for (int i = 0; i < config.n_qubits; ++i)
      jumps.push_back({op_on_qubit(sigma_z(), i, config.n_qubits), config.dephasing_rate});
  }
  return jumps;
}

void require_pulses_match(const SpinChainConfig& config, const PulseSchedule& pulses) {
  if (pulses.hx.size() != static_cast<std::size_t>(config.n_intervals) ||
      pulses.hy.size() != static_cast<std::size_t>(config.n_intervals))
    throw std::invalid_argument("PulseSchedule: needs one (hx, hy) pair per interval");
}

}  // namespace

cmat drift_hamiltonian(const SpinChainConfig& config) {
  config.validate();
  if (config.n_qubits < 2)
    throw std::invalid_argument("drift_hamiltonian: needs at least two qubits");
  const int n = config.n_qubits;
  cmat h = cmat::Zero(config.dim(), config.dim());
  const cmat paulis[3] = {sigma_x(), sigma_y(), sigma_z()};
  for (int i = 0; i + 1 < n; ++i)
    for (const cmat& p : paulis)
      h += config.coupling * (op_on_qubit(p, i, n) * op_on_qubit(p, i + 1, n));
  return h;
}

cmat control_hamiltonian(double hx, double hy, int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("control_hamiltonian: n_qubits must be >= 1");
  return hx * op_on_qubit(sigma_x(), 0, n_qubits) + hy * op_on_qubit(sigma_y(), 0, n_qubits);
}

cmat not_on_last_qubit(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("not_on_last_qubit: n_qubits must be >= 1");
  return op_on_qubit(sigma_x(), n_qubits - 1, n_qubits);
}

KrausChannel evolve_channel(const SpinChainConfig& config, const PulseSchedule& pulses) {
  config.validate();
  require_pulses_match(config, pulses);
  const double dt = config.total_time / config.n_intervals;
  const cmat hd = drift_or_zero(config);
  const std::vector<JumpTerm> jumps = dephasing_jumps(config);
  const Index d = config.dim();
  cmat total = cmat::Identity(d * d, d * d);
  for (int k = 0; k < config.n_intervals; ++k) {
    cmat h = hd + control_hamiltonian(pulses.hx[static_cast<std::size_t>(k)],
                                      pulses.hy[static_cast<std::size_t>(k)], config.n_qubits);
    Propagator p = propagator(LindbladGenerator(std::move(h), jumps), dt);
    total = p.matrix.matrix * total;  // newest on the left
  }
  return kraus_from_choi(choi_from_natural(SuperoperatorMatrix{std::move(total), d}));
}

double gate_fidelity(const KrausChannel& ch, const cmat& u_target) {
  KrausChannel target = KrausChannel::unitary(u_target);  // throws if not unitary
  if (ch.d_in() != u_target.rows() || ch.d_out() != u_target.rows())
    throw std::invalid_argument("gate_fidelity: target dimension does not match channel");
  return channel_superfidelity(ch, target, DensityOperator::maximally_mixed(ch.d_in()));
}

namespace {

struct GrapeWorkspace {
  cmat hd;      // drift
  cmat hx_op;   // sigma_x on qubit 1
  cmat hy_op;   // sigma_y on qubit 1
  cmat target_adj;
  double dt = 0.0;
  Index d = 0;
};

// |Tr(U_target^dag U_total)|^2 / d^2 for the closed (gamma = 0) evolution;
// identical to the channel superfidelity against the target at sigma = I/d.
double closed_fidelity(const GrapeWorkspace& ws, const std::vector<cmat>& step_unitaries,
                       complex_t* overlap_out = nullptr) {
  cmat total = cmat::Identity(ws.d, ws.d);
  for (const cmat& u : step_unitaries) total = u * total;
  complex_t z = (ws.target_adj * total).trace();
  if (overlap_out) *overlap_out = z;
  double dd = static_cast<double>(ws.d);
  return std::norm(z) / (dd * dd);
}

std::vector<cmat> step_unitaries(const GrapeWorkspace& ws, const VectorXd& hx,
                                 const VectorXd& hy) {
  std::vector<cmat> us(static_cast<std::size_t>(hx.size()));
  const complex_t mi(0.0, -1.0);
  for (Index k = 0; k < hx.size(); ++k) {
    cmat h = ws.hd + hx(k) * ws.hx_op + hy(k) * ws.hy_op;
    us[static_cast<std::size_t>(k)] = matrix_exponential(mi * ws.dt * h);
  }
  return us;
}

// First-order interval gradients of |Tr(U_t^dag U_total)|^2 / d^2 with respect
// to each control amplitude, using dU_k/dh ~= -i dt X U_k and cached
// prefix/suffix products.
void closed_gradient(const GrapeWorkspace& ws, const std::vector<cmat>& us,
                     VectorXd& grad_x, VectorXd& grad_y) {
  const Index n = static_cast<Index>(us.size());
  std::vector<cmat> fwd(static_cast<std::size_t>(n));  // fwd[k] = U_k ... U_0
  cmat acc = cmat::Identity(ws.d, ws.d);
  for (Index k = 0; k < n; ++k) {
    acc = us[static_cast<std::size_t>(k)] * acc;
    fwd[static_cast<std::size_t>(k)] = acc;
  }
  complex_t z = (ws.target_adj * fwd[static_cast<std::size_t>(n - 1)]).trace();
  const double dd = static_cast<double>(ws.d);
  const complex_t mi_dt(0.0, -ws.dt);
  // suffix[k] = U_target^dag U_{N-1} ... U_{k+1}, built by peeling from the left
  cmat suffix = ws.target_adj;
  for (Index k = n - 1; k >= 0; --k) {
    const cmat& f = fwd[static_cast<std::size_t>(k)];
    complex_t dzx = mi_dt * (suffix * ws.hx_op * f).trace();
    complex_t dzy = mi_dt * (suffix * ws.hy_op * f).trace();
    grad_x(k) = 2.0 * (std::conj(z) * dzx).real() / (dd * dd);
    grad_y(k) = 2.0 * (std::conj(z) * dzy).real() / (dd * dd);
    suffix = suffix * us[static_cast<std::size_t>(k)];
  }
}

}  // namespace

OptimizeResult optimize_pulses(const SpinChainConfig& config, const cmat& u_target,
                               std::uint64_t seed, int max_iters, double target_fid) {
  config.validate();
  if (!(target_fid > 0.0 && target_fid < 1.0))
    throw std::invalid_argument("optimize_pulses: target_fid must be in (0, 1)");
  if (max_iters < 0) throw std::invalid_argument("optimize_pulses: max_iters must be nonnegative");
  KrausChannel::unitary(u_target);  // validates the target
  if (u_target.rows() != config.dim())
    throw std::invalid_argument("optimize_pulses: target dimension does not match chain");

  const int n_steps = config.n_intervals;
  GrapeWorkspace ws;
  ws.hd = drift_or_zero(config);
  ws.hx_op = op_on_qubit(sigma_x(), 0, config.n_qubits);
  ws.hy_op = op_on_qubit(sigma_y(), 0, config.n_qubits);
  ws.target_adj = u_target.adjoint();
  ws.dt = config.total_time / n_steps;
  ws.d = config.dim();

  // uniform init in [-1, 1] scaled to half the amplitude bound
  std::mt19937_64 gen(seed);
  VectorXd hx(n_steps), hy(n_steps);
  const double init_scale = config.max_amplitude / 2.0;
  for (int k = 0; k < n_steps; ++k) {
    hx(k) = init_scale * uniform_pm1(gen);
    hy(k) = init_scale * uniform_pm1(gen);
  }

  std::vector<cmat> us = step_unitaries(ws, hx, hy);
  double fid = closed_fidelity(ws, us);
  VectorXd grad_x(n_steps), grad_y(n_steps);
  double lr = 1.0;
  int iters = 0;

  while (fid < target_fid && iters < max_iters) {
    closed_gradient(ws, us, grad_x, grad_y);
    bool improved = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      VectorXd cx = (hx + lr * grad_x).cwiseMax(-config.max_amplitude).cwiseMin(config.max_amplitude);
      VectorXd cy = (hy + lr * grad_y).cwiseMax(-config.max_amplitude).cwiseMin(config.max_amplitude);
      std::vector<cmat> cand_us = step_unitaries(ws, cx, cy);
      double cand_fid = closed_fidelity(ws, cand_us);
      if (cand_fid > fid) {
        hx = std::move(cx);
        hy = std::move(cy);
        us = std::move(cand_us);
        fid = cand_fid;
        lr *= 1.5;
        improved = true;
        break;
      }
      lr *= 0.5;
    }
    ++iters;
    if (!improved) break;  // stalled: no ascent direction at any step size
  }

  OptimizeResult result;
  result.pulses.hx.assign(hx.data(), hx.data() + n_steps);
  result.pulses.hy.assign(hy.data(), hy.data() + n_steps);
  result.fidelity = fid;
  result.iterations = iters;
  result.reached_target = fid >= target_fid;
  return result;
}

OptimizeResult optimize_pulses_restarts(const SpinChainConfig& config,
                                        const cmat& u_target, std::uint64_t seed,
                                        int restarts, int max_iters, double target_fid) {
  if (restarts < 1) throw std::invalid_argument("optimize_pulses_restarts: restarts must be >= 1");
  OptimizeResult best;
  best.fidelity = -1.0;
  for (int r = 0; r < restarts; ++r) {
    OptimizeResult run =
        optimize_pulses(config, u_target, derive_seed(seed, static_cast<std::uint64_t>(r)),
                        max_iters, target_fid);
    if (run.fidelity > best.fidelity) best = std::move(run);
    if (best.reached_target) break;
  }
  return best;
}

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("SUPERFID_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace

NoiseSweepResult noise_sweep(const SpinChainConfig& config, const PulseSchedule& pulses,
                             const std::vector<double>& s_values, int trials,
                             std::uint64_t seed,
                             const std::optional<DensityOperator>& sigma, int threads) {
  config.validate();
  require_pulses_match(config, pulses);
  if (trials < 1) throw std::invalid_argument("noise_sweep: trials must be >= 1");
  for (double s : s_values)
    if (!(s >= 0.0)) throw std::invalid_argument("noise_sweep: s values must be nonnegative");

  const DensityOperator input =
      sigma.has_value() ? *sigma : DensityOperator::maximally_mixed(config.dim());
  if (input.dim() != config.dim())
    throw std::invalid_argument("noise_sweep: sigma dimension does not match chain");

  const KrausChannel base = evolve_channel(config, pulses);
  const std::size_t n_s = s_values.size();
  NoiseSweepResult result;
  result.s_values = s_values;
  result.samples.assign(n_s, std::vector<double>(static_cast<std::size_t>(trials), 0.0));

  // Every (s index, trial) pair owns a derived seed, so the sample grid is
  // identical no matter how work is split across threads.
  auto run_one = [&](std::size_t si, int trial) {
    double s = s_values[si];
    if (s == 0.0) {
      // zero perturbation: the channels coincide and the superfidelity is 1
      result.samples[si][static_cast<std::size_t>(trial)] = 1.0;
      return;
    }
    GaussianSampler noise(derive_seed(seed, si, static_cast<std::uint64_t>(trial)));
    PulseSchedule perturbed = pulses;
    for (double& h : perturbed.hx) h += noise.sample(s);
    for (double& h : perturbed.hy) h += noise.sample(s);
    KrausChannel ch = evolve_channel(config, perturbed);
    result.samples[si][static_cast<std::size_t>(trial)] =
        channel_superfidelity(base, ch, input);
  };

  const std::size_t n_work = n_s * static_cast<std::size_t>(trials);
  const int n_threads = std::min<int>(resolve_threads(threads), static_cast<int>(n_work));
  if (n_threads <= 1) {
    for (std::size_t w = 0; w < n_work; ++w)
      run_one(w / static_cast<std::size_t>(trials), static_cast<int>(w % static_cast<std::size_t>(trials)));
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        std::size_t w = next.fetch_add(1);
        if (w >= n_work) return;
        try {
          run_one(w / static_cast<std::size_t>(trials),
                  static_cast<int>(w % static_cast<std::size_t>(trials)));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n_work);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  result.mean.resize(n_s);
  result.min.resize(n_s);
  result.max.resize(n_s);
  for (std::size_t si = 0; si < n_s; ++si) {
    const std::vector<double>& row = result.samples[si];
    double sum = 0.0, lo = row[0], hi = row[0];
    for (double g : row) {
      sum += g;
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    result.mean[si] = sum / static_cast<double>(trials);
    result.min[si] = lo;
    result.max[si] = hi;
  }
  return result;
}

QuadraticFit quadratic_fit(const NoiseSweepResult& result, double s_cutoff) {
  double num = 0.0, den = 0.0;
  int points = 0;
  bool has_nonzero = false;
  for (std::size_t i = 0; i < result.s_values.size(); ++i) {
    double s = result.s_values[i];
    if (s > s_cutoff) continue;
    ++points;
    if (s > 0.0) has_nonzero = true;
    double s2 = s * s;
    num += s2 * (1.0 - result.mean[i]);
    den += s2 * s2;
  }
  if (points < 3)
    throw std::invalid_argument("quadratic_fit: need at least 3 grid points at or below the cutoff");
  if (!has_nonzero)
    throw std::invalid_argument("quadratic_fit: all grid points below the cutoff have s = 0");

  QuadraticFit fit;
  fit.c = num / den;
  for (std::size_t i = 0; i < result.s_values.size(); ++i) {
    double s = result.s_values[i];
    if (s > s_cutoff) continue;
    double model = 1.0 - fit.c * s * s;
    double denom = std::max(std::abs(result.mean[i]), 1e-300);
    fit.rel_error = std::max(fit.rel_error, std::abs(model - result.mean[i]) / denom);
  }
  return fit;
}

}  // namespace superfid
