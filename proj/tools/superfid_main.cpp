// Command-line front end: channel validation, superfidelity evaluation, the
// single-qubit sweep, and the spin-chain control experiment (optimize, noise
// sweep, quadratic fit). Exit codes: 0 ok, 1 domain failure, 2 input error,
// 3 optimizer target miss.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "superfid/control.hpp"
#include "superfid/fidelity.hpp"
#include "superfid/lindblad.hpp"
#include "superfid/serialize.hpp"
#include "superfid/version.hpp"

namespace {

using namespace superfid;

struct CommandContext {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

// Runs the command body and always writes manifest-<command>.json into the
// output directory afterwards, success or failure. The body may update
// ctx.seed once the effective seed is known.
int run_with_manifest(CommandContext& ctx, const std::function<int()>& body) {
  auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    code = body();
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 1;
  }
  double duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    std::filesystem::create_directories(ctx.out_dir);
    RunManifest manifest{ctx.command, ctx.config_path, ctx.seed,
                         ctx.out_dir, kVersion,        duration};
    write_manifest(manifest, ctx.out_dir + "/manifest-" + ctx.command + ".json");
  } catch (const std::exception& e) {
    std::cerr << "error: manifest: " << e.what() << "\n";
    if (code == 0) code = 2;
  }
  return code;
}

// Choi matrix as sum_i vec(K_i) vec(K_i)^dag; well-defined for any Kraus list.
double choi_min_eigenvalue(const KrausChannel& ch) {
  const Eigen::Index dim = ch.d_out() * ch.d_in();
  cmat choi = cmat::Zero(dim, dim);
  for (const cmat& k : ch.operators()) {
    cvec v = vec(k);
    choi += v * v.adjoint();
  }
  return hermitian_eig(choi, 1e-8).values.minCoeff();
}

int cmd_validate(const std::string& channel_path, double tol) {
  KrausChannel ch = load_channel(channel_path);
  double tp_residual = trace_preservation_residual(ch);
  double choi_min = choi_min_eigenvalue(ch);
  bool ok = tp_residual <= tol && choi_min >= -tol;
  std::printf("kraus_operators = %zu\n", ch.size());
  std::printf("trace_preservation_residual = %.3e\n", tp_residual);
  std::printf("choi_min_eigenvalue = %.3e\n", choi_min);
  std::printf("cptp = %s\n", ok ? "yes" : "no");
  return ok ? 0 : 1;
}

int cmd_gch(const std::string& path_a, const std::string& path_b,
            const std::string& path_state, int oracle_dz) {
  KrausChannel a = load_channel(path_a);
  KrausChannel b = load_channel(path_b);
  DensityOperator sigma = load_density(path_state);

  double g = channel_superfidelity(a, b, sigma);
  double purity_a = kraus_overlap_sum(a, a, sigma);
  double purity_b = kraus_overlap_sum(b, b, sigma);
  Eigen::Index d_env = std::max<Eigen::Index>(sigma.rank(), 1);
  double f_bound = two_channel_fidelity_oracle(a, b, sigma, d_env);

  std::printf("G_ch = %.12f\n", g);
  std::printf("purity_term_a = %.12f\n", purity_a);
  std::printf("purity_term_b = %.12f\n", purity_b);
  std::printf("F_oracle_bound = %.12f\n", f_bound);
  if (oracle_dz > 0) {
    double oracle = channel_superfidelity_oracle(a, b, sigma, oracle_dz);
    std::printf("purification_oracle = %.12f\n", oracle);
    std::printf("oracle_gap = %.3e\n", std::abs(g - oracle));
  }
  return 0;
}

SweepConfig default_sweep_config() {
  SweepConfig config;
  config.omega = 1.0;
  config.epsilons = {0.0, 0.05, 0.1, 0.5};
  config.times = {0.1, 0.5, 1.0, 2.0, 5.0};
  config.rho0 = 0.5 * cmat::Identity(2, 2);
  return config;
}

int cmd_single_qubit_sweep(const std::string& config_path, const std::string& out_dir) {
  SweepConfig config =
      config_path.empty() ? default_sweep_config() : load_sweep_config(config_path);
  DensityOperator rho0 = [&] {
    try {
      return DensityOperator(config.rho0);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("rho0: ") + e.what());
    }
  }();

  std::vector<std::vector<std::string>> rows;
  double max_err = 0.0;
  for (double eps : config.epsilons) {
    for (double t : config.times) {
      KrausChannel reference = single_qubit_channel(config.omega, 0.0, t);
      KrausChannel detuned = single_qubit_channel(config.omega, eps, t);
      double numeric = channel_superfidelity(reference, detuned, rho0);
      double analytic = analytic_gch_single_qubit(rho0, eps, t);
      double err = std::abs(numeric - analytic);
      max_err = std::max(max_err, err);
      rows.push_back({format_double(eps), format_double(t), format_double(numeric),
                      format_double(analytic), format_double(err)});
    }
  }
  std::filesystem::create_directories(out_dir);
  write_csv(out_dir + "/single_qubit_sweep.csv",
            {"epsilon", "T", "gch_numeric", "gch_analytic", "abs_error"}, rows);
  std::printf("max_abs_error = %.3e\n", max_err);
  return max_err < 1e-7 ? 0 : 1;
}

ControlConfig default_control_config() {
  ControlConfig config;  // full-scale experiment defaults
  config.chain.n_qubits = 3;
  config.chain.coupling = 1.0;
  config.chain.dephasing_rate = 0.1;
  config.chain.n_intervals = 64;
  config.chain.total_time = 6.1;
  config.chain.max_amplitude = 10.0;
  config.target = "NOT3";
  config.seed = 42;
  config.s_values = {0.0,  0.02, 0.04, 0.06, 0.08, 0.1,
                     0.12, 0.14, 0.16, 0.18, 0.2};
  config.trials = 100;
  return config;
}

ControlConfig load_or_default_control(const std::string& config_path) {
  if (config_path.empty()) return default_control_config();
  ControlConfig config = load_control_config(config_path);
  if (config.s_values.empty()) config.s_values = default_control_config().s_values;
  return config;
}

cmat target_gate(const ControlConfig& config) {
  if (config.target == "NOT3") return not_on_last_qubit(config.chain.n_qubits);
  throw std::runtime_error("target: unknown gate '" + config.target + "' (expected NOT3)");
}

int cmd_control_optimize(const ControlConfig& config, const std::string& out_dir) {
  OptimizeResult result =
      optimize_pulses_restarts(config.chain, target_gate(config), config.seed,
                               config.restarts, config.max_iters, config.target_fidelity);
  nlohmann::json j = pulses_to_json(result.pulses);
  j["fidelity"] = result.fidelity;
  j["iterations"] = result.iterations;
  j["reached_target"] = result.reached_target;
  std::filesystem::create_directories(out_dir);
  write_json(out_dir + "/pulses.json", j);
  std::printf("fidelity = %.12f\n", result.fidelity);
  std::printf("iterations = %d\n", result.iterations);
  std::printf("reached_target = %s\n", result.reached_target ? "true" : "false");
  return result.reached_target ? 0 : 3;
}

int cmd_control_sweep(const ControlConfig& config, const std::string& out_dir) {
  PulseSchedule pulses = load_pulses(out_dir + "/pulses.json");
  if (pulses.hx.size() != static_cast<std::size_t>(config.chain.n_intervals))
    throw std::runtime_error("pulses.json: schedule length does not match config N");

  NoiseSweepResult sweep =
      noise_sweep(config.chain, pulses, config.s_values, config.trials, config.seed);

  std::vector<std::vector<std::string>> trial_rows;
  for (std::size_t si = 0; si < sweep.s_values.size(); ++si)
    for (std::size_t t = 0; t < sweep.samples[si].size(); ++t)
      trial_rows.push_back({format_double(sweep.s_values[si]), std::to_string(t),
                            format_double(sweep.samples[si][t])});
  std::filesystem::create_directories(out_dir);
  write_csv(out_dir + "/sweep_trials.csv", {"s", "trial", "gch"}, trial_rows);

  std::vector<std::vector<std::string>> summary_rows;
  for (std::size_t si = 0; si < sweep.s_values.size(); ++si)
    summary_rows.push_back({format_double(sweep.s_values[si]), format_double(sweep.mean[si]),
                            format_double(sweep.min[si]), format_double(sweep.max[si])});
  write_csv(out_dir + "/sweep_summary.csv", {"s", "mean", "min", "max"}, summary_rows);

  std::printf("s_values = %zu, trials = %d\n", sweep.s_values.size(), config.trials);
  std::printf("mean_gch_at_max_s = %.12f\n", sweep.mean.back());
  return 0;
}

int cmd_control_fit(const ControlConfig& config, const std::string& out_dir) {
  std::string summary_path = out_dir + "/sweep_summary.csv";
  std::vector<std::vector<double>> rows = read_csv_numeric(summary_path);
  NoiseSweepResult sweep;
  for (const auto& row : rows) {
    if (row.size() != 4)
      throw std::runtime_error(summary_path + ": expected columns s,mean,min,max");
    sweep.s_values.push_back(row[0]);
    sweep.mean.push_back(row[1]);
    sweep.min.push_back(row[2]);
    sweep.max.push_back(row[3]);
  }
  if (sweep.s_values.empty()) throw std::runtime_error(summary_path + ": no data rows");

  double cutoff = config.s_cutoff.has_value()
                      ? *config.s_cutoff
                      : 0.5 * *std::max_element(sweep.s_values.begin(), sweep.s_values.end());
  QuadraticFit fit = [&] {
    try {
      return quadratic_fit(sweep, cutoff);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("fit: ") + e.what());
    }
  }();

  nlohmann::json j;
  j["c"] = fit.c;
  j["rel_error"] = fit.rel_error;
  j["s_cutoff"] = cutoff;
  std::filesystem::create_directories(out_dir);
  write_json(out_dir + "/fit.json", j);
  std::printf("c = %.12f\n", fit.c);
  std::printf("rel_error = %.12f\n", fit.rel_error);
  std::printf("s_cutoff = %g\n", cutoff);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-channel superfidelity toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tol = 1e-8;
  int oracle_dz = 0;
  std::string channel_path, channel_b_path, state_path;

  CLI::App* validate = app.add_subcommand("validate", "check a channel file for CPTP");
  validate->add_option("channel", channel_path, "channel JSON file")->required();
  validate->add_option("--tol", tol, "CPTP tolerance");
  validate->add_option("--out", out_dir, "output directory for the run manifest");

  CLI::App* gch = app.add_subcommand("gch", "channel superfidelity of two channels at a state");
  gch->add_option("channel_a", channel_path, "first channel JSON file")->required();
  gch->add_option("channel_b", channel_b_path, "second channel JSON file")->required();
  gch->add_option("state", state_path, "density operator JSON file")->required();
  gch->add_option("--oracle", oracle_dz, "cross-check against the purification oracle with this environment dimension");
  gch->add_option("--out", out_dir, "output directory for the run manifest");

  CLI::App* sweep1q = app.add_subcommand(
      "single-qubit-sweep", "compare the numerical pipeline with the closed form over an (epsilon, T) grid");
  sweep1q->add_option("--config", config_path, "sweep config JSON");
  sweep1q->add_option("--out", out_dir, "output directory");

  CLI::App* control = app.add_subcommand("control", "spin-chain control experiment");
  control->require_subcommand(1);
  CLI::App* copt = control->add_subcommand("optimize", "optimize pulses toward the target gate");
  CLI::App* csweep = control->add_subcommand("sweep", "noise-robustness sweep of optimized pulses");
  CLI::App* cfit = control->add_subcommand("fit", "quadratic fit of the sweep summary");
  for (CLI::App* sub : {copt, csweep, cfit}) {
    sub->add_option("--config", config_path, "experiment config JSON");
    sub->add_option("--out", out_dir, "experiment directory");
  }
  for (CLI::App* sub : {copt, csweep})
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CommandContext ctx;
  ctx.config_path = config_path;
  ctx.out_dir = out_dir;

  if (validate->parsed()) {
    ctx.command = "validate";
    ctx.config_path = channel_path;
    return run_with_manifest(ctx, [&] { return cmd_validate(channel_path, tol); });
  }
  if (gch->parsed()) {
    ctx.command = "gch";
    ctx.config_path = channel_path;
    return run_with_manifest(ctx, [&] {
      return cmd_gch(channel_path, channel_b_path, state_path, oracle_dz);
    });
  }
  if (sweep1q->parsed()) {
    ctx.command = "single-qubit-sweep";
    return run_with_manifest(ctx, [&] { return cmd_single_qubit_sweep(config_path, out_dir); });
  }
  const char* sub_name = copt->parsed() ? "optimize" : csweep->parsed() ? "sweep" : "fit";
  ctx.command = std::string("control-") + sub_name;
  return run_with_manifest(ctx, [&]() -> int {
    ControlConfig config = load_or_default_control(config_path);
    if (seed_given) config.seed = seed;
    ctx.seed = config.seed;
    if (copt->parsed()) return cmd_control_optimize(config, out_dir);
    if (csweep->parsed()) return cmd_control_sweep(config, out_dir);
    return cmd_control_fit(config, out_dir);
  });
}
