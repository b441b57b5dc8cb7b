#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "superfid/channels.hpp"
#include "superfid/control.hpp"

// File formats. A complex matrix is an array of rows, each entry a
// two-element [re, im] array. Channels: {"d_in", "d_out", "kraus": [matrix]}.
// Density operators: {"rho": matrix}. All parse failures throw
// std::runtime_error with a message naming the offending field. All emitted
// numbers use '.' as the decimal separator regardless of locale.

namespace superfid {

nlohmann::json matrix_to_json(const cmat& m);
cmat matrix_from_json(const nlohmann::json& j, const std::string& field);

KrausChannel channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const KrausChannel& ch);

KrausChannel load_channel(const std::string& path);
void save_channel(const KrausChannel& ch, const std::string& path);

DensityOperator load_density(const std::string& path);
void save_density(const DensityOperator& rho, const std::string& path);

// Single-qubit sweep config: {"omega", "epsilons": [...], "times": [...],
// "rho0": matrix}.
struct SweepConfig {
  double omega = 1.0;
  std::vector<double> epsilons;
  std::vector<double> times;
  cmat rho0;
};
SweepConfig load_sweep_config(const std::string& path);

// Control experiment config: {"n_qubits", "J", "gamma", "N", "T",
// "max_amplitude", "target": "NOT3", "seed", "s_values": [...], "trials"}.
// Optional keys with defaults: "restarts", "max_iters", "target_fidelity",
// "s_cutoff" (fit range; defaults to half the largest s value).
struct ControlConfig {
  SpinChainConfig chain;
  std::string target = "NOT3";
  std::uint64_t seed = 0;
  std::vector<double> s_values;
  int trials = 100;
  int restarts = 5;
  int max_iters = 2000;
  double target_fidelity = 0.99;
  std::optional<double> s_cutoff;
};
ControlConfig load_control_config(const std::string& path);

nlohmann::json pulses_to_json(const PulseSchedule& pulses);
PulseSchedule pulses_from_json(const nlohmann::json& j);
PulseSchedule load_pulses(const std::string& path);

// Shortest round-trip decimal form of x, locale-independent.
std::string format_double(double x);

// Locale-independent parse of one decimal literal; throws on trailing junk.
double parse_double(const std::string& text);

// CSV writers: header row, UNIX newlines. Each row vector must match the
// column count of its header.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Reads a numeric CSV written by write_csv: skips the header row, parses
// every remaining cell as a double.
std::vector<std::vector<double>> read_csv_numeric(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string version;
  double duration_seconds = 0.0;
};
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace superfid
