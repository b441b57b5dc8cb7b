#include "superfid/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace superfid {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::runtime_error(message); }

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
}

double require_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field + ": expected a number");
  return j.get<double>();
}

const json& require_key(const json& j, const std::string& field, const char* key) {
  if (!j.is_object()) fail(field + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(field + ": missing key '" + key + "'");
  return *it;
}

std::vector<double> require_number_array(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field + ": expected a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(require_number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

json matrix_to_json(const cmat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

cmat matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field + ": expected a non-empty array of rows");
  const std::size_t n_rows = j.size();
  std::size_t n_cols = 0;
  cmat m;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const json& row = j[i];
    std::string row_field = field + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.empty()) fail(row_field + ": expected a non-empty row array");
    if (i == 0) {
      n_cols = row.size();
      m.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    } else if (row.size() != n_cols) {
      fail(row_field + ": ragged rows");
    }
    for (std::size_t k = 0; k < n_cols; ++k) {
      const json& entry = row[k];
      std::string entry_field = row_field + "[" + std::to_string(k) + "]";
      if (!entry.is_array() || entry.size() != 2)
        fail(entry_field + ": expected a [re, im] pair");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_t(require_number(entry[0], entry_field + "[0]"),
                    require_number(entry[1], entry_field + "[1]"));
    }
  }
  return m;
}

KrausChannel channel_from_json(const json& j) {
  const json& d_in_j = require_key(j, "channel", "d_in");
  const json& d_out_j = require_key(j, "channel", "d_out");
  if (!d_in_j.is_number_integer() || !d_out_j.is_number_integer())
    fail("channel: d_in and d_out must be integers");
  auto d_in = d_in_j.get<Eigen::Index>();
  auto d_out = d_out_j.get<Eigen::Index>();
  const json& kraus = require_key(j, "channel", "kraus");
  if (!kraus.is_array() || kraus.empty()) fail("channel.kraus: expected a non-empty array");
  std::vector<cmat> ops;
  ops.reserve(kraus.size());
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    std::string field = "channel.kraus[" + std::to_string(i) + "]";
    cmat k = matrix_from_json(kraus[i], field);
    if (k.rows() != d_out || k.cols() != d_in)
      fail(field + ": shape does not match d_out x d_in");
    ops.push_back(std::move(k));
  }
  try {
    return KrausChannel(std::move(ops));
  } catch (const std::invalid_argument& e) {
    fail(std::string("channel: ") + e.what());
  }
}

json channel_to_json(const KrausChannel& ch) {
  json j;
  j["d_in"] = ch.d_in();
  j["d_out"] = ch.d_out();
  json kraus = json::array();
  for (const cmat& k : ch.operators()) kraus.push_back(matrix_to_json(k));
  j["kraus"] = std::move(kraus);
  return j;
}

KrausChannel load_channel(const std::string& path) {
  return channel_from_json(parse_file(path));
}

void save_channel(const KrausChannel& ch, const std::string& path) {
  write_json(path, channel_to_json(ch));
}

DensityOperator load_density(const std::string& path) {
  json j = parse_file(path);
  cmat m = matrix_from_json(require_key(j, path, "rho"), "rho");
  try {
    return DensityOperator(std::move(m));
  } catch (const std::invalid_argument& e) {
    fail(path + ": rho: " + e.what());
  }
}

void save_density(const DensityOperator& rho, const std::string& path) {
  json j;
  j["rho"] = matrix_to_json(rho.matrix());
  write_json(path, j);
}

SweepConfig load_sweep_config(const std::string& path) {
  json j = parse_file(path);
  SweepConfig config;
  if (j.contains("omega")) config.omega = require_number(j["omega"], "omega");
  config.epsilons = require_number_array(require_key(j, path, "epsilons"), "epsilons");
  config.times = require_number_array(require_key(j, path, "times"), "times");
  for (double t : config.times)
    if (!(t >= 0.0)) fail("times: entries must be nonnegative");
  config.rho0 = matrix_from_json(require_key(j, path, "rho0"), "rho0");
  return config;
}

ControlConfig load_control_config(const std::string& path) {
  json j = parse_file(path);
  ControlConfig config;
  auto get_int = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(std::string(key) + ": expected an integer");
    return j[key].get<int>();
  };
  auto get_num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    return require_number(j[key], key);
  };
  config.chain.n_qubits = get_int("n_qubits", config.chain.n_qubits);
  config.chain.coupling = get_num("J", config.chain.coupling);
  config.chain.dephasing_rate = require_number(require_key(j, path, "gamma"), "gamma");
  config.chain.n_intervals = get_int("N", config.chain.n_intervals);
  config.chain.total_time = get_num("T", config.chain.total_time);
  config.chain.max_amplitude = get_num("max_amplitude", config.chain.max_amplitude);
  if (j.contains("target")) {
    if (!j["target"].is_string()) fail("target: expected a string");
    config.target = j["target"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail("seed: expected an unsigned integer");
    config.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("s_values"))
    config.s_values = require_number_array(j["s_values"], "s_values");
  config.trials = get_int("trials", config.trials);
  config.restarts = get_int("restarts", config.restarts);
  config.max_iters = get_int("max_iters", config.max_iters);
  config.target_fidelity = get_num("target_fidelity", config.target_fidelity);
  if (j.contains("s_cutoff")) config.s_cutoff = require_number(j["s_cutoff"], "s_cutoff");
  try {
    config.chain.validate();
  } catch (const std::invalid_argument& e) {
    fail(path + ": " + e.what());
  }
  return config;
}

json pulses_to_json(const PulseSchedule& pulses) {
  json j;
  j["hx"] = pulses.hx;
  j["hy"] = pulses.hy;
  return j;
}

PulseSchedule pulses_from_json(const json& j) {
  PulseSchedule pulses;
  pulses.hx = require_number_array(require_key(j, "pulses", "hx"), "hx");
  pulses.hy = require_number_array(require_key(j, "pulses", "hy"), "hy");
  if (pulses.hx.size() != pulses.hy.size()) fail("pulses: hx and hy lengths differ");
  return pulses;
}

PulseSchedule load_pulses(const std::string& path) {
  return pulses_from_json(parse_file(path));
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) fail("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    fail("parse_double: invalid numeric literal '" + text + "'");
  return value;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary keeps UNIX newlines everywhere
  if (!out) fail("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) fail(path + ": row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) fail("write failed for " + path);
}

std::vector<std::vector<double>> read_csv_numeric(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
    rows.push_back(std::move(row));
  }
  if (first) fail(path + ": missing header row");
  return rows;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail("write failed for " + path);
}

json read_json(const std::string& path) { return parse_file(path); }

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config_path;
  j["seed"] = manifest.seed;
  j["out_dir"] = manifest.out_dir;
  j["version"] = manifest.version;
  j["duration_seconds"] = manifest.duration_seconds;
  write_json(path, j);
}

}  // namespace superfid
