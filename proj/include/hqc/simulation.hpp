#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hqc/dynamics.hpp"

namespace hqc {

/// A validated simulation request.
struct RunConfig {
  ProductSpec spec;
  double hbar = 1.0;
  Expression h_q, h_c, h_i;
  std::vector<VariableId> state_variables;
  std::vector<double> mean;
  Matrix covariance;
  double t_start = 0.0, t_stop = 0.0;
  int steps = 0;
  Method method = Method::matrix_exponential;
  std::vector<Expression> observables;
  PropagationOptions propagation;
  double audit_tolerance = 1e-9;
  double energy_tolerance = 1e-8;
  /// Recorded for provenance; the simulation itself draws no random numbers.
  std::optional<std::uint64_t> seed;
  std::filesystem::path csv_path, json_path;
  nlohmann::json echo;

  std::vector<double> times() const;
};

/// Validates a configuration document; unknown keys are rejected. Relative
/// output paths are resolved against `base`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base = {});
RunConfig load_run_config(const std::filesystem::path& file);

struct SimulationResult {
  std::vector<double> times;
  std::vector<std::vector<std::complex<double>>> observables;  ///< [t][k]
  std::vector<double> audit_max_abs_dev;
  std::vector<std::complex<double>> energy;
  double max_audit_dev = 0.0;
  double max_poisson_dev = 0.0;
  double max_moyal_dev = 0.0;
  double energy_drift = 0.0;
  bool consistent_hybrid = true;
  std::vector<std::string> warnings;
};

SimulationResult run_simulation(const RunConfig& config);

/// `t,<obs...>,audit_max_abs_dev,energy` with RFC 4180 quoting.
std::string simulation_csv(const RunConfig& config, const SimulationResult& result);
nlohmann::json simulation_summary(const RunConfig& config, const SimulationResult& result);

/// Shortest round-trip decimal form.
std::string format_double(double x);
/// `a+bi`.
std::string format_complex(std::complex<double> z);

}  // namespace hqc
