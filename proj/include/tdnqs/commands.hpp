#pragma once

// `tdnqs` command implementations. Exit codes: 0 success, 1 numerical failure
// or failed benchmark thresholds, 2 configuration / usage / I/O errors.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdnqs/config.hpp"
#include "tdnqs/oracle.hpp"

namespace tdnqs {

/// Pass/fail thresholds applied by the benchmark command.
struct BenchmarkThresholds {
  double ground_state_energy = 1e-6;
  double density_error = 1e-5;
  double energy_drift = 1e-5;
  double moment_error = 1e-3;     ///< applies to both <x>(t) and variance(t)
  double parameter_drift = 0.10;  ///< warning only
  double solve_residual = 1e-8;
};

struct BenchmarkReport {
  Protocol protocol = Protocol::none;
  AmplitudeMap amplitude_map = AmplitudeMap::exp_of_f;
  std::uint64_t seed = 0;

  GroundStateResult ground_state;
  double ground_state_exact = 0.0;
  TrajectoryRecord trajectory;

  double max_density_error = 0.0;
  double max_density_l2 = 0.0;
  double energy_drift = 0.0;
  double initial_energy = 0.0;
  double initial_energy_exact = 0.0;
  double max_center_error = 0.0;    ///< max |<x>(t) - c(t)|
  double max_variance_error = 0.0;  ///< max |variance(t) - sigma^2(t)|
  double parameter_drift = 0.0;
  double max_solve_residual = 0.0;
  double max_cond_estimate = 0.0;

  double ground_state_seconds = 0.0;
  double dynamics_seconds = 0.0;

  BenchmarkThresholds thresholds;

  bool ground_state_pass() const;
  bool density_pass() const;
  bool energy_pass() const;
  bool moment_pass() const;
  bool residual_pass() const;
  bool parameter_warning() const;
  bool passed() const;
};

/// Runs ground state -> quench -> evolve and compares to the analytic state.
/// Numerical failures propagate (EvolutionError / NotConvergedError).
BenchmarkReport run_benchmark(const RunConfig& cfg);

/// Structured `key: value` text report.
std::string to_text(const BenchmarkReport& report);
/// JSON run summary.
std::string to_json(const BenchmarkReport& report);

/// Output directory precedence: explicit flag, config run.output_dir,
/// TDNQS_OUTPUT_DIR, current directory.
std::filesystem::path resolve_output_dir(const std::string& flag, const RunConfig& cfg);

/// Full command-line entry point; `out`/`err` receive human-readable text.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdnqs
