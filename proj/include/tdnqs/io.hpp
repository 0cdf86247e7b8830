#pragma once

// Checkpoints, CSV export and atomic file writes.

#include <cstdint>
#include <filesystem>
#include <string>

#include "tdnqs/integrator.hpp"

namespace tdnqs {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// Versioned parameter dump: a `key = value` header followed by M lines of
/// `index re im`, each real printed with 17 significant digits.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  NetworkSpec spec;
  std::uint64_t seed = 0;
  AmplitudeMap amplitude_map = AmplitudeMap::exp_of_f;
  Parameters theta;
};

std::string to_text(const Checkpoint& ckpt);
/// Throws std::runtime_error with a line-numbered message on malformed input.
Checkpoint parse_checkpoint(const std::string& text);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Columns: t, energy, norm, x_mean, x2_mean, variance, solve_residual, cond_estimate
std::string trajectory_csv(const TrajectoryRecord& traj);

/// Long format. Columns: t, x, density
std::string density_csv(const TrajectoryRecord& traj, const Grid& grid);

/// Columns: step, tau, energy, delta_energy, solve_residual, cond_estimate
std::string energy_history_csv(const TrajectoryRecord& traj, double dt);

/// Columns: x, density
std::string final_density_csv(const Observables& obs, const Grid& grid);

}  // namespace tdnqs
