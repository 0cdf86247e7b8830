#pragma once

// Closed-form harmonic-oscillator reference densities and the error metrics
// used to benchmark evolved states against them. Densities only; phases are
// not modelled.

#include <Eigen/Dense>

#include "tdnqs/integrator.hpp"

namespace tdnqs {

enum class AnalyticKind { ground, coherent, breathing };

/// Gaussian reference state: prepared as the ground state of a trap with
/// frequency omega0 centered at x0_init, then evolved in a trap with frequency
/// omega centered at 0. The center follows x0_init cos(omega t) and the width
/// the breathing law independently, so a displaced frequency quench is a
/// `breathing` state with nonzero x0_init.
struct AnalyticState {
  AnalyticKind kind = AnalyticKind::ground;
  double omega0 = 1.0;
  double omega = 1.0;
  double x0_init = 0.0;

  static AnalyticState ground(double omega, double x0);
  static AnalyticState coherent(double omega, double x0_init);
  static AnalyticState breathing(double omega0, double omega);

  /// c(t)
  double center(double t) const;
  /// sigma^2(t)
  double sigma2(double t) const;
};

Eigen::VectorXd analytic_density(const AnalyticState& state, double t, const Grid& grid);

struct DensityError {
  double max_abs = 0.0;
  double l2 = 0.0;  ///< sqrt(sum_i w_i (numeric_i - analytic_i)^2)
};

/// Throws std::invalid_argument on length mismatch.
DensityError density_error(const Eigen::VectorXd& numeric, const Eigen::VectorXd& analytic,
                           const Grid& grid);

/// max_k |E(t_k) - E(t_0)|. Throws std::invalid_argument on an empty trajectory.
double energy_drift(const TrajectoryRecord& traj);

/// max over snapshots and mu of |theta_mu(t) - theta_mu(0)| / max(1, |theta_mu(0)|).
double parameter_drift(const TrajectoryRecord& traj);

/// Exact energy of the prepared Gaussian in the evolution trap (conserved).
double analytic_energy(const AnalyticState& state);

}  // namespace tdnqs
