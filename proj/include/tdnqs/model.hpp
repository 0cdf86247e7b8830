#pragma once

// Spatial grid, harmonic-oscillator Hamiltonian and quadrature observables.
// Units: hbar = m = omega_0 = 1.

#include <Eigen/Dense>

#include "tdnqs/ansatz.hpp"

namespace tdnqs {

/// Uniform grid with endpoints included; `weights` are trapezoidal.
struct Grid {
  double x_min = -8.0;
  double x_max = 8.0;
  Eigen::Index n = 100;
  double spacing = 0.0;
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

/// Throws std::invalid_argument unless n >= 3 and x_min < x_max.
Grid make_grid(double x_min, double x_max, Eigen::Index n);
inline Grid default_grid() { return make_grid(-8.0, 8.0, 100); }

/// H = -1/2 d^2/dx^2 + 1/2 omega^2 (x - x0)^2
struct HamiltonianSpec {
  double omega = 1.0;
  double x0 = 0.0;
};

void validate(const HamiltonianSpec& ham);

/// log Psi and its derivatives sampled on a grid. Row i of `log_derivs`
/// holds d log Psi / d theta at x_i.
struct WaveFunctionOnGrid {
  Eigen::VectorXcd log_psi;
  Eigen::VectorXcd dlog_psi;
  Eigen::VectorXcd d2log_psi;
  Eigen::MatrixXcd log_derivs;

  Eigen::Index size() const { return log_psi.size(); }
  Eigen::Index parameter_count() const { return log_derivs.cols(); }
};

WaveFunctionOnGrid evaluate_on_grid(const Parameters& theta, const Grid& grid, AmplitudeMap map);

/// E_loc(x) = -1/2 (L'' + L'^2) + 1/2 omega^2 (x - x0)^2 with L = log Psi.
Eigen::VectorXcd local_energy(const WaveFunctionOnGrid& wf, const HamiltonianSpec& ham,
                              const Grid& grid);

/// Quadrature probabilities p_i = w_i |Psi_i|^2 / sum_j w_j |Psi_j|^2, computed
/// with the max log-density subtracted so that only ratios are ever formed.
struct QuadratureDensity {
  Eigen::VectorXd probabilities;
  double log_norm = 0.0;  ///< log sum_i w_i |Psi_i|^2
};

QuadratureDensity quadrature_density(const WaveFunctionOnGrid& wf, const Grid& grid);

struct Observables {
  double energy = 0.0;
  double energy_imag = 0.0;  ///< Im <H>, kept as a health metric
  double norm = 0.0;         ///< may over/underflow; log_norm is always finite
  double log_norm = 0.0;
  double x_mean = 0.0;
  double x2_mean = 0.0;
  double variance = 0.0;
  Eigen::VectorXd density;  ///< |psi|^2 normalized to unit integral

  /// |Im <H>| / max(1, |Re <H>|)
  double energy_imag_ratio() const;
};

Observables observables(const WaveFunctionOnGrid& wf, const HamiltonianSpec& ham, const Grid& grid);

inline Observables observables(const Parameters& theta, const HamiltonianSpec& ham, const Grid& grid,
                               AmplitudeMap map) {
  return observables(evaluate_on_grid(theta, grid, map), ham, grid);
}

}  // namespace tdnqs
