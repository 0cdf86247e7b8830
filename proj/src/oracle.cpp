#include "tdnqs/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tdnqs {

AnalyticState AnalyticState::ground(double omega, double x0) {
  return AnalyticState{AnalyticKind::ground, omega, omega, x0};
}

AnalyticState AnalyticState::coherent(double omega, double x0_init) {
  return AnalyticState{AnalyticKind::coherent, omega, omega, x0_init};
}

AnalyticState AnalyticState::breathing(double omega0, double omega) {
  return AnalyticState{AnalyticKind::breathing, omega0, omega, 0.0};
}

double AnalyticState::center(double t) const {
  switch (kind) {
    case AnalyticKind::ground:
      return x0_init;
    case AnalyticKind::coherent:
    case AnalyticKind::breathing:
      return x0_init * std::cos(omega * t);
  }
  return 0.0;
}

double AnalyticState::sigma2(double t) const {
  const double s0 = 0.5 / omega0;
  switch (kind) {
    case AnalyticKind::ground:
    case AnalyticKind::coherent:
      return s0;
    case AnalyticKind::breathing: {
      const double c = std::cos(omega * t);
      const double s = std::sin(omega * t);
      return s0 * c * c + s * s / (4.0 * s0 * omega * omega);
    }
  }
  return s0;
}

Eigen::VectorXd analytic_density(const AnalyticState& state, double t, const Grid& grid) {
  const double c = state.center(t);
  const double s2 = state.sigma2(t);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);
  return (norm * (-(grid.points.array() - c).square() / (2.0 * s2)).exp()).matrix();
}

DensityError density_error(const Eigen::VectorXd& numeric, const Eigen::VectorXd& analytic,
                           const Grid& grid) {
  if (numeric.size() != analytic.size() || numeric.size() != grid.n) {
    throw std::invalid_argument("density arrays have mismatched lengths");
  }
  const Eigen::ArrayXd diff = (numeric - analytic).array();
  DensityError err;
  err.max_abs = diff.abs().maxCoeff();
  err.l2 = std::sqrt((grid.weights.array() * diff.square()).sum());
  return err;
}

double energy_drift(const TrajectoryRecord& traj) {
  if (traj.observables.empty()) throw std::invalid_argument("energy_drift of an empty trajectory");
  const double e0 = traj.observables.front().energy;
  double drift = 0.0;
  for (const Observables& obs : traj.observables) drift = std::max(drift, std::abs(obs.energy - e0));
  return drift;
}

double parameter_drift(const TrajectoryRecord& traj) {
  if (traj.theta_snapshots.empty()) {
    throw std::invalid_argument("parameter_drift of an empty trajectory");
  }
  const Parameters& theta0 = traj.theta_snapshots.front().second;
  const Eigen::ArrayXd scale = theta0.cwiseAbs().array().max(1.0);
  double drift = 0.0;
  for (const auto& [t, theta] : traj.theta_snapshots) {
    drift = std::max(drift, ((theta - theta0).cwiseAbs().array() / scale).maxCoeff());
  }
  return drift;
}

double analytic_energy(const AnalyticState& state) {
  // <p^2>/2 + omega^2 <(x - x_c)^2>/2 for a real Gaussian of variance s0
  // centered at x0_init, evaluated in the evolution trap (centered at 0 unless
  // this is a pure ground state).
  const double s0 = 0.5 / state.omega0;
  const double kinetic = 0.125 / s0;
  const double offset = state.kind == AnalyticKind::ground ? 0.0 : state.x0_init;
  return kinetic + 0.5 * state.omega * state.omega * (s0 + offset * offset);
}

}  // namespace tdnqs
