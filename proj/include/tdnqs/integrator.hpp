#pragma once

// Fixed-step RK4 for the parameter ODE, the imaginary-time ground-state loop
// and the real-time evolution loop.

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "tdnqs/tdvp.hpp"

namespace tdnqs {

/// Classic RK4. Errors raised by the velocity field are rethrown as
/// StageError tagged with the 1-based stage index.
template <typename Vector, typename Field>
Vector rk4_step(const Vector& theta, double dt, Field&& velocity) {
  auto stage = [&velocity](int index, const Vector& at) -> Vector {
    try {
      return velocity(at);
    } catch (const StageError&) {
      throw;
    } catch (const NumericalError& e) {
      throw StageError(index, e.what());
    }
  };
  const Vector k1 = stage(1, theta);
  const Vector k2 = stage(2, theta + (0.5 * dt) * k1);
  const Vector k3 = stage(3, theta + (0.5 * dt) * k2);
  const Vector k4 = stage(4, theta + dt * k3);
  return theta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct EvolutionConfig {
  double dt = 0.1;
  double t_max = 50.0;
  Complex lambda{0.0, 1e-6};
  EvolutionMode mode = EvolutionMode::real_time;
  int record_every = 1;
  AmplitudeMap amplitude_map = AmplitudeMap::exp_of_f;

  static EvolutionConfig ground_state_defaults();
};

void validate(const EvolutionConfig& cfg);

/// |E_k - E_{k-1}| <= tol for `patience` consecutive RK4 steps.
struct ConvergenceCriterion {
  double tol = 1e-8;
  int patience = 10;
  std::int64_t max_steps = 100000;
};

void validate(const ConvergenceCriterion& crit);

/// Worst case over the four RK4 stages of one step.
struct StepDiagnostics {
  std::int64_t step = 0;
  double solve_residual = 0.0;
  double cond_estimate = 0.0;
  double energy_imag_ratio = 0.0;  ///< |Im <H>| / max(1, |Re <H>|)
  double max_velocity = 0.0;
  bool ill_conditioned = false;

  void merge(const StepDiagnostics& other);
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Observables> observables;
  std::vector<std::pair<double, Parameters>> theta_snapshots;
  /// diagnostics[k] is merged over every step since times[k-1]; diagnostics[0]
  /// is a probe evaluation at the initial state.
  std::vector<StepDiagnostics> diagnostics;

  bool empty() const { return times.empty(); }
  std::size_t size() const { return times.size(); }
};

/// TDVP right-hand side: theta -> theta_dot. Collects per-stage diagnostics
/// until reset. Real-time mode hard-fails when |Im <H>| / max(1, |Re <H>|)
/// exceeds kEnergyImagLimit.
class TdvpVelocity {
 public:
  static constexpr double kEnergyImagLimit = 1e-6;

  TdvpVelocity(Grid grid, HamiltonianSpec ham, AmplitudeMap map, Complex lambda, EvolutionMode mode);

  Parameters operator()(const Parameters& theta);

  const StepDiagnostics& diagnostics() const { return diag_; }
  void reset() { diag_ = StepDiagnostics{}; }

 private:
  Grid grid_;
  HamiltonianSpec ham_;
  AmplitudeMap map_;
  Complex lambda_;
  EvolutionMode mode_;
  StepDiagnostics diag_;
};

/// Thrown when the ground-state loop exhausts max_steps.
class NotConvergedError : public NumericalError {
 public:
  NotConvergedError(const std::string& what, TrajectoryRecord trajectory, Parameters theta)
      : NumericalError(what), trajectory(std::move(trajectory)), theta(std::move(theta)) {}
  TrajectoryRecord trajectory;
  Parameters theta;
};

/// Numerical failure in the middle of a run; carries everything recorded so far.
class EvolutionError : public NumericalError {
 public:
  EvolutionError(const std::string& what, TrajectoryRecord trajectory, Parameters theta)
      : NumericalError(what), trajectory(std::move(trajectory)), theta(std::move(theta)) {}
  TrajectoryRecord trajectory;
  Parameters theta;
};

struct GroundStateResult {
  Parameters theta;
  TrajectoryRecord trajectory;
  std::int64_t steps = 0;
  double energy = 0.0;
};

/// Imaginary-time propagation until the energy settles. Requires
/// cfg.mode == imaginary_time and a real, non-negative shift.
GroundStateResult find_ground_state(const Parameters& theta0, const HamiltonianSpec& ham,
                                    const Grid& grid, const EvolutionConfig& cfg,
                                    const ConvergenceCriterion& crit);

/// Real-time evolution from t = 0 to t_max. Observables every record_every
/// steps (and always at the last step), diagnostics every step.
TrajectoryRecord evolve(const Parameters& theta0, const HamiltonianSpec& ham, const Grid& grid,
                        const EvolutionConfig& cfg);

}  // namespace tdnqs
