#pragma once

// Quantum geometric tensor and variational forces on the grid, diagonal-shift
// regularization and the parameter-velocity solve.

#include <Eigen/Dense>

#include "tdnqs/model.hpp"

namespace tdnqs {

enum class EvolutionMode { real_time, imaginary_time };

/// S theta_dot = -i F*   (real time)
/// S theta_dot = -F*     (imaginary time)
///
/// With O_mu = d log Psi / d theta_mu and <.> the normalized quadrature average,
///   S_{nu mu} = <O_nu^* O_mu> - <O_nu^*><O_mu>
///   F*_nu     = <O_nu^* E_loc> - <O_nu^*><E_loc>
struct QGTSystem {
  Eigen::MatrixXcd S;
  Eigen::VectorXcd F_star;
  Complex lambda{0.0, 0.0};
  EvolutionMode mode = EvolutionMode::real_time;
  Complex energy{};  ///< <E_loc>, the unregularized expectation value
};

inline constexpr double kMaxShiftMagnitude = 1e-1;
inline constexpr double kConditionWarn = 1e12;
inline constexpr double kConditionLimit = 1e14;
inline constexpr double kResidualLimit = 1e-8;

QGTSystem assemble(const WaveFunctionOnGrid& wf, const HamiltonianSpec& ham, const Grid& grid,
                   EvolutionMode mode = EvolutionMode::real_time);

/// S <- S + lambda * 1. F* is untouched. Throws if |lambda| >= 0.1.
QGTSystem regularize(QGTSystem sys, Complex lambda);

struct SolveReport {
  double residual = 0.0;       ///< ||S v - rhs|| / ||F*||
  double cond_estimate = 1.0;  ///< 1-norm estimate from the LU factors
  bool ill_conditioned = false;
  bool residual_exceeded = false;  ///< residual >= kResidualLimit
};

struct ParameterVelocity {
  Eigen::VectorXcd values;
  SolveReport report;
};

/// Dense complex LU with partial pivoting and one step of iterative
/// refinement. S is never assumed Hermitian (a complex shift breaks
/// Hermiticity). Throws SingularSystemError on a vanishing pivot or a
/// non-finite result and IllConditionedError above kConditionLimit. The
/// residual is recorded and flagged against kResidualLimit; ill_conditioned is
/// flagged above kConditionWarn.
ParameterVelocity solve_velocity(const QGTSystem& sys);

}  // namespace tdnqs
