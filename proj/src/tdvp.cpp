#include "tdnqs/tdvp.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tdnqs {

QGTSystem assemble(const WaveFunctionOnGrid& wf, const HamiltonianSpec& ham, const Grid& grid,
                   EvolutionMode mode) {
  const QuadratureDensity q = quadrature_density(wf, grid);
  const Eigen::VectorXcd e_loc = local_energy(wf, ham, grid);
  const Eigen::VectorXcd p = q.probabilities.cast<Complex>();

  const Eigen::RowVectorXcd o_mean = p.transpose() * wf.log_derivs;
  const Complex e_mean = p.dot(e_loc);  // p is real, conjugation is harmless
  const Eigen::MatrixXcd centered = wf.log_derivs.rowwise() - o_mean;
  const Eigen::MatrixXcd weighted = q.probabilities.asDiagonal() * centered;

  QGTSystem sys;
  sys.mode = mode;
  sys.energy = e_mean;
  sys.S = centered.adjoint() * weighted;
  sys.F_star = weighted.adjoint() * (e_loc.array() - e_mean).matrix();
  return sys;
}

QGTSystem regularize(QGTSystem sys, Complex lambda) {
  if (!(std::abs(lambda) < kMaxShiftMagnitude)) {
    throw std::invalid_argument("diagonal shift |lambda| must be < 0.1");
  }
  sys.S.diagonal().array() += lambda;
  sys.lambda += lambda;
  return sys;
}

ParameterVelocity solve_velocity(const QGTSystem& sys) {
  const Eigen::Index m = sys.S.rows();
  if (sys.S.cols() != m || sys.F_star.size() != m) {
    throw std::invalid_argument("QGT system dimensions are inconsistent");
  }
  const Eigen::VectorXcd rhs =
      sys.mode == EvolutionMode::real_time ? Eigen::VectorXcd(Complex(0, -1) * sys.F_star)
                                           : Eigen::VectorXcd(-sys.F_star);

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.S);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double scale = std::max(sys.S.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if (!(pivots.minCoeff() > scale * std::numeric_limits<double>::epsilon() * 1e-3)) {
    throw SingularSystemError("QGT pivot underflow (min |pivot| = " +
                              std::to_string(pivots.minCoeff()) + ")");
  }

  ParameterVelocity out;
  const double rcond = lu.rcond();
  out.report.cond_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (out.report.cond_estimate > kConditionLimit) {
    std::ostringstream msg;
    msg << "regularized QGT condition estimate " << out.report.cond_estimate << " exceeds "
        << kConditionLimit;
    throw IllConditionedError(msg.str());
  }
  out.report.ill_conditioned = out.report.cond_estimate > kConditionWarn;

  out.values = lu.solve(rhs);
  out.values += lu.solve(rhs - sys.S * out.values);
  const double f_norm = sys.F_star.norm();
  const double r_norm = (sys.S * out.values - rhs).norm();
  out.report.residual = f_norm > 0.0 ? r_norm / f_norm : r_norm;
  if (!out.values.allFinite()) throw SingularSystemError("parameter velocity is not finite");
  out.report.residual_exceeded = !(out.report.residual < kResidualLimit);
  return out;
}

}  // namespace tdnqs
