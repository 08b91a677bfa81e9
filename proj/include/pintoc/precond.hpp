#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>

#include "pintoc/kkt.hpp"
#include "pintoc/temporal.hpp"

namespace pintoc {

/// Matching-Schur-complement preconditioner P = R R^T with
/// R = (sqrt(tau) I_N + 2 sqrt(eta) B) (x) I_J + tau sqrt(eta) I_N (x) L_h.
/// The inverse is applied by block forward and backward substitution over
/// time; the diagonal-block solves are exact (sine transform) or multigrid
/// iterated to relative residual 1e-12.  Sequential over time blocks by
/// construction.
class MscPreconditioner {
public:
  explicit MscPreconditioner(const ControlProblem& prob);

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& w) const;  // P^{-1} w

private:
  Eigen::VectorXd block_solve(const Eigen::VectorXd& r) const;
  Eigen::VectorXd apply_inverse_spectral(const Eigen::VectorXd& w) const;

  const ControlProblem* prob_;
  TemporalSymbol q_;
  double sqrt_tau_, two_sqrt_eta_, scale_;
  std::optional<FixedShiftSolver> fast_;  // sine mode only
};

/// Parallel-in-time preconditioner P_alpha = R_alpha R_alpha^T, where
/// R_alpha replaces B by its alpha-circulant completion.  R_alpha^{-1} is
/// applied in three steps: diagonal scaling + DFT along time, N independent
/// complex-shifted spatial solves, inverse DFT + inverse scaling.
class PinTPreconditioner {
public:
  /// P_alpha^{-1} = R_alpha^{-T} R_alpha^{-1}; TransposeFirst applies the
  /// factors in the opposite order (also SPD, exposed for experiment parity).
  enum class FactorOrder { TransposeLast, TransposeFirst };

  PinTPreconditioner(const ControlProblem& prob, double alpha,
                     FactorOrder order = FactorOrder::TransposeLast,
                     int cycles = 1);

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& w) const;  // P_alpha^{-1} w

  Eigen::VectorXcd apply_Ralpha_inverse(const Eigen::VectorXcd& r) const;
  Eigen::VectorXcd apply_RalphaT_inverse(const Eigen::VectorXcd& r) const;

  const AlphaCirculantFactor& factor() const { return factor_; }
  double alpha() const { return factor_.alpha; }

private:
  Eigen::VectorXcd three_step_solve(const Eigen::VectorXcd& r, bool transpose) const;

  const ControlProblem* prob_;
  AlphaCirculantFactor factor_;
  FactorOrder order_;
  int cycles_;
  double sqrt_tau_, two_sqrt_eta_, scale_;
  std::shared_ptr<const Dft> dft_;
};

}  // namespace pintoc
