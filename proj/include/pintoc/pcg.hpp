#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace pintoc {

struct SolveReport {
  int iterations = 0;
  std::vector<double> relative_residuals;  // entry 0 is 1
  double wall_time = 0.0;                  // seconds spent in the iteration loop
  bool converged = false;
  std::optional<std::vector<double>> knorm_errors;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Preconditioned conjugate gradient from the zero initial guess.  The
/// recurrence residual drives the iteration; the stopping test recomputes
/// the true residual ||b - A v_k|| <= tol * ||b|| each step.  When a
/// reference solution is given, the A-norm errors ||v_k - ref||_A are
/// recorded per iteration.
std::pair<Eigen::VectorXd, SolveReport> pcg_solve(
    const LinearOperator& apply_A, const LinearOperator& apply_Minv,
    const Eigen::VectorXd& b, double tol = 1e-8, int maxit = 500,
    const Eigen::VectorXd* reference = nullptr);

/// True iff knorm_errors[k] <= 2 * 3^{-k} * knorm_errors[0] for all k.
bool convergence_bound_check(const SolveReport& report);

}  // namespace pintoc
