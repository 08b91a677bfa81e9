#include "pintoc/pcg.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace pintoc {

std::pair<Eigen::VectorXd, SolveReport> pcg_solve(
    const LinearOperator& apply_A, const LinearOperator& apply_Minv,
    const Eigen::VectorXd& b, double tol, int maxit,
    const Eigen::VectorXd* reference) {
  SolveReport report;
  report.relative_residuals.push_back(1.0);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.converged = true;
    return {v, report};
  }

  auto knorm_error = [&](const Eigen::VectorXd& vk) {
    const Eigen::VectorXd e = vk - *reference;
    const double q = e.dot(apply_A(e));
    return std::sqrt(std::max(q, 0.0));
  };
  if (reference) report.knorm_errors.emplace().push_back(knorm_error(v));

  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = apply_Minv(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  if (rz <= 0.0) throw std::runtime_error("pcg_solve: preconditioner is not positive definite");

  for (int k = 1; k <= maxit; ++k) {
    const Eigen::VectorXd Ap = apply_A(p);
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0) throw std::runtime_error("pcg_solve: operator is not positive definite");
    const double step = rz / pAp;
    v += step * p;
    r -= step * Ap;

    report.iterations = k;
    const double true_res = (b - apply_A(v)).norm() / bnorm;
    report.relative_residuals.push_back(true_res);
    if (reference) report.knorm_errors->push_back(knorm_error(v));
    if (true_res <= tol) {
      report.converged = true;
      break;
    }

    z = apply_Minv(r);
    const double rz_next = r.dot(z);
    if (rz_next <= 0.0)
      throw std::runtime_error("pcg_solve: preconditioner is not positive definite");
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {v, report};
}

bool convergence_bound_check(const SolveReport& report) {
  if (!report.knorm_errors)
    throw std::logic_error("convergence_bound_check: no K-norm data recorded");
  const auto& e = *report.knorm_errors;
  const double e0 = e.front();
  double factor = 1.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] > 2.0 * factor * e0 * (1.0 + 1e-8)) return false;
    factor /= 3.0;
  }
  return true;
}

}  // namespace pintoc
