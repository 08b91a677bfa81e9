#include "pintoc/pcg.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

using namespace pintoc;

namespace {

Eigen::MatrixXd random_spd(int n, double lo, double hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = dist(rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ();
  Eigen::VectorXd ev(n);
  std::uniform_real_distribution<double> unif(lo, hi);
  for (int i = 0; i < n; ++i) ev[i] = unif(rng);
  ev[0] = lo;
  ev[n - 1] = hi;
  return Q * ev.asDiagonal() * Q.transpose();
}

LinearOperator matrix_op(const Eigen::MatrixXd& A) {
  return [A](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); };
}

LinearOperator identity_op() {
  return [](const Eigen::VectorXd& v) { return v; };
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("unpreconditioned solve matches a dense factorization") {
  const int n = 20;
  const Eigen::MatrixXd A = random_spd(n, 0.5, 4.0, 1);
  const Eigen::VectorXd b = random_vector(n, 2);
  const auto [x, report] = pcg_solve(matrix_op(A), identity_op(), b, 1e-12, 200);
  CHECK(report.converged);
  CHECK((A * x - b).norm() <= 1e-11 * b.norm());
  const Eigen::VectorXd exact = A.ldlt().solve(b);
  CHECK((x - exact).norm() <= 1e-9 * exact.norm());
}

TEST_CASE("exact inverse preconditioner converges in one iteration") {
  const int n = 12;
  const Eigen::MatrixXd A = random_spd(n, 1.0, 50.0, 3);
  const Eigen::MatrixXd Ainv = A.inverse();
  const Eigen::VectorXd b = random_vector(n, 4);
  const auto [x, report] = pcg_solve(matrix_op(A), matrix_op(Ainv), b, 1e-10, 50);
  CHECK(report.converged);
  CHECK(report.iterations == 1);
  CHECK((A * x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("residual history starts at one and ends below the tolerance") {
  const int n = 30;
  const Eigen::MatrixXd A = random_spd(n, 0.1, 10.0, 5);
  const Eigen::VectorXd b = random_vector(n, 6);
  const double tol = 1e-8;
  const auto [x, report] = pcg_solve(matrix_op(A), identity_op(), b, tol, 200);
  REQUIRE(!report.relative_residuals.empty());
  CHECK(report.relative_residuals.front() == 1.0);
  CHECK(report.relative_residuals.back() <= tol);
  CHECK(static_cast<int>(report.relative_residuals.size()) == report.iterations + 1);
  CHECK(report.wall_time >= 0.0);
}

TEST_CASE("zero right-hand side converges immediately to zero") {
  const auto [x, report] =
      pcg_solve(identity_op(), identity_op(), Eigen::VectorXd::Zero(7));
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("iteration cap leaves the solve unconverged") {
  const int n = 40;
  const Eigen::MatrixXd A = random_spd(n, 1e-4, 1.0, 7);
  const Eigen::VectorXd b = random_vector(n, 8);
  const auto [x, report] = pcg_solve(matrix_op(A), identity_op(), b, 1e-14, 2);
  CHECK(!report.converged);
  CHECK(report.iterations == 2);
}

TEST_CASE("indefinite operator raises a breakdown error") {
  const Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(pcg_solve(matrix_op(A), identity_op(), b), std::runtime_error);
}

TEST_CASE("energy-norm error tracking against a reference solution") {
  const int n = 25;
  const Eigen::MatrixXd A = random_spd(n, 0.5, 1.0, 9);
  const Eigen::VectorXd b = random_vector(n, 10);
  const Eigen::VectorXd exact = A.ldlt().solve(b);
  const auto [x, report] =
      pcg_solve(matrix_op(A), identity_op(), b, 1e-12, 100, &exact);
  REQUIRE(report.knorm_errors.has_value());
  const auto& err = *report.knorm_errors;
  REQUIRE(static_cast<int>(err.size()) == report.iterations + 1);
  CHECK(err.back() <= 1e-9 * err.front());

  // Spectrum inside [1/2, 1]: condition number at most 2, so the energy-norm
  // error must decay at least as fast as 2 * 3^{-k}.
  CHECK(convergence_bound_check(report));
}

TEST_CASE("convergence bound check rejects a stalled history") {
  SolveReport report;
  report.knorm_errors = std::vector<double>{1.0, 0.3, 0.3, 0.3};
  CHECK(!convergence_bound_check(report));
  report.knorm_errors = std::vector<double>{1.0, 0.5, 0.2, 0.07};
  CHECK(convergence_bound_check(report));
  report.knorm_errors.reset();
  CHECK_THROWS_AS(convergence_bound_check(report), std::logic_error);
}
