#include "pintoc/kkt.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "pintoc/dense.hpp"

using namespace pintoc;

namespace {

ControlProblem make_problem(int N, int m, double gamma, SpaceTimeFunction f,
                            SpaceTimeFunction g, SpatialFunction y0,
                            std::optional<Eigen::VectorXd> mask = {}) {
  ControlProblem prob;
  prob.gamma = gamma;
  prob.T_final = 1.0;
  prob.N = N;
  prob.grid = SpatialGrid(m);
  prob.op = std::make_shared<SpatialOperator>(
      SpatialOperator::constant_coefficient(prob.grid, 1.0));
  prob.f = std::move(f);
  prob.g = std::move(g);
  prob.y0 = std::move(y0);
  prob.mask = std::move(mask);
  return prob;
}

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

Eigen::MatrixXd materialize(const std::function<SpaceTimeVector(const SpaceTimeVector&)>& op,
                            Eigen::Index n) {
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    A.col(j) = op(Eigen::VectorXd::Unit(n, j));
  return A;
}

}  // namespace

TEST_CASE("trapezoidal averaging of constant sources") {
  auto zero3 = [](double, double, double) { return 0.0; };
  auto one3 = [](double, double, double) { return 1.0; };
  const ControlProblem prob =
      make_problem(2, 1, 1.0, zero3, one3, [](double, double) { return 0.0; });
  const DiscreteRhs rhs = assemble_rhs(prob);
  REQUIRE(rhs.g_rhs.size() == 2);
  REQUIRE(rhs.f_rhs.size() == 2);
  // First adjoint block row has a single temporal stencil entry, so block 1
  // carries a single (tau/2)-weighted sample; later blocks get the pair.
  CHECK(rhs.g_rhs[0] == doctest::Approx(0.25));
  CHECK(rhs.g_rhs[1] == doctest::Approx(0.5));
  CHECK(rhs.f_rhs.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("initial-condition correction enters the first source block") {
  auto zero3 = [](double, double, double) { return 0.0; };
  const ControlProblem prob =
      make_problem(2, 1, 1.0, zero3, zero3, [](double, double) { return 1.0; });
  const DiscreteRhs rhs = assemble_rhs(prob);
  // (I - (tau/2) L) y0 with tau = 1/2 and L = [16]: 1 - 4 = -3.
  CHECK(rhs.f_rhs[0] == doctest::Approx(-3.0));
  CHECK(rhs.f_rhs[1] == doctest::Approx(0.0));
}

TEST_CASE("time-dependent target uses interval-midpoint samples") {
  auto zero3 = [](double, double, double) { return 0.0; };
  auto ramp = [](double, double, double t) { return t; };
  const ControlProblem prob =
      make_problem(4, 1, 1.0, zero3, ramp, [](double, double) { return 0.0; });
  const DiscreteRhs rhs = assemble_rhs(prob);
  const double tau = 0.25;
  // Block n pairs the midpoint samples g(t_{n+1/2}) and g(t_{n-1/2}); the
  // first block has a single stencil entry and carries g(t_{3/2}) only.
  CHECK(rhs.g_rhs[0] == doctest::Approx(0.5 * tau * 1.5 * tau));
  for (int n = 2; n <= 4; ++n)
    CHECK(rhs.g_rhs[n - 1] ==
          doctest::Approx(0.5 * tau * ((n + 0.5) * tau + (n - 0.5) * tau)));
}

TEST_CASE("scale_rhs is the identity on the data") {
  auto ramp = [](double x1, double x2, double t) { return x1 + x2 * t; };
  const ControlProblem prob =
      make_problem(3, 3, 0.1, ramp, ramp, [](double, double) { return 0.5; });
  const DiscreteRhs rhs = assemble_rhs(prob);
  const DiscreteRhs scaled = scale_rhs(rhs);
  CHECK((scaled.g_rhs - rhs.g_rhs).norm() == 0.0);
  CHECK((scaled.f_rhs - rhs.f_rhs).norm() == 0.0);
}

TEST_CASE("matrix-free applies agree with dense assemblies") {
  const int N = 4, m = 3;
  const double gamma = 1e-3;
  auto zero3 = [](double, double, double) { return 0.0; };
  const ControlProblem prob =
      make_problem(N, m, gamma, zero3, zero3, [](double, double) { return 0.0; });
  const DenseOperatorSet set = build_dense(N, m, gamma, 0.5);
  const Eigen::Index n = prob.unknowns();

  SUBCASE("forward operator") {
    const Eigen::MatrixXd G =
        materialize([&](const SpaceTimeVector& v) { return apply_G(prob, v); }, n);
    CHECK((G - set.G).cwiseAbs().maxCoeff() < 1e-11 * set.G.cwiseAbs().maxCoeff());
  }
  SUBCASE("transpose operator") {
    const Eigen::MatrixXd Gt =
        materialize([&](const SpaceTimeVector& v) { return apply_Gt(prob, v); }, n);
    CHECK((Gt - set.G.transpose()).cwiseAbs().maxCoeff() <
          1e-11 * set.G.cwiseAbs().maxCoeff());
  }
  SUBCASE("adjoint pairing on random vectors") {
    for (unsigned s = 0; s < 5; ++s) {
      const Eigen::VectorXd x = random_vector(n, 100 + s);
      const Eigen::VectorXd y = random_vector(n, 200 + s);
      CHECK(apply_G(prob, x).dot(y) ==
            doctest::Approx(x.dot(apply_Gt(prob, y))).epsilon(1e-11));
    }
  }
  SUBCASE("reduced system operator") {
    const Eigen::MatrixXd K =
        materialize([&](const SpaceTimeVector& v) { return apply_K(prob, v); }, n);
    CHECK((K - set.K).cwiseAbs().maxCoeff() < 1e-11 * set.K.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("masked reduced system agrees with the dense masked assembly") {
  const int N = 4, m = 3;
  const double gamma = 0.05;
  Eigen::VectorXd mask(9);
  mask << 1, 0, 1, 0, 1, 0, 1, 0, 1;
  auto zero3 = [](double, double, double) { return 0.0; };
  const ControlProblem prob = make_problem(
      N, m, gamma, zero3, zero3, [](double, double) { return 0.0; }, mask);
  const DenseOperatorSet set = build_dense(N, m, gamma, 0.5, mask);
  const Eigen::MatrixXd K = materialize(
      [&](const SpaceTimeVector& v) { return apply_K(prob, v); }, prob.unknowns());
  CHECK((K - set.K).cwiseAbs().maxCoeff() < 1e-11 * set.K.cwiseAbs().maxCoeff());
}

TEST_CASE("Schur right-hand side combines the sources") {
  const int N = 3, m = 3;
  auto f = [](double x1, double x2, double t) { return x1 * x2 + t; };
  auto g = [](double x1, double, double t) { return std::sin(x1) * (1.0 + t); };
  const ControlProblem prob =
      make_problem(N, m, 0.2, f, g, [](double x1, double) { return x1; });
  const DiscreteRhs rhs = assemble_rhs(prob);
  const SpaceTimeVector b = schur_rhs(prob, rhs);
  const SpaceTimeVector expected =
      rhs.f_rhs - apply_G(prob, rhs.g_rhs) / prob.tau();
  CHECK((b - expected).cwiseAbs().maxCoeff() < 1e-13 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("unscale_solution inverts the symmetrizing change of variables") {
  const int N = 5, m = 3;
  auto zero3 = [](double, double, double) { return 0.0; };
  const ControlProblem prob =
      make_problem(N, m, 1.0, zero3, zero3, [](double, double) { return 0.0; });
  const Eigen::Index n = prob.unknowns();
  const int J = prob.grid.J;

  Eigen::MatrixXd B2 = Eigen::MatrixXd::Identity(N, N);
  for (int i = 1; i < N; ++i) B2(i, i - 1) = 1.0;
  const Eigen::MatrixXd Ij = Eigen::MatrixXd::Identity(J, J);
  const Eigen::MatrixXd B2I = kron(B2, Ij);

  const Eigen::VectorXd y_t = random_vector(n, 42);
  const Eigen::VectorXd p_t = random_vector(n, 43);
  const auto [y, p] = unscale_solution(prob, y_t, p_t);
  CHECK((B2I * y - y_t).cwiseAbs().maxCoeff() < 1e-12 * y_t.cwiseAbs().maxCoeff());
  CHECK((B2I.transpose() * p - p_t).cwiseAbs().maxCoeff() <
        1e-12 * p_t.cwiseAbs().maxCoeff());
}

TEST_CASE("full pipeline solves the globally controlled benchmark exactly in the discrete sense") {
  // Dense solve of the reduced system, then state/adjoint recovery: the
  // recovered triple must satisfy the first-order optimality system.
  const int N = 4, m = 3;
  const double gamma = 1e-2;
  const ControlProblem prob = example1(N, m, gamma);
  const DiscreteRhs rhs = assemble_rhs(prob);
  const SpaceTimeVector b = schur_rhs(prob, rhs);
  const Eigen::Index n = prob.unknowns();
  const Eigen::MatrixXd K = materialize(
      [&](const SpaceTimeVector& v) { return apply_K(prob, v); }, n);
  const SpaceTimeVector v = K.ldlt().solve(b);
  CHECK((K * v - b).norm() <= 1e-10 * b.norm());

  const Solution sol = recover_solution(prob, v, rhs);
  REQUIRE(sol.y.size() == n);
  REQUIRE(sol.p.size() == n);
  REQUIRE(sol.u.size() == n);
  CHECK((sol.u - sol.p / gamma).cwiseAbs().maxCoeff() <=
        1e-12 * sol.p.cwiseAbs().maxCoeff());

  // State equation: B1 (x) I y + (tau/2) B2 (x) L y = g-average sources + u terms.
  // Check it through the original unsymmetrized blocks assembled densely.
  const int J = prob.grid.J;
  Eigen::MatrixXd B1 = Eigen::MatrixXd::Identity(N, N);
  Eigen::MatrixXd B2 = Eigen::MatrixXd::Identity(N, N);
  for (int i = 1; i < N; ++i) {
    B1(i, i - 1) = -1.0;
    B2(i, i - 1) = 1.0;
  }
  const Eigen::MatrixXd Ij = Eigen::MatrixXd::Identity(J, J);
  const Eigen::MatrixXd L = prob.op->dense();
  const double tau = prob.tau();
  const Eigen::MatrixXd A1 = kron(B1, Ij) + 0.5 * tau * kron(B2, L);

  // Forward equation with the recovered control:
  //   A1 y - (tau/2) B2^T (x) I u = f_rhs.
  const Eigen::VectorXd state_res =
      A1 * sol.y - 0.5 * tau * kron(B2.transpose(), Ij) * sol.u - rhs.f_rhs;
  const double scale = std::max(1.0, rhs.f_rhs.cwiseAbs().maxCoeff());
  CHECK(state_res.cwiseAbs().maxCoeff() <= 1e-9 * scale);

  // Adjoint equation: A1^T p + (tau/2) B2 (x) I y = g_rhs.
  const Eigen::VectorXd adj_res =
      A1.transpose() * sol.p + 0.5 * tau * kron(B2, Ij) * sol.y - rhs.g_rhs;
  CHECK(adj_res.cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, rhs.g_rhs.cwiseAbs().maxCoeff()));
}

TEST_CASE("masked recovery zeroes the control outside the control region") {
  const int N = 3, m = 3;
  const double gamma = 0.5;
  Eigen::VectorXd mask(9);
  mask << 1, 1, 0, 1, 0, 0, 1, 1, 1;
  auto f = [](double, double, double t) { return t; };
  auto g = [](double x1, double, double) { return x1; };
  const ControlProblem prob =
      make_problem(N, m, gamma, f, g, [](double, double) { return 0.0; }, mask);
  const DiscreteRhs rhs = assemble_rhs(prob);
  const SpaceTimeVector b = schur_rhs(prob, rhs);
  const Eigen::MatrixXd K = materialize(
      [&](const SpaceTimeVector& v) { return apply_K(prob, v); }, prob.unknowns());
  const Solution sol = recover_solution(prob, K.ldlt().solve(b), rhs);
  for (int blk = 0; blk < N; ++blk)
    for (int j = 0; j < 9; ++j)
      if (mask[j] == 0.0) CHECK(sol.u[blk * 9 + j] == 0.0);
}

TEST_CASE("error measure vanishes when the reference is reproduced") {
  const ControlProblem prob = example1(2, 3, 1.0);
  const Eigen::Index n = prob.unknowns();
  SpaceTimeVector y(n), p = SpaceTimeVector::Zero(n);
  const double tau = prob.tau();
  for (int blk = 1; blk <= prob.N; ++blk)
    for (int jy = 1; jy <= 3; ++jy)
      for (int jx = 1; jx <= 3; ++jx)
        y[(blk - 1) * 9 + (jy - 1) * 3 + (jx - 1)] =
            std::sin(M_PI * jx * prob.grid.h) * std::sin(M_PI * jy * prob.grid.h) *
            std::exp(-blk * tau);
  CHECK(error_measure(y, p, prob) <= 1e-14);
  p[0] = 0.125;
  CHECK(error_measure(y, p, prob) == doctest::Approx(0.125));
}

TEST_CASE("discretization error of the benchmark shrinks under refinement") {
  // At small regularization the recovered state tracks the midpoint-sampled
  // target, so the error is cleanly first order in the time step.
  auto solve_error = [](int N, int m) {
    const ControlProblem prob = example1(N, m, 1e-7);
    const DiscreteRhs rhs = assemble_rhs(prob);
    const SpaceTimeVector b = schur_rhs(prob, rhs);
    const Eigen::MatrixXd K = materialize(
        [&](const SpaceTimeVector& v) { return apply_K(prob, v); }, prob.unknowns());
    const Solution sol = recover_solution(prob, K.ldlt().solve(b), rhs);
    return error_measure(sol.y, sol.p, prob);
  };
  const double coarse = solve_error(8, 7);
  const double fine = solve_error(16, 15);
  CHECK(fine < 0.7 * coarse);
  CHECK(coarse < 0.1);
}

TEST_CASE("locally controlled benchmark mask") {
  const ControlProblem prob = example2(4, 31, 1e-3);
  REQUIRE(prob.mask.has_value());
  const Eigen::VectorXd& mask = *prob.mask;
  REQUIRE(mask.size() == 961);
  int zeros = 0;
  for (Eigen::Index j = 0; j < mask.size(); ++j) {
    CHECK((mask[j] == 0.0 || mask[j] == 1.0));
    if (mask[j] == 0.0) ++zeros;
  }
  CHECK(zeros == 225);

  // The excluded points are exactly those with both coordinates below 1/2.
  const double h = prob.grid.h;
  for (int jy = 1; jy <= 31; ++jy)
    for (int jx = 1; jx <= 31; ++jx) {
      const bool inside = jx * h >= 0.5 || jy * h >= 0.5;
      CHECK(mask[(jy - 1) * 31 + (jx - 1)] == (inside ? 1.0 : 0.0));
    }
}

TEST_CASE("benchmark problems carry consistent metadata") {
  const ControlProblem p1 = example1(10, 7, 1e-4);
  CHECK(p1.tau() == doctest::Approx(0.1));
  CHECK(p1.eta() == doctest::Approx(1e-3));
  CHECK(p1.unknowns() == 490);
  CHECK(p1.reference_y.has_value());
  CHECK(p1.reference_u.has_value());
  CHECK((*p1.reference_u)(0.3, 0.7, 0.5) == 0.0);
  CHECK((*p1.reference_y)(0.5, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK(!p1.mask.has_value());
}
