#include "pintoc/kkt.hpp"

#include <cmath>
#include <stdexcept>

namespace pintoc {

namespace {

Eigen::VectorXd sample_spatial(const SpatialGrid& grid,
                               const std::function<double(double, double)>& fn) {
  Eigen::VectorXd v(grid.J);
  for (int j = 1; j <= grid.m; ++j)
    for (int i = 1; i <= grid.m; ++i)
      v[(j - 1) * grid.m + (i - 1)] = fn(i * grid.h, j * grid.h);
  return v;
}

Eigen::VectorXd sample_at_time(const SpatialGrid& grid, const SpaceTimeFunction& fn,
                               double t) {
  return sample_spatial(grid, [&](double x1, double x2) { return fn(x1, x2, t); });
}

void check_length(const ControlProblem& prob, const SpaceTimeVector& v,
                  const char* what) {
  if (v.size() != prob.unknowns())
    throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

DiscreteRhs assemble_rhs(const ControlProblem& prob) {
  const int N = prob.N;
  const int J = prob.grid.J;
  const double tau = prob.tau();
  DiscreteRhs rhs;
  rhs.g_rhs.resize(prob.unknowns());
  rhs.f_rhs.resize(prob.unknowns());

  // Source side: nodal trapezoidal averages (tau/2)(f_n + f_{n-1}).
  // Target side: the adjoint block rows carry midpoint samples
  // ghat_n = g(t_{n+1/2}) combined with the same bidiagonal weighting,
  // (tau/2)(ghat_n + ghat_{n-1}) with a single sample in the first row.
  // The first rows of both stencils have a single temporal entry, so no
  // t_0 data enters; that would leave an O(1) alternating artifact in the
  // recovered state as gamma -> 0.
  Eigen::VectorXd f_prev = sample_at_time(prob.grid, prob.f, 0.0);
  Eigen::VectorXd g_prev;  // empty until n = 2
  for (int n = 1; n <= N; ++n) {
    Eigen::VectorXd f_cur = sample_at_time(prob.grid, prob.f, n * tau);
    Eigen::VectorXd g_cur = sample_at_time(prob.grid, prob.g, (n + 0.5) * tau);
    rhs.f_rhs.segment(static_cast<Eigen::Index>(n - 1) * J, J) =
        0.5 * tau * (f_cur + f_prev);
    rhs.g_rhs.segment(static_cast<Eigen::Index>(n - 1) * J, J) =
        n == 1 ? Eigen::VectorXd(0.5 * tau * g_cur)
               : Eigen::VectorXd(0.5 * tau * (g_cur + g_prev));
    f_prev = std::move(f_cur);
    g_prev = std::move(g_cur);
  }

  const Eigen::VectorXd y0 = sample_spatial(prob.grid, prob.y0);
  rhs.f_rhs.head(J) += y0 - 0.5 * tau * prob.op->apply(y0);
  return rhs;
}

DiscreteRhs scale_rhs(const DiscreteRhs& rhs) { return rhs; }

std::pair<SpaceTimeVector, SpaceTimeVector> unscale_solution(
    const ControlProblem& prob, const SpaceTimeVector& y_tilde,
    const SpaceTimeVector& p_tilde) {
  check_length(prob, y_tilde, "unscale_solution");
  check_length(prob, p_tilde, "unscale_solution");
  const TemporalSymbol s = b2_inverse_symbol(prob.N);
  SpaceTimeVector y = apply_lower_toeplitz(s, y_tilde, prob.grid.J);
  SpaceTimeVector p = apply_upper_toeplitz(s, p_tilde, prob.grid.J);
  return {std::move(y), std::move(p)};
}

namespace {

SpaceTimeVector apply_G_impl(const ControlProblem& prob, const SpaceTimeVector& v,
                             bool transpose) {
  const int N = prob.N;
  const int J = prob.grid.J;
  const double tau = prob.tau();
  const TemporalSymbol q = b_symbol(N);
  SpaceTimeVector out = transpose ? apply_upper_toeplitz(q, v, J)
                                  : apply_lower_toeplitz(q, v, J);
  out *= 2.0;
#pragma omp parallel for
  for (int n = 0; n < N; ++n) {
    const Eigen::Index off = static_cast<Eigen::Index>(n) * J;
    out.segment(off, J) += tau * prob.op->apply(Eigen::VectorXd(v.segment(off, J)));
  }
  return out;
}

}  // namespace

SpaceTimeVector apply_G(const ControlProblem& prob, const SpaceTimeVector& v) {
  check_length(prob, v, "apply_G");
  return apply_G_impl(prob, v, false);
}

SpaceTimeVector apply_Gt(const ControlProblem& prob, const SpaceTimeVector& v) {
  check_length(prob, v, "apply_Gt");
  return apply_G_impl(prob, v, true);
}

SpaceTimeVector apply_K(const ControlProblem& prob, const SpaceTimeVector& v) {
  check_length(prob, v, "apply_K");
  const double tau = prob.tau();
  SpaceTimeVector out = prob.eta() * apply_G(prob, apply_Gt(prob, v));
  if (prob.mask) {
    const int J = prob.grid.J;
    for (int n = 0; n < prob.N; ++n)
      out.segment(static_cast<Eigen::Index>(n) * J, J) +=
          tau * prob.mask->cwiseProduct(v.segment(static_cast<Eigen::Index>(n) * J, J));
  } else {
    out += tau * v;
  }
  return out;
}

SpaceTimeVector schur_rhs(const ControlProblem& prob, const DiscreteRhs& rhs) {
  return rhs.f_rhs - (1.0 / prob.tau()) * apply_G(prob, rhs.g_rhs);
}

Solution recover_solution(const ControlProblem& prob, const SpaceTimeVector& v,
                          const DiscreteRhs& rhs) {
  check_length(prob, v, "recover_solution");
  const double tau = prob.tau();
  const double gamma = prob.gamma;
  SpaceTimeVector p_tilde = -2.0 * gamma * v;
  SpaceTimeVector y_tilde =
      (2.0 / tau) * rhs.g_rhs + (2.0 * gamma / tau) * apply_Gt(prob, v);
  auto [y, p] = unscale_solution(prob, y_tilde, p_tilde);
  Solution sol;
  sol.u = p / gamma;
  if (prob.mask) {
    const int J = prob.grid.J;
    for (int n = 0; n < prob.N; ++n)
      sol.u.segment(static_cast<Eigen::Index>(n) * J, J) =
          prob.mask->cwiseProduct(sol.u.segment(static_cast<Eigen::Index>(n) * J, J));
  }
  sol.y = std::move(y);
  sol.p = std::move(p);
  return sol;
}

double error_measure(const SpaceTimeVector& y, const SpaceTimeVector& p,
                     const ControlProblem& prob) {
  if (!prob.reference_y || !prob.reference_u)
    throw std::logic_error("error_measure: problem has no analytical reference");
  const int J = prob.grid.J;
  const double tau = prob.tau();
  double err = 0.0;
  for (int n = 1; n <= prob.N; ++n) {
    const double t = n * tau;
    const Eigen::VectorXd y_ref = sample_at_time(prob.grid, *prob.reference_y, t);
    const Eigen::VectorXd p_ref =
        prob.gamma * sample_at_time(prob.grid, *prob.reference_u, t);
    const Eigen::Index off = static_cast<Eigen::Index>(n - 1) * J;
    err = std::max(err, (y.segment(off, J) - y_ref).cwiseAbs().maxCoeff());
    err = std::max(err, (p.segment(off, J) - p_ref).cwiseAbs().maxCoeff());
  }
  return err;
}

namespace {

ControlProblem make_benchmark(int N, int m, double gamma, SpatialSolver solver) {
  ControlProblem prob;
  prob.gamma = gamma;
  prob.T_final = 1.0;
  prob.N = N;
  prob.grid = SpatialGrid(m);
  if (solver == SpatialSolver::Sine) {
    prob.op = std::make_shared<SpatialOperator>(
        SpatialOperator::constant_coefficient(prob.grid, 1.0));
  } else {
    prob.op = std::make_shared<SpatialOperator>(
        SpatialOperator::variable_coefficient(prob.grid, [](double, double) { return 1.0; }));
  }
  auto wave = [](double x1, double x2, double t) {
    return std::sin(M_PI * x1) * std::sin(M_PI * x2) * std::exp(-t);
  };
  prob.g = wave;
  prob.f = [wave](double x1, double x2, double t) {
    return (2.0 * M_PI * M_PI - 1.0) * wave(x1, x2, t);
  };
  prob.y0 = [wave](double x1, double x2) { return wave(x1, x2, 0.0); };
  prob.reference_y = wave;
  prob.reference_u = [](double, double, double) { return 0.0; };
  return prob;
}

}  // namespace

ControlProblem example1(int N, int m, double gamma, SpatialSolver solver) {
  return make_benchmark(N, m, gamma, solver);
}

ControlProblem example2(int N, int m, double gamma, SpatialSolver solver) {
  ControlProblem prob = make_benchmark(N, m, gamma, solver);
  Eigen::VectorXd mask(prob.grid.J);
  for (int j = 1; j <= m; ++j)
    for (int i = 1; i <= m; ++i)
      mask[(j - 1) * m + (i - 1)] =
          (i * prob.grid.h >= 0.5 || j * prob.grid.h >= 0.5) ? 1.0 : 0.0;
  prob.mask = std::move(mask);
  return prob;
}

}  // namespace pintoc
