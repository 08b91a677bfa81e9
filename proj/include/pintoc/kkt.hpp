#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>

#include "pintoc/spatial.hpp"
#include "pintoc/temporal.hpp"

namespace pintoc {

/// Length N*J space-time vectors are stored time-major: entry (n-1)*J + j
/// holds the value at time node t_n = n*tau and spatial index j.
using SpaceTimeVector = Eigen::VectorXd;

using SpaceTimeFunction = std::function<double(double, double, double)>;  // (x1, x2, t)
using SpatialFunction = std::function<double(double, double)>;

/// Discrete optimal-control problem: tracking weight gamma, horizon T_final,
/// N time points, spatial operator, sources, initial state, optional control
/// mask and analytical reference.
struct ControlProblem {
  double gamma = 0.0;
  double T_final = 0.0;
  int N = 0;
  SpatialGrid grid{1};
  std::shared_ptr<const SpatialOperator> op;
  SpaceTimeFunction f;
  SpaceTimeFunction g;
  SpatialFunction y0;
  std::optional<Eigen::VectorXd> mask;            // {0,1}-valued, length J
  std::optional<SpaceTimeFunction> reference_y;
  std::optional<SpaceTimeFunction> reference_u;

  double tau() const { return T_final / N; }
  double eta() const { return gamma / tau(); }
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(N) * grid.J; }
};

struct DiscreteRhs {
  SpaceTimeVector g_rhs;
  SpaceTimeVector f_rhs;
};

struct Solution {
  SpaceTimeVector y;
  SpaceTimeVector p;
  SpaceTimeVector u;
};

/// Time discretization of the data: nodal trapezoidal averages of the
/// source f, interval-midpoint samples of the target g combined with the
/// same bidiagonal weighting, and the initial-condition correction
/// (I - (tau/2) L_h) y0 added to the first f block.
DiscreteRhs assemble_rhs(const ControlProblem& prob);

/// The symmetrized system keeps the original right-hand side; identity on
/// the data (the unknowns change to the scaled pair).
DiscreteRhs scale_rhs(const DiscreteRhs& rhs);

/// y = (B2^{-1} (x) I) y_tilde, p = (B2^{-T} (x) I) p_tilde.
std::pair<SpaceTimeVector, SpaceTimeVector> unscale_solution(
    const ControlProblem& prob, const SpaceTimeVector& y_tilde,
    const SpaceTimeVector& p_tilde);

/// G = 2 B (x) I_J + tau I_N (x) L_h and its transpose.
SpaceTimeVector apply_G(const ControlProblem& prob, const SpaceTimeVector& v);
SpaceTimeVector apply_Gt(const ControlProblem& prob, const SpaceTimeVector& v);

/// K = tau (I_N (x) M) + eta G G^T with M the identity or the control mask.
SpaceTimeVector apply_K(const ControlProblem& prob, const SpaceTimeVector& v);

/// Right-hand side of the Schur system K v = b:  b = f_rhs - (1/tau) G g_rhs.
SpaceTimeVector schur_rhs(const ControlProblem& prob, const DiscreteRhs& rhs);

/// Recover (y, p, u) from the Schur solution v:
/// p_tilde = -2 gamma v, y_tilde = (2/tau) g_rhs + (2 gamma / tau) G^T v,
/// unscale, u = p / gamma (masked componentwise when a mask is set).
Solution recover_solution(const ControlProblem& prob, const SpaceTimeVector& v,
                          const DiscreteRhs& rhs);

/// Infinity norm of [p; y] minus the sampled analytical reference.
double error_measure(const SpaceTimeVector& y, const SpaceTimeVector& p,
                     const ControlProblem& prob);

enum class SpatialSolver { Sine, Multigrid };

/// Globally controlled benchmark problem on the unit square: a == 1, T = 1,
/// g = sin(pi x1) sin(pi x2) e^{-t}, y0 = g(., 0), reference y = g, u == 0.
ControlProblem example1(int N, int m, double gamma,
                        SpatialSolver solver = SpatialSolver::Sine);

/// Locally controlled variant: same data, control mask equal to 1 exactly at
/// grid points with x1 >= 0.5 or x2 >= 0.5.
ControlProblem example2(int N, int m, double gamma,
                        SpatialSolver solver = SpatialSolver::Sine);

}  // namespace pintoc
