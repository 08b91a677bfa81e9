#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "pintoc/fft.hpp"

namespace pintoc {

/// Uniform grid of interior points on the unit square, x1-fastest ordering:
/// grid point (i, j) -> linear index (j-1)*m + (i-1), i, j = 1..m.
struct SpatialGrid {
  int m = 0;
  double h = 0.0;
  int J = 0;

  explicit SpatialGrid(int m_);
};

/// Central-difference discretization L_h of -div(a(x) grad .) on the unit
/// square with homogeneous Dirichlet conditions, plus solvers for
/// complex-shifted systems (sigma I + scale L_h) x = r.
///
/// Constant coefficients use the exact fast-sine-transform solve; variable
/// coefficients use a complex-capable geometric multigrid V-cycle.
/// Immutable after assembly; solves on distinct right-hand sides may run
/// concurrently.
class SpatialOperator {
public:
  enum class Mode { Sine, Stencil };

  static SpatialOperator constant_coefficient(const SpatialGrid& grid, double a);
  static SpatialOperator variable_coefficient(
      const SpatialGrid& grid, const std::function<double(double, double)>& a);

  const SpatialGrid& grid() const { return grid_; }
  Mode mode() const { return mode_; }
  bool multigrid_available() const { return levels_.size() > 1 || grid_.m <= 3; }

  /// Eigenvalues of L_h in sine mode, index (q-1)*m + (p-1):
  /// (4a/h^2) (sin^2(p pi h / 2) + sin^2(q pi h / 2)).
  const Eigen::VectorXd& eigenvalues() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;

  /// Solve (sigma I + scale L_h) x = r.  Sine mode: exact via two 2-D fast
  /// sine transforms.  Stencil mode: `cycles` V-cycle iterations from a zero
  /// initial guess (approximate solve).
  Eigen::VectorXcd shifted_solve(std::complex<double> sigma, double scale,
                                 const Eigen::VectorXcd& r, int cycles = 1) const;

  /// Real-shift, real-data variant (half the transform work in sine mode).
  Eigen::VectorXd shifted_solve(double sigma, double scale,
                                const Eigen::VectorXd& r, int cycles = 1) const;

  /// V-cycle iteration until the relative residual drops below rel_tol.
  Eigen::VectorXcd iterative_solve(std::complex<double> sigma, double scale,
                                   const Eigen::VectorXcd& r, double rel_tol,
                                   int max_cycles = 200) const;

  /// One V(2,2)-cycle for (sigma I + scale L_h), damped Jacobi smoothing
  /// (damping 4/5), full-weighting restriction, bilinear prolongation,
  /// dense solve on the coarsest level.  Requires m = 2^l - 1.
  Eigen::VectorXcd vcycle(std::complex<double> sigma, double scale,
                          const Eigen::VectorXcd& r, const Eigen::VectorXcd& x0) const;

  /// Dense J x J matrix of L_h (testing / verification).
  Eigen::MatrixXd dense() const;

private:
  struct Level {
    int m = 0;
    double h = 0.0;
    // Neighbor coefficients divided by h^2; zero where the neighbor is a
    // Dirichlet ghost.  diag absorbs all four flux terms.
    Eigen::VectorXd west, east, south, north, diag;
  };

  SpatialOperator(const SpatialGrid& grid, Mode mode,
                  std::function<double(double, double)> a);

  static Level assemble_level(int m, const std::function<double(double, double)>& a);
  Eigen::VectorXcd apply_level(const Level& lev, std::complex<double> sigma,
                               double scale, const Eigen::VectorXcd& u) const;
  Eigen::VectorXcd vcycle_level(std::size_t l, std::complex<double> sigma, double scale,
                                const Eigen::VectorXcd& r, const Eigen::VectorXcd& x0) const;

  SpatialGrid grid_;
  Mode mode_;
  std::function<double(double, double)> coeff_;
  Eigen::VectorXd eigs_;                 // sine mode only
  std::shared_ptr<const Dst2D> dst_;     // sine mode only
  std::vector<Level> levels_;            // levels_[0] is the fine grid

  friend class FixedShiftSolver;
};

/// Factorization of (sigma I + scale L_h) at one fixed real shift for a
/// constant-coefficient (sine mode) operator.  The x direction is
/// diagonalized by a batched 1-D sine transform; for each x frequency the
/// y direction is then a constant tridiagonal system, factored here once.
///
/// Callers move a length-J block into the x-transformed basis with
/// to_x_basis, apply any number of solve_in_x_basis calls, and convert back
/// with from_x_basis.  Couplings that are scalar multiples of the identity
/// commute with the basis change, so block-triangular substitutions can run
/// entirely in the transformed basis with a single transform pair per block.
class FixedShiftSolver {
public:
  FixedShiftSolver(const SpatialOperator& op, double sigma, double scale);

  void to_x_basis(double* block) const;        // in place, length J
  void from_x_basis(double* block) const;      // inverse of to_x_basis
  void solve_in_x_basis(double* block) const;  // tridiagonal solves along y

private:
  int m_ = 0;
  double inv_norm_ = 0.0;
  double offdiag_ = 0.0;
  std::shared_ptr<const Dst1DBatch> dstx_;
  // Thomas coefficients, row = y index, column = x frequency.
  Eigen::ArrayXXd inv_denom_, upper_;
};

}  // namespace pintoc
