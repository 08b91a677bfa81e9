#include "pintoc/spatial.hpp"

#include <cmath>
#include <stdexcept>

namespace pintoc {

namespace {

bool is_pow2_minus_1(int m) { return m >= 1 && ((m + 1) & m) == 0; }

constexpr double kJacobiDamping = 0.8;
constexpr int kPreSmooth = 2;
constexpr int kPostSmooth = 2;

}  // namespace

SpatialGrid::SpatialGrid(int m_) : m(m_), h(1.0 / (m_ + 1.0)), J(m_ * m_) {
  if (m_ < 1) throw std::invalid_argument("SpatialGrid: m must be >= 1");
}

SpatialOperator::Level SpatialOperator::assemble_level(
    int m, const std::function<double(double, double)>& a) {
  Level lev;
  lev.m = m;
  lev.h = 1.0 / (m + 1.0);
  const int J = m * m;
  lev.west.resize(J);
  lev.east.resize(J);
  lev.south.resize(J);
  lev.north.resize(J);
  lev.diag.resize(J);
  const double h = lev.h;
  const double h2inv = 1.0 / (h * h);
  for (int j = 1; j <= m; ++j) {
    for (int i = 1; i <= m; ++i) {
      const int idx = (j - 1) * m + (i - 1);
      const double x1 = i * h, x2 = j * h;
      const double aw = a(x1 - 0.5 * h, x2);
      const double ae = a(x1 + 0.5 * h, x2);
      const double as = a(x1, x2 - 0.5 * h);
      const double an = a(x1, x2 + 0.5 * h);
      if (!(aw > 0.0) || !(ae > 0.0) || !(as > 0.0) || !(an > 0.0))
        throw std::invalid_argument("SpatialOperator: coefficient must be positive");
      lev.diag[idx] = (aw + ae + as + an) * h2inv;
      lev.west[idx] = (i > 1) ? aw * h2inv : 0.0;
      lev.east[idx] = (i < m) ? ae * h2inv : 0.0;
      lev.south[idx] = (j > 1) ? as * h2inv : 0.0;
      lev.north[idx] = (j < m) ? an * h2inv : 0.0;
    }
  }
  return lev;
}

SpatialOperator::SpatialOperator(const SpatialGrid& grid, Mode mode,
                                 std::function<double(double, double)> a)
    : grid_(grid), mode_(mode), coeff_(std::move(a)) {
  levels_.push_back(assemble_level(grid_.m, coeff_));
  if (is_pow2_minus_1(grid_.m)) {
    int m = grid_.m;
    while (m > 3) {
      m = (m - 1) / 2;
      levels_.push_back(assemble_level(m, coeff_));
    }
  }
}

SpatialOperator SpatialOperator::constant_coefficient(const SpatialGrid& grid, double a) {
  if (!(a > 0.0))
    throw std::invalid_argument("SpatialOperator: coefficient must be positive");
  SpatialOperator op(grid, Mode::Sine, [a](double, double) { return a; });
  const int m = grid.m;
  const double h = grid.h;
  op.eigs_.resize(grid.J);
  for (int q = 1; q <= m; ++q) {
    const double sq = std::sin(0.5 * M_PI * q * h);
    for (int p = 1; p <= m; ++p) {
      const double sp = std::sin(0.5 * M_PI * p * h);
      op.eigs_[(q - 1) * m + (p - 1)] = 4.0 * a / (h * h) * (sp * sp + sq * sq);
    }
  }
  op.dst_ = std::make_shared<Dst2D>(m);
  return op;
}

SpatialOperator SpatialOperator::variable_coefficient(
    const SpatialGrid& grid, const std::function<double(double, double)>& a) {
  return SpatialOperator(grid, Mode::Stencil, a);
}

const Eigen::VectorXd& SpatialOperator::eigenvalues() const {
  if (mode_ != Mode::Sine)
    throw std::logic_error("SpatialOperator: eigenvalues only available in sine mode");
  return eigs_;
}

FixedShiftSolver::FixedShiftSolver(const SpatialOperator& op, double sigma,
                                   double scale)
    : m_(op.grid().m) {
  if (op.mode() != SpatialOperator::Mode::Sine)
    throw std::logic_error("FixedShiftSolver: requires a constant-coefficient operator");
  if (!(sigma > 0.0) || !(scale >= 0.0))
    throw std::invalid_argument("FixedShiftSolver: requires sigma > 0 and scale >= 0");
  const double h = op.grid().h;
  const double ah2 = op.coeff_(0.5, 0.5) / (h * h);
  offdiag_ = -scale * ah2;
  dstx_ = std::make_shared<Dst1DBatch>(m_);
  inv_norm_ = 1.0 / dstx_->normalization();

  // After the x transform the block decouples into one SPD tridiagonal
  // system per x frequency p: diagonal sigma + scale*(lambda_p + 2a/h^2),
  // off-diagonal -scale*a/h^2.  Thomas-factor all of them at once.
  Eigen::Array<double, 1, Eigen::Dynamic> d(m_);
  for (int p = 1; p <= m_; ++p) {
    const double sp = std::sin(0.5 * M_PI * p * h);
    d[p - 1] = sigma + scale * ah2 * (4.0 * sp * sp + 2.0);
  }
  inv_denom_.resize(m_, m_);
  upper_.resize(m_, m_);
  inv_denom_.row(0) = 1.0 / d;
  upper_.row(0) = offdiag_ * inv_denom_.row(0);
  for (int j = 1; j < m_; ++j) {
    inv_denom_.row(j) = 1.0 / (d - offdiag_ * upper_.row(j - 1));
    upper_.row(j) = offdiag_ * inv_denom_.row(j);
  }
}

void FixedShiftSolver::to_x_basis(double* block) const { dstx_->transform(block); }

void FixedShiftSolver::from_x_basis(double* block) const {
  dstx_->transform(block);
  Eigen::Map<Eigen::ArrayXd>(block, static_cast<Eigen::Index>(m_) * m_) *= inv_norm_;
}

void FixedShiftSolver::solve_in_x_basis(double* block) const {
  using RowMap = Eigen::Map<Eigen::Array<double, 1, Eigen::Dynamic>>;
  RowMap(block, m_) *= inv_denom_.row(0);
  for (int j = 1; j < m_; ++j) {
    RowMap vj(block + static_cast<std::ptrdiff_t>(j) * m_, m_);
    const RowMap vprev(block + static_cast<std::ptrdiff_t>(j - 1) * m_, m_);
    vj = (vj - offdiag_ * vprev) * inv_denom_.row(j);
  }
  for (int j = m_ - 2; j >= 0; --j) {
    RowMap vj(block + static_cast<std::ptrdiff_t>(j) * m_, m_);
    const RowMap vnext(block + static_cast<std::ptrdiff_t>(j + 1) * m_, m_);
    vj -= upper_.row(j) * vnext;
  }
}

Eigen::VectorXcd SpatialOperator::apply_level(const Level& lev, std::complex<double> sigma,
                                              double scale, const Eigen::VectorXcd& u) const {
  const int m = lev.m;
  Eigen::VectorXcd out(u.size());
  for (int idx = 0; idx < m * m; ++idx) {
    std::complex<double> v = (sigma + scale * lev.diag[idx]) * u[idx];
    if (lev.west[idx] != 0.0) v -= scale * lev.west[idx] * u[idx - 1];
    if (lev.east[idx] != 0.0) v -= scale * lev.east[idx] * u[idx + 1];
    if (lev.south[idx] != 0.0) v -= scale * lev.south[idx] * u[idx - m];
    if (lev.north[idx] != 0.0) v -= scale * lev.north[idx] * u[idx + m];
    out[idx] = v;
  }
  return out;
}

Eigen::VectorXd SpatialOperator::apply(const Eigen::VectorXd& u) const {
  if (u.size() != grid_.J)
    throw std::invalid_argument("SpatialOperator::apply: length mismatch");
  return apply_level(levels_[0], 0.0, 1.0, u.cast<std::complex<double>>()).real();
}

Eigen::VectorXcd SpatialOperator::apply(const Eigen::VectorXcd& u) const {
  if (u.size() != grid_.J)
    throw std::invalid_argument("SpatialOperator::apply: length mismatch");
  return apply_level(levels_[0], 0.0, 1.0, u);
}

Eigen::VectorXcd SpatialOperator::shifted_solve(std::complex<double> sigma, double scale,
                                                const Eigen::VectorXcd& r, int cycles) const {
  if (r.size() != grid_.J)
    throw std::invalid_argument("shifted_solve: length mismatch");
  if (!(scale >= 0.0)) throw std::invalid_argument("shifted_solve: scale must be >= 0");

  if (mode_ == Mode::Sine) {
    const int J = grid_.J;
    Eigen::VectorXd re = r.real(), im = r.imag();
    dst_->transform(re.data());
    dst_->transform(im.data());
    const double norm = dst_->normalization();
    for (int k = 0; k < J; ++k) {
      const std::complex<double> den = sigma + scale * eigs_[k];
      if (std::abs(den) < 1e-300)
        throw std::runtime_error("shifted_solve: singular shift");
      const std::complex<double> v = std::complex<double>(re[k], im[k]) / den;
      re[k] = v.real();
      im[k] = v.imag();
    }
    dst_->transform(re.data());
    dst_->transform(im.data());
    Eigen::VectorXcd x(J);
    for (int k = 0; k < J; ++k) x[k] = std::complex<double>(re[k], im[k]) / norm;
    return x;
  }

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(grid_.J);
  for (int c = 0; c < cycles; ++c) x = vcycle(sigma, scale, r, x);
  return x;
}

Eigen::VectorXd SpatialOperator::shifted_solve(double sigma, double scale,
                                               const Eigen::VectorXd& r, int cycles) const {
  if (r.size() != grid_.J)
    throw std::invalid_argument("shifted_solve: length mismatch");
  if (mode_ == Mode::Sine) {
    Eigen::VectorXd x = r;
    dst_->transform(x.data());
    for (int k = 0; k < grid_.J; ++k) {
      const double den = sigma + scale * eigs_[k];
      if (std::abs(den) < 1e-300)
        throw std::runtime_error("shifted_solve: singular shift");
      x[k] /= den;
    }
    dst_->transform(x.data());
    return x / dst_->normalization();
  }
  return shifted_solve(std::complex<double>(sigma), scale,
                       r.cast<std::complex<double>>(), cycles)
      .real();
}

Eigen::VectorXcd SpatialOperator::iterative_solve(std::complex<double> sigma, double scale,
                                                  const Eigen::VectorXcd& r, double rel_tol,
                                                  int max_cycles) const {
  if (mode_ == Mode::Sine) return shifted_solve(sigma, scale, r);
  const double rnorm = r.norm();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(grid_.J);
  if (rnorm == 0.0) return x;
  for (int c = 0; c < max_cycles; ++c) {
    x = vcycle(sigma, scale, r, x);
    const double res = (r - apply_level(levels_[0], sigma, scale, x)).norm();
    if (res <= rel_tol * rnorm) return x;
  }
  throw std::runtime_error("iterative_solve: multigrid failed to reach tolerance");
}

Eigen::VectorXcd SpatialOperator::vcycle(std::complex<double> sigma, double scale,
                                         const Eigen::VectorXcd& r,
                                         const Eigen::VectorXcd& x0) const {
  if (!is_pow2_minus_1(grid_.m))
    throw std::invalid_argument("vcycle: grid size must be 2^l - 1");
  if (r.size() != grid_.J || x0.size() != grid_.J)
    throw std::invalid_argument("vcycle: length mismatch");
  return vcycle_level(0, sigma, scale, r, x0);
}

Eigen::VectorXcd SpatialOperator::vcycle_level(std::size_t l, std::complex<double> sigma,
                                               double scale, const Eigen::VectorXcd& r,
                                               const Eigen::VectorXcd& x0) const {
  const Level& lev = levels_[l];
  const int m = lev.m;

  if (m <= 3) {
    // Coarsest level: dense complex solve.
    const int J = m * m;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(J, J);
    for (int idx = 0; idx < J; ++idx) {
      A(idx, idx) = sigma + scale * lev.diag[idx];
      if (lev.west[idx] != 0.0) A(idx, idx - 1) = -scale * lev.west[idx];
      if (lev.east[idx] != 0.0) A(idx, idx + 1) = -scale * lev.east[idx];
      if (lev.south[idx] != 0.0) A(idx, idx - m) = -scale * lev.south[idx];
      if (lev.north[idx] != 0.0) A(idx, idx + m) = -scale * lev.north[idx];
    }
    return A.partialPivLu().solve(r);
  }

  auto smooth = [&](Eigen::VectorXcd& x, int sweeps) {
    for (int s = 0; s < sweeps; ++s) {
      Eigen::VectorXcd res = r - apply_level(lev, sigma, scale, x);
      for (int idx = 0; idx < m * m; ++idx)
        x[idx] += kJacobiDamping * res[idx] / (sigma + scale * lev.diag[idx]);
    }
  };

  Eigen::VectorXcd x = x0;
  smooth(x, kPreSmooth);

  // Full-weighting restriction to the (mc x mc) coarse grid, mc = (m-1)/2.
  const Eigen::VectorXcd res = r - apply_level(lev, sigma, scale, x);
  const int mc = (m - 1) / 2;
  Eigen::VectorXcd rc(mc * mc);
  auto f = [&](int i, int j) { return res[(j - 1) * m + (i - 1)]; };
  for (int J2 = 1; J2 <= mc; ++J2) {
    for (int I = 1; I <= mc; ++I) {
      const int fi = 2 * I, fj = 2 * J2;
      rc[(J2 - 1) * mc + (I - 1)] =
          0.25 * f(fi, fj) +
          0.125 * (f(fi - 1, fj) + f(fi + 1, fj) + f(fi, fj - 1) + f(fi, fj + 1)) +
          0.0625 * (f(fi - 1, fj - 1) + f(fi + 1, fj - 1) + f(fi - 1, fj + 1) +
                    f(fi + 1, fj + 1));
    }
  }

  const Eigen::VectorXcd ec = vcycle_level(l + 1, sigma, scale, rc,
                                           Eigen::VectorXcd::Zero(mc * mc));

  // Bilinear prolongation and correction.
  auto c = [&](int I, int J2) -> std::complex<double> {
    if (I < 1 || I > mc || J2 < 1 || J2 > mc) return 0.0;
    return ec[(J2 - 1) * mc + (I - 1)];
  };
  for (int j = 1; j <= m; ++j) {
    for (int i = 1; i <= m; ++i) {
      std::complex<double> v;
      if (i % 2 == 0 && j % 2 == 0) {
        v = c(i / 2, j / 2);
      } else if (i % 2 == 1 && j % 2 == 0) {
        v = 0.5 * (c((i - 1) / 2, j / 2) + c((i + 1) / 2, j / 2));
      } else if (i % 2 == 0 && j % 2 == 1) {
        v = 0.5 * (c(i / 2, (j - 1) / 2) + c(i / 2, (j + 1) / 2));
      } else {
        v = 0.25 * (c((i - 1) / 2, (j - 1) / 2) + c((i + 1) / 2, (j - 1) / 2) +
                    c((i - 1) / 2, (j + 1) / 2) + c((i + 1) / 2, (j + 1) / 2));
      }
      x[(j - 1) * m + (i - 1)] += v;
    }
  }

  smooth(x, kPostSmooth);
  return x;
}

Eigen::MatrixXd SpatialOperator::dense() const {
  const Level& lev = levels_[0];
  const int m = lev.m;
  const int J = m * m;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(J, J);
  for (int idx = 0; idx < J; ++idx) {
    A(idx, idx) = lev.diag[idx];
    if (lev.west[idx] != 0.0) A(idx, idx - 1) = -lev.west[idx];
    if (lev.east[idx] != 0.0) A(idx, idx + 1) = -lev.east[idx];
    if (lev.south[idx] != 0.0) A(idx, idx - m) = -lev.south[idx];
    if (lev.north[idx] != 0.0) A(idx, idx + m) = -lev.north[idx];
  }
  return A;
}

}  // namespace pintoc
