#include "pintoc/precond.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace pintoc {

MscPreconditioner::MscPreconditioner(const ControlProblem& prob)
    : prob_(&prob),
      q_(b_symbol(prob.N)),
      sqrt_tau_(std::sqrt(prob.tau())),
      two_sqrt_eta_(2.0 * std::sqrt(prob.eta())),
      scale_(prob.tau() * std::sqrt(prob.eta())) {
  if (prob.op->mode() == SpatialOperator::Mode::Sine)
    fast_.emplace(*prob.op, sqrt_tau_ + two_sqrt_eta_, scale_);
}

Eigen::VectorXd MscPreconditioner::block_solve(const Eigen::VectorXd& r) const {
  const double sigma = sqrt_tau_ + two_sqrt_eta_;
  if (prob_->op->mode() == SpatialOperator::Mode::Sine)
    return prob_->op->shifted_solve(sigma, scale_, r);
  return prob_->op
      ->iterative_solve(std::complex<double>(sigma), scale_,
                        r.cast<std::complex<double>>(), 1e-12)
      .real();
}

Eigen::VectorXd MscPreconditioner::apply_inverse(const Eigen::VectorXd& w) const {
  if (w.size() != prob_->unknowns())
    throw std::invalid_argument("MscPreconditioner: length mismatch");
  if (prob_->op->mode() == SpatialOperator::Mode::Sine)
    return apply_inverse_spectral(w);
  const int N = prob_->N;
  const int J = prob_->grid.J;

  // Forward substitution: R x = w.
  Eigen::VectorXd x(w.size());
  for (int n = 0; n < N; ++n) {
    Eigen::VectorXd rhs = w.segment(static_cast<Eigen::Index>(n) * J, J);
    for (int j = 0; j < n; ++j)
      rhs -= two_sqrt_eta_ * q_.coeffs[n - j] *
             x.segment(static_cast<Eigen::Index>(j) * J, J);
    x.segment(static_cast<Eigen::Index>(n) * J, J) = block_solve(rhs);
  }

  // Backward substitution: R^T z = x.
  Eigen::VectorXd z(w.size());
  for (int n = N - 1; n >= 0; --n) {
    Eigen::VectorXd rhs = x.segment(static_cast<Eigen::Index>(n) * J, J);
    for (int j = n + 1; j < N; ++j)
      rhs -= two_sqrt_eta_ * q_.coeffs[j - n] *
             z.segment(static_cast<Eigen::Index>(j) * J, J);
    z.segment(static_cast<Eigen::Index>(n) * J, J) = block_solve(rhs);
  }
  return z;
}

// Conjugating both triangular factors by the per-block x-direction sine
// basis leaves the temporal coupling unchanged (the off-diagonal blocks are
// scalar multiples of the identity), so the substitutions run in the
// transformed basis with one transform per block at entry and exit and a
// factored tridiagonal solve per diagonal block.
Eigen::VectorXd MscPreconditioner::apply_inverse_spectral(
    const Eigen::VectorXd& w) const {
  const int N = prob_->N;
  const int J = prob_->grid.J;

  Eigen::VectorXd x = w;
#pragma omp parallel for
  for (int n = 0; n < N; ++n)
    fast_->to_x_basis(x.data() + static_cast<Eigen::Index>(n) * J);

  // Forward substitution: R x = w in the transformed basis.
  for (int n = 0; n < N; ++n) {
    auto xn = x.segment(static_cast<Eigen::Index>(n) * J, J);
    for (int j = 0; j < n; ++j)
      xn -= two_sqrt_eta_ * q_.coeffs[n - j] *
            x.segment(static_cast<Eigen::Index>(j) * J, J);
    fast_->solve_in_x_basis(xn.data());
  }

  // Backward substitution: R^T z = x.
  for (int n = N - 1; n >= 0; --n) {
    auto xn = x.segment(static_cast<Eigen::Index>(n) * J, J);
    for (int j = n + 1; j < N; ++j)
      xn -= two_sqrt_eta_ * q_.coeffs[j - n] *
            x.segment(static_cast<Eigen::Index>(j) * J, J);
    fast_->solve_in_x_basis(xn.data());
  }

#pragma omp parallel for
  for (int n = 0; n < N; ++n)
    fast_->from_x_basis(x.data() + static_cast<Eigen::Index>(n) * J);
  return x;
}

PinTPreconditioner::PinTPreconditioner(const ControlProblem& prob, double alpha,
                                       FactorOrder order, int cycles)
    : prob_(&prob),
      order_(order),
      cycles_(cycles),
      sqrt_tau_(std::sqrt(prob.tau())),
      two_sqrt_eta_(2.0 * std::sqrt(prob.eta())),
      scale_(prob.tau() * std::sqrt(prob.eta())) {
  if (!alpha_invertibility_check(alpha, prob.tau(), prob.gamma))
    throw std::invalid_argument("PinTPreconditioner: alpha outside the admissible interval");
  if (alpha < 1e-12)
    std::fprintf(stderr,
                 "PinTPreconditioner: alpha = %g; the diagonal scaling has condition "
                 "number ~1/alpha and may amplify roundoff\n", alpha);
  factor_ = alpha_circulant_eigs(b_symbol(prob.N), alpha);
  for (int k = 0; k < prob.N; ++k) {
    if (!(sqrt_tau_ + two_sqrt_eta_ * factor_.eigs[k].real() > 0.0))
      throw std::runtime_error("PinTPreconditioner: nonpositive real part in a frequency shift");
  }
  dft_ = std::make_shared<Dft>(prob.N);
}

Eigen::VectorXcd PinTPreconditioner::three_step_solve(const Eigen::VectorXcd& r,
                                                      bool transpose) const {
  const int N = prob_->N;
  const int J = prob_->grid.J;
  const Eigen::VectorXd& d = factor_.d_scale;

  Eigen::VectorXcd work(r.size());
  // Step (a): diagonal scaling and DFT along each time trace.
#pragma omp parallel
  {
    std::vector<std::complex<double>> trace(N);
#pragma omp for
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < N; ++t) {
        const std::complex<double> v = r[static_cast<Eigen::Index>(t) * J + j];
        trace[t] = transpose ? v / d[t] : v * d[t];
      }
      dft_->forward(trace.data());
      for (int t = 0; t < N; ++t)
        work[static_cast<Eigen::Index>(t) * J + j] = trace[t];
    }
  }

  // Step (b): N independent complex-shifted spatial solves.
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < N; ++k) {
    const std::complex<double> lam =
        transpose ? std::conj(factor_.eigs[k]) : factor_.eigs[k];
    const std::complex<double> sigma = sqrt_tau_ + two_sqrt_eta_ * lam;
    const Eigen::Index off = static_cast<Eigen::Index>(k) * J;
    work.segment(off, J) =
        prob_->op->shifted_solve(sigma, scale_, Eigen::VectorXcd(work.segment(off, J)),
                                 cycles_);
  }

  // Step (c): inverse DFT and inverse scaling.
  Eigen::VectorXcd x(r.size());
#pragma omp parallel
  {
    std::vector<std::complex<double>> trace(N);
#pragma omp for
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < N; ++t)
        trace[t] = work[static_cast<Eigen::Index>(t) * J + j];
      dft_->backward(trace.data());
      for (int t = 0; t < N; ++t) {
        const std::complex<double> v = trace[t] / static_cast<double>(N);
        x[static_cast<Eigen::Index>(t) * J + j] = transpose ? v * d[t] : v / d[t];
      }
    }
  }
  return x;
}

Eigen::VectorXcd PinTPreconditioner::apply_Ralpha_inverse(const Eigen::VectorXcd& r) const {
  if (r.size() != prob_->unknowns())
    throw std::invalid_argument("apply_Ralpha_inverse: length mismatch");
  return three_step_solve(r, false);
}

Eigen::VectorXcd PinTPreconditioner::apply_RalphaT_inverse(const Eigen::VectorXcd& r) const {
  if (r.size() != prob_->unknowns())
    throw std::invalid_argument("apply_RalphaT_inverse: length mismatch");
  return three_step_solve(r, true);
}

Eigen::VectorXd PinTPreconditioner::apply_inverse(const Eigen::VectorXd& w) const {
  if (w.size() != prob_->unknowns())
    throw std::invalid_argument("PinTPreconditioner: length mismatch");
  Eigen::VectorXcd z = w.cast<std::complex<double>>();
  if (order_ == FactorOrder::TransposeLast) {
    z = apply_RalphaT_inverse(apply_Ralpha_inverse(z));
  } else {
    z = apply_Ralpha_inverse(apply_RalphaT_inverse(z));
  }
  return z.real();
}

}  // namespace pintoc
