#include "pintoc/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pintoc/fft.hpp"

namespace pintoc {

TemporalSymbol b_symbol(int n) {
  if (n < 1) throw std::invalid_argument("b_symbol: n must be >= 1");
  TemporalSymbol sym{n, Eigen::VectorXd(n)};
  sym.coeffs[0] = 1.0;
  for (int k = 1; k < n; ++k) sym.coeffs[k] = (k % 2 == 0) ? 2.0 : -2.0;
  return sym;
}

TemporalSymbol b2_inverse_symbol(int n) {
  if (n < 1) throw std::invalid_argument("b2_inverse_symbol: n must be >= 1");
  TemporalSymbol sym{n, Eigen::VectorXd(n)};
  for (int k = 0; k < n; ++k) sym.coeffs[k] = (k % 2 == 0) ? 1.0 : -1.0;
  return sym;
}

namespace {

void check_length(const TemporalSymbol& sym, const Eigen::VectorXd& x, int block_size) {
  if (block_size < 1) throw std::invalid_argument("toeplitz apply: block size must be >= 1");
  if (x.size() != static_cast<Eigen::Index>(sym.n) * block_size)
    throw std::invalid_argument("toeplitz apply: vector length != n * block_size");
}

Eigen::VectorXd reverse_time_blocks(const Eigen::VectorXd& x, int n, int J) {
  Eigen::VectorXd out(x.size());
  for (int t = 0; t < n; ++t)
    out.segment(static_cast<Eigen::Index>(n - 1 - t) * J, J) =
        x.segment(static_cast<Eigen::Index>(t) * J, J);
  return out;
}

}  // namespace

Eigen::VectorXd apply_lower_toeplitz(const TemporalSymbol& sym,
                                     const Eigen::VectorXd& x, int block_size) {
  check_length(sym, x, block_size);
  const int n = sym.n;
  const int J = block_size;
  if (n == 1) return sym.coeffs[0] * x;

  const int M = 2 * n;  // circulant embedding length
  Dft dft(M);

  std::vector<std::complex<double>> sym_hat(M, 0.0);
  for (int t = 0; t < n; ++t) sym_hat[static_cast<std::size_t>(t)] = sym.coeffs[t];
  dft.forward(sym_hat.data());

  Eigen::VectorXd y(x.size());
#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(M);
#pragma omp for
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < n; ++t) buf[t] = x[static_cast<Eigen::Index>(t) * J + j];
      std::fill(buf.begin() + n, buf.end(), std::complex<double>(0.0));
      dft.forward(buf.data());
      for (int t = 0; t < M; ++t) buf[t] *= sym_hat[static_cast<std::size_t>(t)];
      dft.backward(buf.data());
      for (int t = 0; t < n; ++t)
        y[static_cast<Eigen::Index>(t) * J + j] = buf[t].real() / M;
    }
  }
  return y;
}

Eigen::VectorXd apply_upper_toeplitz(const TemporalSymbol& sym,
                                     const Eigen::VectorXd& x, int block_size) {
  check_length(sym, x, block_size);
  // T^T = Rev * T * Rev with Rev the time-block flip.
  Eigen::VectorXd r = reverse_time_blocks(x, sym.n, block_size);
  r = apply_lower_toeplitz(sym, r, block_size);
  return reverse_time_blocks(r, sym.n, block_size);
}

AlphaCirculantFactor alpha_circulant_eigs(const TemporalSymbol& sym, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("alpha_circulant_eigs: alpha must be in (0, 1]");
  const int n = sym.n;
  AlphaCirculantFactor f;
  f.n = n;
  f.alpha = alpha;
  f.d_scale.resize(n);
  for (int i = 0; i < n; ++i)
    f.d_scale[i] = std::pow(alpha, static_cast<double>(i) / n);

  std::vector<std::complex<double>> buf(n);
  for (int j = 0; j < n; ++j) buf[j] = sym.coeffs[j] * f.d_scale[j];
  Dft dft(n);
  dft.forward(buf.data());
  f.eigs.resize(n);
  for (int k = 0; k < n; ++k) f.eigs[k] = buf[k];
  return f;
}

double choose_alpha(double tau, double gamma, double T_final) {
  if (!(tau > 0.0) || !(gamma > 0.0) || !(T_final > 0.0))
    throw std::invalid_argument("choose_alpha: all inputs must be positive");
  const double sg = std::sqrt(gamma);
  const double t1 = tau / (24.0 * sg);
  const double t2 = std::pow(tau, 1.5) / (2.0 * std::sqrt(6.0 * gamma) * T_final);
  const double t3 = tau * tau / (8.0 * std::sqrt(3.0 * gamma) * T_final);
  return 0.5 * std::min({t1, t2, t3, 1.0 / 3.0});
}

bool alpha_invertibility_check(double alpha, double tau, double gamma) {
  return alpha <= 1.0 && alpha < tau / (2.0 * std::sqrt(gamma));
}

}  // namespace pintoc
