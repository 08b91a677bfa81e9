#pragma once

#include <Eigen/Dense>
#include <complex>

namespace pintoc {

/// First column of a lower-triangular Toeplitz time operator.
struct TemporalSymbol {
  int n = 0;
  Eigen::VectorXd coeffs;
};

/// Symbol of B = B2^{-1} B1: q_0 = 1, q_k = 2*(-1)^k.
TemporalSymbol b_symbol(int n);

/// Symbol of B2^{-1}: s_k = (-1)^k.
TemporalSymbol b2_inverse_symbol(int n);

/// (T (x) I_J) x, with T the lower-triangular Toeplitz matrix built from sym.
/// Circulant embedding + FFT along the time axis, O(J n log n).
Eigen::VectorXd apply_lower_toeplitz(const TemporalSymbol& sym,
                                     const Eigen::VectorXd& x, int block_size);

/// (T^T (x) I_J) x, the transposed (upper-triangular) apply.
Eigen::VectorXd apply_upper_toeplitz(const TemporalSymbol& sym,
                                     const Eigen::VectorXd& x, int block_size);

/// Diagonalization data of the alpha-circulant completion B_alpha of a
/// lower-triangular Toeplitz operator: B_alpha = D^{-1} F Lambda F^* D with
/// D = diag(alpha^{i/n}) and Lambda = diag(eigs).
struct AlphaCirculantFactor {
  int n = 0;
  double alpha = 0.0;
  Eigen::VectorXd d_scale;                     // alpha^{i/n}, i = 0..n-1
  Eigen::VectorXcd eigs;                       // unnormalized conjugate DFT of the scaled symbol
};

/// eigs[k] = sum_j coeffs[j] * alpha^{j/n} * e^{-2*pi*i*kj/n}, via one FFT.
AlphaCirculantFactor alpha_circulant_eigs(const TemporalSymbol& sym, double alpha);

/// alpha = (1/2) * min{ tau/(24 sqrt(gamma)), tau^{3/2}/(2 sqrt(6 gamma) T),
///                      tau^2/(8 sqrt(3 gamma) T), 1/3 }.
double choose_alpha(double tau, double gamma, double T_final);

/// True iff alpha <= 1 and alpha < tau/(2 sqrt(gamma)).
bool alpha_invertibility_check(double alpha, double tau, double gamma);

}  // namespace pintoc
